use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::TorusError;

/// Real skew-symmetric deformation matrix of a noncommutative n-torus.
///
/// Stored row-major. The diagonal is exactly zero and
/// `entries[j][k] == -entries[k][j]` holds bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTheta")]
pub struct ThetaMatrix {
    n: usize,
    entries: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTheta {
    n: usize,
    entries: Vec<f64>,
}

impl TryFrom<RawTheta> for ThetaMatrix {
    type Error = TorusError;

    fn try_from(raw: RawTheta) -> Result<Self, Self::Error> {
        ThetaMatrix::new(raw.n, raw.entries)
    }
}

impl ThetaMatrix {
    /// Builds a deformation matrix from row-major entries, rejecting anything
    /// that is not exactly skew-symmetric.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, TorusError> {
        if n == 0 {
            return Err(TorusError::InvalidTheta("torus dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(TorusError::InvalidTheta(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        for j in 0..n {
            if entries[j * n + j] != 0.0 {
                return Err(TorusError::InvalidTheta(format!("diagonal entry ({j},{j}) is nonzero")));
            }
            for k in 0..n {
                let a = entries[j * n + k];
                if !a.is_finite() {
                    return Err(TorusError::InvalidTheta(format!("entry ({j},{k}) is not finite")));
                }
                if a != -entries[k * n + j] {
                    return Err(TorusError::InvalidTheta(format!(
                        "entries ({j},{k}) and ({k},{j}) are not negatives of each other"
                    )));
                }
            }
        }
        Ok(ThetaMatrix { n, entries })
    }

    /// The commutative torus of dimension `n`.
    pub fn zero(n: usize) -> Self {
        assert!(n > 0, "torus dimension must be positive");
        ThetaMatrix { n, entries: vec![0.0; n * n] }
    }

    /// Two-torus with the single parameter `theta = Θ₁₂ = -Θ₂₁`.
    pub fn two_torus(theta: f64) -> Self {
        ThetaMatrix::from_upper(2, &[theta])
    }

    /// Builds the matrix from its strict upper triangle listed row by row.
    pub fn from_upper(n: usize, upper: &[f64]) -> Self {
        assert_eq!(upper.len(), n * (n - 1) / 2, "wrong number of upper-triangular entries");
        let mut entries = vec![0.0; n * n];
        let mut it = upper.iter();
        for j in 0..n {
            for k in j + 1..n {
                let v = *it.next().unwrap();
                entries[j * n + k] = v;
                entries[k * n + j] = -v;
            }
        }
        ThetaMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.n + k]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Exponent (in turns) of the cocycle `σ(r, s) = e(Σ_{j<k} Θ_jk r_k s_j)`.
    ///
    /// Moving `U_j^{s_j}` to the left past `U_k^{r_k}` (j < k) picks up
    /// `e(Θ_jk r_k s_j)` from `U_k U_j = e(Θ_jk) U_j U_k`.
    pub fn cocycle_turns(&self, r: &[i32], s: &[i32]) -> f64 {
        let n = self.n;
        let mut x = 0.0;
        for j in 0..n {
            if s[j] == 0 {
                continue;
            }
            let row = &self.entries[j * n..(j + 1) * n];
            let mut acc = 0.0;
            for k in j + 1..n {
                acc += row[k] * r[k] as f64;
            }
            x += acc * s[j] as f64;
        }
        x
    }

    /// Phase `σ(r, s)` with `U^r · U^s = σ(r, s) U^{r+s}`.
    pub fn cocycle(&self, r: &[i32], s: &[i32]) -> Complex64 {
        turns_to_phase(self.cocycle_turns(r, s))
    }

    /// Phase `c(r)` with `(U^r)* = c(r) U^{-r}`, namely `e(Σ_{j<k} Θ_jk r_j r_k)`.
    pub fn adjoint_phase(&self, r: &[i32]) -> Complex64 {
        turns_to_phase(self.cocycle_turns(r, r))
    }

    pub fn is_commutative(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }
}

/// `e(x) = exp(2πix)`, with `x` reduced mod 1 first.
pub fn turns_to_phase(x: f64) -> Complex64 {
    let frac = x.rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * frac)
}

/// Block-diagonal `diag(Θ, Φ)`: the deformation of `A_Θ ⊗ A_Φ` viewed as an (n+m)-torus.
pub fn product_theta(theta: &ThetaMatrix, phi: &ThetaMatrix) -> ThetaMatrix {
    let (n, m) = (theta.n, phi.n);
    let size = n + m;
    let mut entries = vec![0.0; size * size];
    for j in 0..n {
        for k in 0..n {
            entries[j * size + k] = theta.get(j, k);
        }
    }
    for j in 0..m {
        for k in 0..m {
            entries[(n + j) * size + n + k] = phi.get(j, k);
        }
    }
    ThetaMatrix { n: size, entries }
}
