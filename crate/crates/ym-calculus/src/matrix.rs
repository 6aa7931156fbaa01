use std::sync::Arc;

use nctorus_core::{product_theta, tensor_embed_with, Complex64, TermRecord, ThetaMatrix, TorusElement};
use rand::Rng;

use crate::error::YmError;

/// A `q × q` matrix over `A_Θ`, stored row-major.
#[derive(Clone, PartialEq)]
pub struct TorusMatrix {
    q: usize,
    theta: Arc<ThetaMatrix>,
    entries: Vec<TorusElement>,
}

impl std::fmt::Debug for TorusMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusMatrix").field("q", &self.q).field("entries", &self.entries).finish()
    }
}

impl TorusMatrix {
    pub fn zeros(theta: &Arc<ThetaMatrix>, q: usize) -> Self {
        TorusMatrix { q, theta: Arc::clone(theta), entries: vec![TorusElement::zero(theta); q * q] }
    }

    pub fn identity(theta: &Arc<ThetaMatrix>, q: usize) -> Self {
        let mut m = Self::zeros(theta, q);
        for a in 0..q {
            m.entries[a * q + a] = TorusElement::one(theta);
        }
        m
    }

    /// Builds a matrix from `q²` row-major entries, all over `theta`.
    pub fn from_entries(theta: &Arc<ThetaMatrix>, q: usize, entries: Vec<TorusElement>) -> Result<Self, YmError> {
        if q == 0 || entries.len() != q * q {
            return Err(YmError::ShapeMismatch(format!("expected {} entries for q = {q}, got {}", q * q, entries.len())));
        }
        let probe = TorusElement::zero(theta);
        if entries.iter().any(|e| !e.same_theta(&probe)) {
            return Err(YmError::Torus(nctorus_core::TorusError::ThetaMismatch));
        }
        Ok(TorusMatrix { q, theta: Arc::clone(theta), entries })
    }

    /// Constant matrix `Σ m_ab E_ab` with complex entries given row-major.
    pub fn constant(theta: &Arc<ThetaMatrix>, q: usize, values: &[Complex64]) -> Result<Self, YmError> {
        if values.len() != q * q {
            return Err(YmError::ShapeMismatch(format!("expected {} values, got {}", q * q, values.len())));
        }
        let entries = values.iter().map(|&v| TorusElement::scalar(theta, v)).collect();
        Ok(TorusMatrix { q, theta: Arc::clone(theta), entries })
    }

    /// `x · 1_q`.
    pub fn scalar_diag(x: &TorusElement, q: usize) -> Self {
        let mut m = Self::zeros(x.theta(), q);
        for a in 0..q {
            m.entries[a * q + a] = x.clone();
        }
        m
    }

    /// Entries with independent random coefficients on the box `|r|_∞ ≤ radius`.
    pub fn random<R: Rng + ?Sized>(theta: &Arc<ThetaMatrix>, q: usize, radius: u32, amplitude: f64, rng: &mut R) -> Self {
        let entries = (0..q * q).map(|_| TorusElement::random(theta, radius, amplitude, rng)).collect();
        TorusMatrix { q, theta: Arc::clone(theta), entries }
    }

    /// Random skew-adjoint matrix `(X − X*)/2`.
    pub fn random_skew<R: Rng + ?Sized>(theta: &Arc<ThetaMatrix>, q: usize, radius: u32, amplitude: f64, rng: &mut R) -> Self {
        Self::random(theta, q, radius, amplitude, rng).skew_part()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn get(&self, a: usize, b: usize) -> &TorusElement {
        &self.entries[a * self.q + b]
    }

    pub fn set(&mut self, a: usize, b: usize, x: TorusElement) {
        assert!(x.same_theta(&self.entries[0]), "entry from a different torus");
        self.entries[a * self.q + b] = x;
    }

    pub fn entries(&self) -> &[TorusElement] {
        &self.entries
    }

    pub fn same_shape(&self, other: &TorusMatrix) -> bool {
        self.q == other.q && self.entries[0].same_theta(&other.entries[0])
    }

    fn check_shape(&self, other: &TorusMatrix) -> Result<(), YmError> {
        if self.q != other.q {
            return Err(YmError::ShapeMismatch(format!("matrix sizes {} and {}", self.q, other.q)));
        }
        if !self.entries[0].same_theta(&other.entries[0]) {
            return Err(YmError::Torus(nctorus_core::TorusError::ThetaMismatch));
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &TorusMatrix) -> Result<TorusMatrix, YmError> {
        self.check_shape(other)?;
        let q = self.q;
        let mut out = Self::zeros(&self.theta, q);
        for a in 0..q {
            for c in 0..q {
                let x = self.get(a, c);
                if x.is_zero() {
                    continue;
                }
                for b in 0..q {
                    let y = other.get(c, b);
                    if !y.is_zero() {
                        out.entries[a * q + b] += &(x * y);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &TorusMatrix) -> Result<TorusMatrix, YmError> {
        self.check_shape(other)?;
        Ok(self.zip(other, |x, y| x + y))
    }

    pub fn checked_sub(&self, other: &TorusMatrix) -> Result<TorusMatrix, YmError> {
        self.check_shape(other)?;
        Ok(self.zip(other, |x, y| x - y))
    }

    fn zip(&self, other: &TorusMatrix, f: impl Fn(&TorusElement, &TorusElement) -> TorusElement) -> TorusMatrix {
        TorusMatrix {
            q: self.q,
            theta: Arc::clone(&self.theta),
            entries: self.entries.iter().zip(&other.entries).map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&TorusElement) -> TorusElement) -> TorusMatrix {
        TorusMatrix { q: self.q, theta: Arc::clone(&self.theta), entries: self.entries.iter().map(f).collect() }
    }

    /// Commutator `XY − YX`.
    pub fn commutator(&self, other: &TorusMatrix) -> Result<TorusMatrix, YmError> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn scale(&self, c: Complex64) -> TorusMatrix {
        self.map(|x| x.scale(c))
    }

    pub fn scale_real(&self, t: f64) -> TorusMatrix {
        self.scale(Complex64::new(t, 0.0))
    }

    /// Conjugate transpose with the torus involution on entries.
    pub fn adjoint(&self) -> TorusMatrix {
        let q = self.q;
        let mut entries = Vec::with_capacity(q * q);
        for a in 0..q {
            for b in 0..q {
                entries.push(self.get(b, a).adjoint());
            }
        }
        TorusMatrix { q, theta: Arc::clone(&self.theta), entries }
    }

    /// `(X − X*)/2`.
    pub fn skew_part(&self) -> TorusMatrix {
        self.zip(&self.adjoint(), |x, y| &(x - y) * 0.5)
    }

    /// `(X + X*)/2`.
    pub fn hermitian_part(&self) -> TorusMatrix {
        self.zip(&self.adjoint(), |x, y| &(x + y) * 0.5)
    }

    /// Entrywise `δ_j`, with `j` in `1..=n`.
    pub fn derivation(&self, j: usize) -> Result<TorusMatrix, YmError> {
        let entries = self.entries.iter().map(|x| x.derivation(j)).collect::<Result<Vec<_>, _>>()?;
        Ok(TorusMatrix { q: self.q, theta: Arc::clone(&self.theta), entries })
    }

    /// Extended trace `τ_q = τ ⊗ Tr` (un-normalized matrix trace).
    pub fn trace(&self) -> Complex64 {
        (0..self.q).map(|a| self.get(a, a).trace()).sum()
    }

    /// `τ_q(X* Y)`, computed coefficientwise.
    pub fn inner(&self, other: &TorusMatrix) -> Complex64 {
        self.entries.iter().zip(&other.entries).map(|(x, y)| x.inner(y)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(TorusElement::norm_sq).sum()
    }

    /// Sum of coefficient moduli over all entries.
    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(TorusElement::l1_norm).sum()
    }

    pub fn max_abs_diff(&self, other: &TorusMatrix) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TorusElement::is_zero)
    }

    /// True when every entry is a multiple of the unit.
    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|x| x.terms().all(|(r, _)| r.iter().all(|&v| v == 0)))
    }

    pub fn support_radius(&self) -> u32 {
        self.entries.iter().map(TorusElement::support_radius).max().unwrap_or(0)
    }

    /// Row-major payloads of the entries.
    pub fn to_records(&self) -> Vec<Vec<TermRecord>> {
        self.entries.iter().map(TorusElement::to_records).collect()
    }

    pub fn from_records(theta: &Arc<ThetaMatrix>, q: usize, records: &[Vec<TermRecord>]) -> Result<Self, YmError> {
        let entries = records
            .iter()
            .map(|r| TorusElement::from_records(theta, r))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_entries(theta, q, entries)
    }
}

/// Kronecker product over `diag(Θ, Φ)`: entry `(i1 q2 + i2, j1 q2 + j2)` is `x_{i1 j1} ⊗ y_{i2 j2}`.
pub fn kron_with(psi: &Arc<ThetaMatrix>, x: &TorusMatrix, y: &TorusMatrix) -> TorusMatrix {
    let (q1, q2) = (x.q, y.q);
    let q = q1 * q2;
    let mut out = TorusMatrix::zeros(psi, q);
    for i1 in 0..q1 {
        for j1 in 0..q1 {
            let a = x.get(i1, j1);
            if a.is_zero() {
                continue;
            }
            for i2 in 0..q2 {
                for j2 in 0..q2 {
                    let b = y.get(i2, j2);
                    if !b.is_zero() {
                        out.entries[(i1 * q2 + i2) * q + j1 * q2 + j2] = tensor_embed_with(psi, a, b);
                    }
                }
            }
        }
    }
    out
}

pub fn kron(x: &TorusMatrix, y: &TorusMatrix) -> TorusMatrix {
    let psi = Arc::new(product_theta(x.theta(), y.theta()));
    kron_with(&psi, x, y)
}
