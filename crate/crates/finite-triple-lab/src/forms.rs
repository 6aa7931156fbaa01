use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::subspace::{orthonormal_range, CMatrix, OperatorSubspace, RANK_TOL};
use crate::triple::FiniteTriple;

/// `span{[D, b]}` over the algebra basis.
pub fn differentials(t: &FiniteTriple) -> OperatorSubspace {
    let basis = t.algebra_subspace().basis();
    let gens: Vec<CMatrix> = basis.iter().map(|b| t.commutator(b)).collect();
    // Basis elements have unit norm, so ‖[D, b]‖ ≤ 2‖D‖.
    OperatorSubspace::span_with_reference(t.dim_h(), &gens, 2.0 * t.d().norm())
}

/// `span{x y : x ∈ X, y ∈ Y}`.
pub(crate) fn products(dim_h: usize, xs: &[CMatrix], ys: &[CMatrix]) -> OperatorSubspace {
    let mut gens = Vec::with_capacity(xs.len() * ys.len());
    let mut reference: f64 = 0.0;
    for x in xs {
        for y in ys {
            reference = reference.max(x.norm() * y.norm());
            gens.push(x * y);
        }
    }
    OperatorSubspace::span_with_reference(dim_h, &gens, reference)
}

/// `Ω¹_D = span{a [D, b]}`.
pub fn omega1_space(t: &FiniteTriple) -> OperatorSubspace {
    products(t.dim_h(), &t.algebra_subspace().basis(), &differentials(t).basis())
}

/// `π(Ω²) = span{a [D, b] [D, c]}`, computed as `Ω¹ · span{[D, c]}`.
pub fn pi_omega2_space(t: &FiniteTriple) -> OperatorSubspace {
    products(t.dim_h(), &omega1_space(t).basis(), &differentials(t).basis())
}

/// Junk 2-forms `{Σ [D, b_j][D, c_j] : Σ b_j [D, c_j] = 0}`.
///
/// The relation map `(b, c) ↦ b[D, c]` is assembled on pairs of basis elements, its kernel is
/// is the orthogonal complement of its row space, and the kernel is pushed through `(b, c) ↦ [D, b][D, c]`.
pub fn junk_space(t: &FiniteTriple) -> OperatorSubspace {
    let basis = t.algebra_subspace().basis();
    let dim_h = t.dim_h();
    let d2 = dim_h * dim_h;
    let diffs: Vec<CMatrix> = basis.iter().map(|b| t.commutator(b)).collect();
    let pairs = basis.len() * basis.len();
    let mut relation = CMatrix::zeros(d2, pairs);
    let mut image = CMatrix::zeros(d2, pairs);
    for (i, b) in basis.iter().enumerate() {
        for (j, dc) in diffs.iter().enumerate() {
            let col = i * basis.len() + j;
            relation.column_mut(col).copy_from_slice((b * dc).as_slice());
            image.column_mut(col).copy_from_slice((&diffs[i] * dc).as_slice());
        }
    }
    if pairs == 0 || image.norm() == 0.0 {
        return OperatorSubspace::zero(dim_h);
    }
    // Removing the row space of the relation map from the image map leaves its action on the kernel.
    let rows = relation.adjoint();
    let largest = (0..rows.ncols()).map(|k| rows.column(k).norm()).fold(0.0, f64::max);
    let row_space = orthonormal_range(&rows, RANK_TOL * largest.max(2.0 * t.d().norm()));
    let on_kernel = &image - (&image * &row_space) * row_space.adjoint();
    let reference = (0..pairs).map(|k| image.column(k).norm()).fold(0.0, f64::max);
    OperatorSubspace::span_columns(dim_h, &on_kernel, reference)
}

/// Trace weight `W` in `⟨T₁, T₂⟩ = Tr(T₁* T₂ W)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceWeight {
    #[default]
    Identity,
    /// `|D|^{-exponent}` on the range of `D`, zero on its kernel.
    DPower { exponent: f64 },
}

impl TraceWeight {
    pub fn matrix(&self, t: &FiniteTriple) -> CMatrix {
        let n = t.dim_h();
        match *self {
            TraceWeight::Identity => CMatrix::identity(n, n),
            TraceWeight::DPower { exponent } => {
                let eig = SymmetricEigen::new(t.d().clone());
                let scale = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
                let mut w = CMatrix::zeros(n, n);
                for k in 0..n {
                    let lam = eig.eigenvalues[k].abs();
                    if lam > RANK_TOL * scale.max(1.0) {
                        let v = eig.eigenvectors.column(k);
                        w += (&v * v.adjoint()) * Complex64::new(lam.powf(-exponent), 0.0);
                    }
                }
                w
            }
        }
    }

    /// Number of kernel directions of `D` that receive weight zero.
    pub fn excluded_kernel_dim(&self, t: &FiniteTriple) -> usize {
        self.kernel_projector(t).trace().re.round() as usize
    }

    /// Orthogonal projector onto the directions that receive weight zero.
    pub fn kernel_projector(&self, t: &FiniteTriple) -> CMatrix {
        let n = t.dim_h();
        let mut p = CMatrix::zeros(n, n);
        if let TraceWeight::DPower { .. } = self {
            let eig = SymmetricEigen::new(t.d().clone());
            let scale = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
            for k in 0..n {
                if eig.eigenvalues[k].abs() <= RANK_TOL * scale {
                    let v = eig.eigenvectors.column(k);
                    p += &v * v.adjoint();
                }
            }
        }
        p
    }
}

/// Dimensions of the low-degree forms and the projector onto the complement of junk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormReport {
    pub dim_omega1: usize,
    pub dim_pi_omega2: usize,
    pub dim_junk: usize,
    pub dim_omega2: usize,
    pub weight: TraceWeight,
    pub excluded_kernel_dim: usize,
    /// Projector on the coordinates of `π(Ω²)` (in its orthonormal basis) onto the complement
    /// of junk, orthogonal for the weighted inner product; row-major `[re, im]` pairs.
    #[serde(serialize_with = "serialize_matrix")]
    pub junk_projector: CMatrix,
    /// Largest residual of junk against `π(Ω²)`.
    pub junk_containment_residual: f64,
}

fn serialize_matrix<S: serde::Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    rows.serialize(s)
}

pub fn form_report(t: &FiniteTriple) -> FormReport {
    form_report_weighted(t, TraceWeight::Identity)
}

pub fn form_report_weighted(t: &FiniteTriple, weight: TraceWeight) -> FormReport {
    let omega1 = omega1_space(t);
    let pi2 = pi_omega2_space(t);
    let junk = junk_space(t);
    let k = pi2.dim();
    let q = pi2.basis_matrix();
    // Coordinates of junk inside π(Ω²).
    let c = q.ad_mul(junk.basis_matrix());
    let ops = pi2.basis();
    let gram_for = |w: &CMatrix| CMatrix::from_fn(k, k, |i, j| (ops[i].adjoint() * &ops[j] * w).trace());
    let projector = if junk.dim() == 0 {
        CMatrix::identity(k, k)
    } else {
        let mut gram = gram_for(&weight.matrix(t));
        let mut inner = c.adjoint() * &gram * &c;
        if inner.rank(RANK_TOL * inner.norm().max(1.0)) < junk.dim() {
            // Junk the weight cannot see: give the kernel of D unit weight so the projector
            // still has junk as its kernel.
            gram = gram_for(&(weight.matrix(t) + weight.kernel_projector(t)));
            inner = c.adjoint() * &gram * &c;
        }
        let pinv = inner.pseudo_inverse(RANK_TOL).expect("tolerance is non-negative");
        CMatrix::identity(k, k) - &c * pinv * c.adjoint() * &gram
    };
    FormReport {
        dim_omega1: omega1.dim(),
        dim_pi_omega2: k,
        dim_junk: junk.dim(),
        dim_omega2: k.saturating_sub(junk.dim()),
        weight,
        excluded_kernel_dim: weight.excluded_kernel_dim(t),
        junk_projector: projector,
        junk_containment_residual: pi2.containment_residual(&junk),
    }
}
