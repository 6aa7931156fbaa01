use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::TripleError;
use crate::subspace::{vectorize, CMatrix, OperatorSubspace, EQUALITY_TOL};

/// Tolerance for the self-adjointness and grading identities.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Finite spectral triple `(A, C^d, D)` with optional grading `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTriple {
    dim_h: usize,
    algebra_basis: Vec<CMatrix>,
    d: CMatrix,
    gamma: Option<CMatrix>,
}

fn rel(x: f64, scale: f64) -> f64 {
    x / (1.0 + scale)
}

impl FiniteTriple {
    /// Validates the triple. The basis must span a unital *-algebra: it has to contain the
    /// identity and be closed under adjoints and products up to span.
    pub fn new(algebra_basis: Vec<CMatrix>, d: CMatrix, gamma: Option<CMatrix>) -> Result<Self, TripleError> {
        let dim_h = d.nrows();
        if dim_h == 0 || d.ncols() != dim_h {
            return Err(TripleError::ShapeMismatch("D must be a nonempty square matrix".into()));
        }
        if algebra_basis.is_empty() {
            return Err(TripleError::InvalidTriple("algebra basis is empty".into()));
        }
        for (k, a) in algebra_basis.iter().enumerate() {
            if a.shape() != (dim_h, dim_h) {
                return Err(TripleError::ShapeMismatch(format!("algebra basis element {k} is not {dim_h}×{dim_h}")));
            }
        }
        if let Some(g) = &gamma {
            if g.shape() != (dim_h, dim_h) {
                return Err(TripleError::ShapeMismatch(format!("grading is not {dim_h}×{dim_h}")));
            }
        }
        let all_finite = |m: &CMatrix| m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !all_finite(&d) || !algebra_basis.iter().all(all_finite) || !gamma.as_ref().is_none_or(all_finite) {
            return Err(TripleError::InvalidTriple("non-finite matrix entry".into()));
        }
        let dn = d.norm();
        if rel((&d - d.adjoint()).norm(), dn) > STRUCTURE_TOL {
            return Err(TripleError::InvalidTriple("D is not self-adjoint".into()));
        }
        let span = OperatorSubspace::span(dim_h, &algebra_basis);
        // Basis elements have unit norm, so an absolute residual is the right scale for products.
        let inside = |m: &CMatrix| span.residual(&vectorize(m)) <= EQUALITY_TOL * (1.0 + m.norm());
        if !inside(&CMatrix::identity(dim_h, dim_h)) {
            return Err(TripleError::InvalidTriple("algebra does not contain the identity".into()));
        }
        let basis = span.basis();
        for a in &basis {
            if !inside(&a.adjoint()) {
                return Err(TripleError::InvalidTriple("algebra is not closed under adjoints".into()));
            }
            for b in &basis {
                if !inside(&(a * b)) {
                    return Err(TripleError::InvalidTriple("algebra is not closed under products".into()));
                }
            }
        }
        if let Some(g) = &gamma {
            let one = CMatrix::identity(dim_h, dim_h);
            if (g - g.adjoint()).norm() > STRUCTURE_TOL || (g * g - &one).norm() > STRUCTURE_TOL * dim_h as f64 {
                return Err(TripleError::InvalidTriple("grading must be a self-adjoint involution".into()));
            }
            if rel((g * &d + &d * g).norm(), dn) > STRUCTURE_TOL {
                return Err(TripleError::InvalidTriple("grading does not anticommute with D".into()));
            }
            for a in &algebra_basis {
                if rel((g * a - a * g).norm(), a.norm()) > STRUCTURE_TOL {
                    return Err(TripleError::InvalidTriple("grading does not commute with the algebra".into()));
                }
            }
        }
        Ok(FiniteTriple { dim_h, algebra_basis, d, gamma })
    }

    /// Closes `generators ∪ {1}` under adjoints and products, then builds the triple.
    pub fn from_generators(generators: &[CMatrix], d: CMatrix, gamma: Option<CMatrix>) -> Result<Self, TripleError> {
        let dim_h = d.nrows();
        let mut gens: Vec<CMatrix> = vec![CMatrix::identity(dim_h, dim_h)];
        for g in generators {
            if g.shape() != (dim_h, dim_h) {
                return Err(TripleError::ShapeMismatch("generator size differs from D".into()));
            }
            gens.push(g.clone());
            gens.push(g.adjoint());
        }
        let mut span = OperatorSubspace::span(dim_h, &gens);
        loop {
            let basis = span.basis();
            let mut products = basis.clone();
            for a in &basis {
                for b in &basis {
                    products.push(a * b);
                }
            }
            let next = OperatorSubspace::span(dim_h, &products);
            if next.dim() == span.dim() {
                break;
            }
            span = next;
        }
        Self::new(span.basis(), d, gamma)
    }

    /// `(C, C, D = 0)` with grading `1`.
    pub fn trivial() -> Self {
        let one = CMatrix::identity(1, 1);
        FiniteTriple { dim_h: 1, algebra_basis: vec![one.clone()], d: CMatrix::zeros(1, 1), gamma: Some(one) }
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn algebra_basis(&self) -> &[CMatrix] {
        &self.algebra_basis
    }

    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    pub fn gamma(&self) -> Option<&CMatrix> {
        self.gamma.as_ref()
    }

    pub fn is_even(&self) -> bool {
        self.gamma.is_some()
    }

    /// Dimension of the span of the algebra basis.
    pub fn algebra_dim(&self) -> usize {
        self.algebra_subspace().dim()
    }

    pub fn algebra_subspace(&self) -> OperatorSubspace {
        OperatorSubspace::span(self.dim_h, &self.algebra_basis)
    }

    /// `[D, a]`.
    pub fn commutator(&self, a: &CMatrix) -> CMatrix {
        &self.d * a - a * &self.d
    }

    pub fn to_spec(&self) -> TripleSpec {
        TripleSpec {
            dim_h: self.dim_h,
            algebra_basis: self.algebra_basis.iter().map(matrix_to_pairs).collect(),
            d: matrix_to_pairs(&self.d),
            gamma: self.gamma.as_ref().map(matrix_to_pairs),
        }
    }

    pub fn from_spec(spec: &TripleSpec) -> Result<Self, TripleError> {
        let m = |v: &[[f64; 2]]| pairs_to_matrix(spec.dim_h, v);
        let basis = spec.algebra_basis.iter().map(|v| m(v)).collect::<Result<Vec<_>, _>>()?;
        let gamma = spec.gamma.as_ref().map(|v| m(v)).transpose()?;
        Self::new(basis, m(&spec.d)?, gamma)
    }
}

/// JSON form: `{"dim_h", "algebra_basis", "D", "gamma"?}`, each matrix a row-major list of
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleSpec {
    pub dim_h: usize,
    pub algebra_basis: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "D")]
    pub d: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<[f64; 2]>>,
}

impl Serialize for FiniteTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteTriple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = TripleSpec::deserialize(d)?;
        FiniteTriple::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

pub fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

pub fn pairs_to_matrix(dim: usize, v: &[[f64; 2]]) -> Result<CMatrix, TripleError> {
    if v.len() != dim * dim {
        return Err(TripleError::ShapeMismatch(format!("expected {} entries, got {}", dim * dim, v.len())));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| Complex64::new(v[i * dim + j][0], v[i * dim + j][1])))
}

/// Kronecker product `x ⊗ y` with the first factor outermost.
pub fn kron(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.kronecker(y)
}

/// Frobenius inner product `Tr(x* y)`.
pub fn frobenius(x: &CMatrix, y: &CMatrix) -> Complex64 {
    DVector::from_column_slice(x.as_slice()).dotc(&DVector::from_column_slice(y.as_slice()))
}
