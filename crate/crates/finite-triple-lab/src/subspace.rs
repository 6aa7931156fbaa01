use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-10;
/// Projection residual allowed when comparing subspaces.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Column-major vectorization.
pub fn vectorize(m: &CMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &[Complex64], dim_h: usize) -> CMatrix {
    CMatrix::from_column_slice(dim_h, dim_h, v)
}

/// A subspace of `B(C^d)` with a Frobenius-orthonormal basis, stored as the columns of a
/// `d² × k` matrix of vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSubspace {
    dim_h: usize,
    basis: CMatrix,
}

impl OperatorSubspace {
    pub fn zero(dim_h: usize) -> Self {
        OperatorSubspace { dim_h, basis: CMatrix::zeros(dim_h * dim_h, 0) }
    }

    /// Span of the given operators, with rank decided relative to the largest generator.
    pub fn span(dim_h: usize, generators: &[CMatrix]) -> Self {
        Self::span_with_reference(dim_h, generators, 0.0)
    }

    /// Span with singular values compared against `RANK_TOL · max(reference, largest generator)`.
    ///
    /// Callers pass the natural size of the generators (e.g. the product of operand norms) so
    /// that generators which vanish up to roundoff are not mistaken for a basis.
    pub fn span_with_reference(dim_h: usize, generators: &[CMatrix], reference: f64) -> Self {
        let d2 = dim_h * dim_h;
        let mut cols = CMatrix::zeros(d2, generators.len());
        for (k, g) in generators.iter().enumerate() {
            assert_eq!(g.shape(), (dim_h, dim_h), "generator of the wrong size");
            cols.column_mut(k).copy_from_slice(g.as_slice());
        }
        Self::span_columns(dim_h, &cols, reference)
    }

    /// Span of the columns of a `d² × m` matrix of vectorized operators.
    ///
    /// Directions with singular value below `RANK_TOL · max(reference, largest column norm)`
    /// are discarded. Columns are processed in chunks so that very wide inputs stay cheap.
    pub fn span_columns(dim_h: usize, cols: &CMatrix, reference: f64) -> Self {
        let d2 = dim_h * dim_h;
        assert_eq!(cols.nrows(), d2, "columns must have length dim_h²");
        let largest = (0..cols.ncols()).map(|k| cols.column(k).norm()).fold(0.0, f64::max);
        if largest == 0.0 {
            return Self::zero(dim_h);
        }
        let scale = largest.max(reference);
        let tol = RANK_TOL * scale;
        let chunk = d2.max(32);
        let mut q = CMatrix::zeros(d2, 0);
        let mut start = 0;
        while start < cols.ncols() {
            let end = (start + chunk).min(cols.ncols());
            let mut stacked = CMatrix::zeros(d2, q.ncols() + end - start);
            stacked.columns_mut(0, q.ncols()).copy_from(&(&q * Complex64::new(scale, 0.0)));
            stacked.columns_mut(q.ncols(), end - start).copy_from(&cols.columns(start, end - start));
            q = orthonormal_range(&stacked, tol);
            start = end;
        }
        OperatorSubspace { dim_h, basis: q }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim_h * self.dim_h
    }

    /// Orthonormal basis as the columns of a `d² × k` matrix.
    pub fn basis_matrix(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthonormal basis as operators.
    pub fn basis(&self) -> Vec<CMatrix> {
        (0..self.dim()).map(|k| unvectorize(self.basis.column(k).as_slice(), self.dim_h)).collect()
    }

    /// Frobenius distance from a vectorized operator to the subspace.
    pub fn residual(&self, v: &DVector<Complex64>) -> f64 {
        let coords = self.basis.ad_mul(v);
        (v - &self.basis * coords).norm()
    }

    /// [`residual`](Self::residual) divided by the norm of `v` (zero for `v = 0`).
    pub fn relative_residual(&self, v: &DVector<Complex64>) -> f64 {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.residual(v) / norm
    }

    /// Largest residual of `other`'s basis vectors against `self`.
    pub fn containment_residual(&self, other: &OperatorSubspace) -> f64 {
        (0..other.dim())
            .map(|k| self.relative_residual(&other.basis.column(k).into_owned()))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, other: &OperatorSubspace) -> bool {
        self.containment_residual(other) <= EQUALITY_TOL
    }

    /// Mutual containment.
    pub fn equals(&self, other: &OperatorSubspace) -> bool {
        self.dim_h == other.dim_h && self.contains(other) && other.contains(self)
    }

    pub fn sum(&self, other: &OperatorSubspace) -> OperatorSubspace {
        let mut cols = CMatrix::zeros(self.ambient_dim(), self.dim() + other.dim());
        cols.columns_mut(0, self.dim()).copy_from(&self.basis);
        cols.columns_mut(self.dim(), other.dim()).copy_from(&other.basis);
        Self::span_columns(self.dim_h, &cols, 1.0)
    }

    /// Dimension of the intersection, from `dim(U ∩ V) = dim U + dim V − dim(U + V)`.
    pub fn intersection_dim(&self, other: &OperatorSubspace) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }

    /// Random element with standard complex Gaussian-like coordinates (uniform in `[-1, 1]²`).
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let coords = DVector::from_fn(self.dim(), |_, _| {
            Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
        });
        let v = &self.basis * coords;
        unvectorize(v.as_slice(), self.dim_h)
    }
}

/// Orthonormal basis of the column space, keeping singular values above `tol`.
pub(crate) fn orthonormal_range(m: &CMatrix, tol: f64) -> CMatrix {
    // Gram-Schmidt with column pivoting, each projection applied twice.
    let mut work = m.clone();
    let mut q = CMatrix::zeros(m.nrows(), m.nrows().min(m.ncols()));
    let mut rank = 0;
    let mut norms: Vec<f64> = (0..work.ncols()).map(|k| work.column(k).norm()).collect();
    loop {
        let Some((best, &norm)) = norms.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
            break;
        };
        if norm <= tol || rank == q.ncols() {
            break;
        }
        let mut v = work.column(best).into_owned();
        for _ in 0..2 {
            let basis = q.columns(0, rank);
            let coords = basis.ad_mul(&v);
            v -= basis * coords;
        }
        let len = v.norm();
        norms[best] = 0.0;
        if len <= tol {
            continue;
        }
        v /= Complex64::new(len, 0.0);
        for k in 0..work.ncols() {
            if norms[k] == 0.0 {
                continue;
            }
            let mut col = work.column_mut(k);
            let c = v.dotc(&col);
            col -= &v * c;
            norms[k] = col.norm();
        }
        q.set_column(rank, &v);
        rank += 1;
    }
    q.columns(0, rank).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn unit(d: usize, i: usize, j: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        m[(i, j)] = c(1.0);
        m
    }

    #[test]
    fn span_drops_dependent_generators() {
        let a = unit(2, 0, 0);
        let b = unit(2, 1, 1);
        let s = OperatorSubspace::span(2, &[a.clone(), b.clone(), &a + &b * c(2.0)]);
        assert_eq!(s.dim(), 2);
        let gram = s.basis_matrix().ad_mul(s.basis_matrix());
        assert!((gram - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn chunked_span_matches_direct_rank() {
        // 40 generators in a 4-dimensional ambient space, well past one chunk.
        let gens: Vec<CMatrix> = (0..40).map(|k| unit(2, k % 2, (k / 2) % 2) * c(1.0 + k as f64)).collect();
        assert_eq!(OperatorSubspace::span(2, &gens).dim(), 4);
    }

    #[test]
    fn equality_and_intersection() {
        let x = OperatorSubspace::span(2, &[unit(2, 0, 0), unit(2, 0, 1)]);
        let y = OperatorSubspace::span(2, &[&unit(2, 0, 0) + &unit(2, 0, 1), unit(2, 0, 1)]);
        assert!(x.equals(&y));
        let z = OperatorSubspace::span(2, &[unit(2, 0, 1), unit(2, 1, 1)]);
        assert_eq!(x.intersection_dim(&z), 1);
        assert!(!x.equals(&z));
        assert_eq!(OperatorSubspace::span(2, &[CMatrix::zeros(2, 2)]).dim(), 0);
    }

    #[test]
    fn vectorization_round_trip() {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64));
        assert_eq!(unvectorize(vectorize(&m).as_slice(), 3), m);
    }
}
