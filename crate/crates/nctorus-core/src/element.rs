use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::TorusError;
use crate::theta::{product_theta, turns_to_phase, ThetaMatrix};

/// Multi-index `r ∈ Z^n` labelling the ordered monomial `U^r = U_1^{r_1} ··· U_n^{r_n}`.
pub type MultiIndex = SmallVec<[i32; 8]>;

/// Coefficients with modulus below this are dropped after every arithmetic operation.
pub const CANONICAL_EPS: f64 = 1e-15;

/// Identifier of the monomial ordering and cocycle written into reports.
pub const COCYCLE_CONVENTION: &str =
    "ascending-monomial: U^r = U_1^r1...U_n^rn, U^r U^s = e(sum_{j<k} theta_jk r_k s_j) U^(r+s)";

/// A finite-support Fourier polynomial `Σ a_r U^r` in the noncommutative torus `A_Θ`.
#[derive(Clone)]
pub struct TorusElement {
    theta: Arc<ThetaMatrix>,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

/// One serialized term `{"r": [...], "re": .., "im": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub r: Vec<i32>,
    pub re: f64,
    pub im: f64,
}

fn canonical(c: Complex64) -> bool {
    c.norm() >= CANONICAL_EPS
}

impl TorusElement {
    pub fn zero(theta: &Arc<ThetaMatrix>) -> Self {
        TorusElement { theta: Arc::clone(theta), coeffs: BTreeMap::new() }
    }

    pub fn one(theta: &Arc<ThetaMatrix>) -> Self {
        Self::scalar(theta, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(theta: &Arc<ThetaMatrix>, c: Complex64) -> Self {
        let zero: MultiIndex = SmallVec::from_elem(0, theta.n());
        Self::monomial_index(theta, zero, c)
    }

    /// `c · U^r`. Panics if `r` has the wrong length.
    pub fn monomial(theta: &Arc<ThetaMatrix>, r: &[i32], c: Complex64) -> Self {
        assert_eq!(r.len(), theta.n(), "multi-index length must equal torus dimension");
        Self::monomial_index(theta, SmallVec::from_slice(r), c)
    }

    fn monomial_index(theta: &Arc<ThetaMatrix>, r: MultiIndex, c: Complex64) -> Self {
        let mut coeffs = BTreeMap::new();
        if canonical(c) {
            coeffs.insert(r, c);
        }
        TorusElement { theta: Arc::clone(theta), coeffs }
    }

    /// The generator `U_k`, with `k` in `1..=n`. Panics outside that range.
    pub fn generator(theta: &Arc<ThetaMatrix>, k: usize) -> Self {
        assert!(k >= 1 && k <= theta.n(), "generator index {k} out of range");
        let mut r: MultiIndex = SmallVec::from_elem(0, theta.n());
        r[k - 1] = 1;
        Self::monomial_index(theta, r, Complex64::new(1.0, 0.0))
    }

    /// Sums the given terms; repeated indices accumulate.
    pub fn from_terms<I, R>(theta: &Arc<ThetaMatrix>, terms: I) -> Result<Self, TorusError>
    where
        I: IntoIterator<Item = (R, Complex64)>,
        R: AsRef<[i32]>,
    {
        let n = theta.n();
        let mut coeffs: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (r, c) in terms {
            let r = r.as_ref();
            if r.len() != n {
                return Err(TorusError::IndexLength { index: r.to_vec(), got: r.len(), expected: n });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(TorusError::NonFinite(r.to_vec()));
            }
            *coeffs.entry(SmallVec::from_slice(r)).or_default() += c;
        }
        let mut out = TorusElement { theta: Arc::clone(theta), coeffs };
        out.canonicalize();
        Ok(out)
    }

    pub fn from_records(theta: &Arc<ThetaMatrix>, records: &[TermRecord]) -> Result<Self, TorusError> {
        Self::from_terms(theta, records.iter().map(|t| (&t.r[..], Complex64::new(t.re, t.im))))
    }

    /// Terms in ascending multi-index order.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.coeffs
            .iter()
            .map(|(r, c)| TermRecord { r: r.to_vec(), re: c.re, im: c.im })
            .collect()
    }

    /// Random element with every coefficient in the box `|r|_∞ ≤ radius` drawn
    /// uniformly from `[-amplitude, amplitude]` in real and imaginary part.
    pub fn random<R: Rng + ?Sized>(theta: &Arc<ThetaMatrix>, radius: u32, amplitude: f64, rng: &mut R) -> Self {
        let n = theta.n();
        let mut coeffs = BTreeMap::new();
        for r in box_indices(n, radius as i32) {
            let c = Complex64::new(
                rng.random_range(-amplitude..=amplitude),
                rng.random_range(-amplitude..=amplitude),
            );
            if canonical(c) {
                coeffs.insert(r, c);
            }
        }
        TorusElement { theta: Arc::clone(theta), coeffs }
    }

    fn canonicalize(&mut self) {
        self.coeffs.retain(|_, c| canonical(*c));
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.n()
    }

    pub fn same_theta(&self, other: &TorusElement) -> bool {
        Arc::ptr_eq(&self.theta, &other.theta) || *self.theta == *other.theta
    }

    pub fn coeff(&self, r: &[i32]) -> Complex64 {
        self.coeffs.get(r).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], Complex64)> + '_ {
        self.coeffs.iter().map(|(r, c)| (&r[..], *c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|r|_∞` over the support, 0 for the zero element.
    pub fn support_radius(&self) -> u32 {
        self.coeffs
            .keys()
            .flat_map(|r| r.iter().map(|x| x.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Star product. Fails with `ThetaMismatch` unless both operands live in the same torus.
    pub fn checked_mul(&self, other: &TorusElement) -> Result<TorusElement, TorusError> {
        if !self.same_theta(other) {
            return Err(TorusError::ThetaMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(TorusElement::zero(&self.theta));
        }
        let n = self.n();
        let theta = &*self.theta;
        let (lo_a, hi_a) = bounds(&self.coeffs, n);
        let (lo_b, hi_b) = bounds(&other.coeffs, n);
        let lo: Vec<i32> = (0..n).map(|j| lo_a[j] + lo_b[j]).collect();
        let extent: Vec<usize> = (0..n).map(|j| (hi_a[j] + hi_b[j] - lo[j] + 1) as usize).collect();
        let cells = extent.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e));
        let budget = 4 * (self.coeffs.len() * other.coeffs.len()).max(64);
        let mut acc = match cells {
            Some(c) if c <= budget => Accumulator::Dense(vec![Complex64::default(); c]),
            _ => Accumulator::Sparse(BTreeMap::new()),
        };
        let mut stride = vec![1usize; n];
        for j in (0..n.saturating_sub(1)).rev() {
            stride[j] = stride[j + 1] * extent[j + 1];
        }
        // U^r U^s = e(Σ_j s_j w_j(r)) U^{r+s} with w_j(r) = Σ_{k>j} Θ_jk r_k; the phase
        // factorizes over j, so per-r tables of e(s_j w_j) replace one exponential per pair.
        let mut table: Vec<Vec<Complex64>> = (0..n).map(|j| vec![Complex64::default(); (hi_b[j] - lo_b[j] + 1) as usize]).collect();
        let mut sum: MultiIndex = SmallVec::from_elem(0, n);
        for (r, a) in &self.coeffs {
            let mut trivial = true;
            for j in 0..n {
                let w: f64 = (j + 1..n).map(|k| theta.get(j, k) * r[k] as f64).sum();
                trivial &= w == 0.0;
                for (slot, v) in table[j].iter_mut().zip(lo_b[j]..=hi_b[j]) {
                    *slot = turns_to_phase(w * v as f64);
                }
            }
            for (s, b) in &other.coeffs {
                let mut term = a * b;
                if !trivial {
                    for j in 0..n {
                        term *= table[j][(s[j] - lo_b[j]) as usize];
                    }
                }
                match &mut acc {
                    Accumulator::Dense(cells) => {
                        let offset: usize = (0..n).map(|j| (r[j] + s[j] - lo[j]) as usize * stride[j]).sum();
                        cells[offset] += term;
                    }
                    Accumulator::Sparse(map) => {
                        for j in 0..n {
                            sum[j] = r[j] + s[j];
                        }
                        *map.entry(sum.clone()).or_default() += term;
                    }
                }
            }
        }
        let coeffs = match acc {
            Accumulator::Sparse(mut map) => {
                map.retain(|_, c| canonical(*c));
                map
            }
            Accumulator::Dense(cells) => cells
                .into_iter()
                .enumerate()
                .filter(|(_, c)| canonical(*c))
                .map(|(offset, c)| {
                    let idx: MultiIndex = (0..n).map(|j| lo[j] + ((offset / stride[j]) % extent[j]) as i32).collect();
                    (idx, c)
                })
                .collect(),
        };
        Ok(TorusElement { theta: Arc::clone(&self.theta), coeffs })
    }

    /// Involution: `(a*)_{-r} = conj(a_r) · e(Σ_{j<k} Θ_jk r_j r_k)`, so that `(U^r)* U^r = 1`.
    pub fn adjoint(&self) -> TorusElement {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(r, c)| {
                let neg: MultiIndex = r.iter().map(|x| -x).collect();
                (neg, c.conj() * self.theta.adjoint_phase(r))
            })
            .collect();
        TorusElement { theta: Arc::clone(&self.theta), coeffs }
    }

    /// The tracial state `τ(a) = a_0`.
    pub fn trace(&self) -> Complex64 {
        self.coeffs
            .iter()
            .find(|(r, _)| r.iter().all(|&x| x == 0))
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }

    /// The derivation `δ_j`, multiplying the coefficient at `r` by `2πi r_j`; `j` is in `1..=n`.
    pub fn derivation(&self, j: usize) -> Result<TorusElement, TorusError> {
        if j == 0 || j > self.n() {
            return Err(TorusError::IndexOutOfRange { index: j, n: self.n() });
        }
        let j = j - 1;
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(r, _)| r[j] != 0)
            .map(|(r, c)| (r.clone(), c * Complex64::new(0.0, 2.0 * PI * r[j] as f64)))
            .collect();
        let mut out = TorusElement { theta: Arc::clone(&self.theta), coeffs };
        out.canonicalize();
        Ok(out)
    }

    /// `τ(a* b) = Σ_r conj(a_r) b_r`; monomials are orthonormal for the trace inner product.
    pub fn inner(&self, other: &TorusElement) -> Complex64 {
        let (small, large, flip) = if self.coeffs.len() <= other.coeffs.len() {
            (&self.coeffs, &other.coeffs, false)
        } else {
            (&other.coeffs, &self.coeffs, true)
        };
        let mut acc = Complex64::default();
        for (r, c) in small {
            if let Some(d) = large.get(r) {
                acc += if flip { d.conj() * c } else { c.conj() * d };
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Sum of coefficient moduli.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Largest coefficientwise deviation `max_r |a_r - b_r|`.
    pub fn max_abs_diff(&self, other: &TorusElement) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, c) in &self.coeffs {
            worst = worst.max((c - other.coeff(r)).norm());
        }
        for (r, c) in &other.coeffs {
            if !self.coeffs.contains_key(r) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    pub fn scale(&self, c: Complex64) -> TorusElement {
        let mut out = TorusElement {
            theta: Arc::clone(&self.theta),
            coeffs: self.coeffs.iter().map(|(r, a)| (r.clone(), a * c)).collect(),
        };
        out.canonicalize();
        out
    }

    /// Keeps only the coefficients whose index satisfies `keep`.
    pub fn filter_support(&self, mut keep: impl FnMut(&[i32]) -> bool) -> TorusElement {
        TorusElement {
            theta: Arc::clone(&self.theta),
            coeffs: self.coeffs.iter().filter(|(r, _)| keep(r)).map(|(r, c)| (r.clone(), *c)).collect(),
        }
    }

    fn combine(&self, other: &TorusElement, sign: f64) -> TorusElement {
        assert!(self.same_theta(other), "{}", TorusError::ThetaMismatch);
        let mut coeffs = self.coeffs.clone();
        for (r, c) in &other.coeffs {
            *coeffs.entry(r.clone()).or_default() += c * sign;
        }
        let mut out = TorusElement { theta: Arc::clone(&self.theta), coeffs };
        out.canonicalize();
        out
    }
}

enum Accumulator {
    Dense(Vec<Complex64>),
    Sparse(BTreeMap<MultiIndex, Complex64>),
}

/// Componentwise minimum and maximum over a nonempty support.
fn bounds(coeffs: &BTreeMap<MultiIndex, Complex64>, n: usize) -> (Vec<i32>, Vec<i32>) {
    let mut lo = vec![i32::MAX; n];
    let mut hi = vec![i32::MIN; n];
    for r in coeffs.keys() {
        for j in 0..n {
            lo[j] = lo[j].min(r[j]);
            hi[j] = hi[j].max(r[j]);
        }
    }
    (lo, hi)
}

/// All multi-indices of length `n` with `|r|_∞ ≤ radius`, in ascending order.
pub fn box_indices(n: usize, radius: i32) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * radius as usize + 1));
        for prefix in &out {
            for v in -radius..=radius {
                let mut r = prefix.clone();
                r.push(v);
                next.push(r);
            }
        }
        out = next;
    }
    out
}

/// Embeds `a ⊗ b` into the (n+m)-torus with deformation `diag(Θ, Φ)`.
pub fn tensor_embed(a: &TorusElement, b: &TorusElement) -> TorusElement {
    let psi = Arc::new(product_theta(a.theta(), b.theta()));
    tensor_embed_with(&psi, a, b)
}

/// Like [`tensor_embed`], reusing an already built product deformation.
pub fn tensor_embed_with(psi: &Arc<ThetaMatrix>, a: &TorusElement, b: &TorusElement) -> TorusElement {
    debug_assert_eq!(psi.n(), a.n() + b.n());
    let mut coeffs = BTreeMap::new();
    for (r, x) in &a.coeffs {
        for (s, y) in &b.coeffs {
            let mut rs: MultiIndex = r.clone();
            rs.extend_from_slice(s);
            coeffs.insert(rs, x * y);
        }
    }
    let mut out = TorusElement { theta: Arc::clone(psi), coeffs };
    out.canonicalize();
    out
}

impl PartialEq for TorusElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_theta(other) && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)U^{:?}", c.re, c.im, &r[..])?;
        }
        Ok(())
    }
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        self.combine(rhs, -1.0)
    }
}

impl AddAssign<&TorusElement> for TorusElement {
    fn add_assign(&mut self, rhs: &TorusElement) {
        assert!(self.same_theta(rhs), "{}", TorusError::ThetaMismatch);
        for (r, c) in &rhs.coeffs {
            *self.coeffs.entry(r.clone()).or_default() += c;
        }
        self.canonicalize();
    }
}

impl SubAssign<&TorusElement> for TorusElement {
    fn sub_assign(&mut self, rhs: &TorusElement) {
        assert!(self.same_theta(rhs), "{}", TorusError::ThetaMismatch);
        for (r, c) in &rhs.coeffs {
            *self.coeffs.entry(r.clone()).or_default() -= c;
        }
        self.canonicalize();
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        TorusElement {
            theta: Arc::clone(&self.theta),
            coeffs: self.coeffs.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }
}

/// Star product; panics on mismatched deformations (see [`TorusElement::checked_mul`]).
impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: &TorusElement) -> TorusElement {
        self.checked_mul(rhs).expect("star product of elements from different tori")
    }
}

impl Mul<Complex64> for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: Complex64) -> TorusElement {
        self.scale(rhs)
    }
}

impl Mul<f64> for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: f64) -> TorusElement {
        self.scale(Complex64::new(rhs, 0.0))
    }
}
