use std::sync::Arc;

use nctorus_core::{Complex64, TermRecord, ThetaMatrix, TorusElement};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::YmError;
use crate::matrix::TorusMatrix;

/// Default tolerance for idempotency and connection invariants.
pub const TOL_IDEM: f64 = 1e-12;

/// Orthogonal projection `p ∈ M_q(A_Θ)` cutting out the module `E = p A^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    p: TorusMatrix,
    free: bool,
    constant: bool,
    defect: f64,
}

impl Projection {
    /// The identity, i.e. the free module `A^q`.
    pub fn free(theta: &Arc<ThetaMatrix>, q: usize) -> Self {
        Projection { p: TorusMatrix::identity(theta, q), free: true, constant: true, defect: 0.0 }
    }

    /// Validates `‖p² − p‖₁ ≤ tol` and `‖p* − p‖₁ ≤ tol`.
    pub fn new(p: TorusMatrix, tol: f64) -> Result<Self, YmError> {
        let sq = p.checked_mul(&p)?.checked_sub(&p)?.l1_norm();
        let sa = p.adjoint().checked_sub(&p)?.l1_norm();
        let defect = sq.max(sa);
        if !(defect <= tol) {
            return Err(YmError::InvalidProjection(format!(
                "idempotency/self-adjointness defect {defect:.3e} exceeds {tol:.1e}"
            )));
        }
        let constant = p.is_constant();
        if !constant {
            log::warn!("non-constant projection accepted with defect {defect:.3e}; gradient-based operations are unavailable");
        }
        let free = p.max_abs_diff(&TorusMatrix::identity(p.theta(), p.q())) == 0.0;
        Ok(Projection { p, free, constant, defect })
    }

    pub fn matrix(&self) -> &TorusMatrix {
        &self.p
    }

    pub fn is_free(&self) -> bool {
        self.free
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    /// `max(‖p² − p‖₁, ‖p* − p‖₁)` measured at construction.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// `τ_q(p)`, the rank of the module in the trace normalization.
    pub fn rank(&self) -> f64 {
        self.p.trace().re
    }

    /// `p X p`; the identity map for free modules.
    pub fn compress(&self, x: &TorusMatrix) -> TorusMatrix {
        if self.free {
            return x.clone();
        }
        let px = self.p.checked_mul(x).expect("projection and operand share shape");
        px.checked_mul(&self.p).expect("projection and operand share shape")
    }
}

/// Components `μ_j` of an element of `Hom_A(E, E ⊗ Ω¹)`, one matrix per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub m: Vec<TorusMatrix>,
}

impl Perturbation {
    pub fn zeros(theta: &Arc<ThetaMatrix>, q: usize) -> Self {
        Perturbation { m: vec![TorusMatrix::zeros(theta, q); theta.n()] }
    }

    /// `τ`-inner product `Σ_j τ_q(X_j* Y_j)`.
    pub fn inner(&self, other: &Perturbation) -> Complex64 {
        self.m.iter().zip(&other.m).map(|(x, y)| x.inner(y)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.m.iter().map(TorusMatrix::norm_sq).sum::<f64>().sqrt()
    }

    pub fn scale_real(&self, t: f64) -> Perturbation {
        Perturbation { m: self.m.iter().map(|x| x.scale_real(t)).collect() }
    }

    /// Random skew-adjoint perturbation compressed to the module, normalized to unit norm
    /// (zero stays zero).
    pub fn random_unit<R: Rng + ?Sized>(c: &Connection, radius: u32, rng: &mut R) -> Perturbation {
        let m: Vec<TorusMatrix> = (0..c.n())
            .map(|_| c.proj.compress(&TorusMatrix::random_skew(&c.theta, c.q, radius, 1.0, rng)))
            .collect();
        let p = Perturbation { m };
        let norm = p.norm();
        if norm > 0.0 {
            p.scale_real(1.0 / norm)
        } else {
            p
        }
    }
}

/// Connection `∇_j = δ_j + A_j` on `E = p A^q` over an n-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    theta: Arc<ThetaMatrix>,
    q: usize,
    proj: Projection,
    a: Vec<TorusMatrix>,
}

/// Measured defects of the connection invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantDefects {
    /// `max_j ‖p(A_j + A_j*)p‖₁`.
    pub skew: f64,
    /// `max_j ‖(1 − p)(δ_j p + A_j p)‖₁`.
    pub preservation: f64,
    /// Scale `1 + max_j ‖A_j‖₁` used for relative comparison.
    pub scale: f64,
}

impl Connection {
    /// Validates shapes, skew-adjointness on the module and module preservation.
    pub fn new(theta: Arc<ThetaMatrix>, proj: Projection, a: Vec<TorusMatrix>) -> Result<Self, YmError> {
        let c = Self::unchecked(theta, proj, a)?;
        let d = c.invariant_defects();
        if !(d.skew <= TOL_IDEM * d.scale) {
            return Err(YmError::InvalidConnection(format!(
                "potentials are not skew-adjoint on the module (defect {:.3e})",
                d.skew
            )));
        }
        if !(d.preservation <= TOL_IDEM * d.scale) {
            return Err(YmError::InvalidConnection(format!(
                "connection does not preserve the module (defect {:.3e})",
                d.preservation
            )));
        }
        Ok(c)
    }

    /// Shape checks only; used for perturbed or deliberately invalid connections.
    pub fn unchecked(theta: Arc<ThetaMatrix>, proj: Projection, a: Vec<TorusMatrix>) -> Result<Self, YmError> {
        let q = proj.matrix().q();
        if a.len() != theta.n() {
            return Err(YmError::ShapeMismatch(format!("expected {} potentials, got {}", theta.n(), a.len())));
        }
        let probe = TorusMatrix::zeros(&theta, q);
        if !proj.matrix().same_shape(&probe) || a.iter().any(|x| !x.same_shape(&probe)) {
            return Err(YmError::ShapeMismatch("potentials and projection must be q×q over the same torus".into()));
        }
        Ok(Connection { theta, q, proj, a })
    }

    /// Free module of rank `q` with the given potentials.
    pub fn free(theta: Arc<ThetaMatrix>, a: Vec<TorusMatrix>) -> Result<Self, YmError> {
        let q = a.first().map(TorusMatrix::q).unwrap_or(1);
        let proj = Projection::free(&theta, q);
        Self::new(theta, proj, a)
    }

    /// Trivial connection `∇_j = p δ_j` on `E`; with a constant `p` this is the Grassmannian connection.
    pub fn flat(theta: &Arc<ThetaMatrix>, proj: Projection) -> Result<Self, YmError> {
        let q = proj.matrix().q();
        Self::new(Arc::clone(theta), proj, vec![TorusMatrix::zeros(theta, q); theta.n()])
    }

    /// Random skew polynomial potentials on the free module.
    pub fn random_free<R: Rng + ?Sized>(
        theta: &Arc<ThetaMatrix>,
        q: usize,
        radius: u32,
        amplitude: f64,
        rng: &mut R,
    ) -> Self {
        let a = (0..theta.n()).map(|_| TorusMatrix::random_skew(theta, q, radius, amplitude, rng)).collect();
        Self::free(Arc::clone(theta), a).expect("skew potentials form a valid connection")
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.n()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn proj(&self) -> &Projection {
        &self.proj
    }

    pub fn potentials(&self) -> &[TorusMatrix] {
        &self.a
    }

    /// Potential `A_j`, with `j` in `1..=n`.
    pub fn potential(&self, j: usize) -> &TorusMatrix {
        &self.a[j - 1]
    }

    pub fn invariant_defects(&self) -> InvariantDefects {
        let p = self.proj.matrix();
        let one = TorusMatrix::identity(&self.theta, self.q);
        let mut skew: f64 = 0.0;
        let mut preservation: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (j, a) in self.a.iter().enumerate() {
            scale = scale.max(a.l1_norm());
            let sym = a.checked_add(&a.adjoint()).expect("shapes checked");
            skew = skew.max(self.proj.compress(&sym).l1_norm());
            if !self.proj.is_free() {
                let dp = p.derivation(j + 1).expect("direction in range");
                let ap = a.checked_mul(p).expect("shapes checked");
                let comp = one.checked_sub(p).expect("shapes checked");
                let v = comp.checked_mul(&dp.checked_add(&ap).expect("shapes checked")).expect("shapes checked");
                preservation = preservation.max(v.l1_norm());
            }
        }
        InvariantDefects { skew, preservation, scale: 1.0 + scale }
    }

    /// `A + t μ` without validation.
    pub fn perturbed(&self, mu: &Perturbation, t: f64) -> Result<Connection, YmError> {
        if mu.m.len() != self.a.len() {
            return Err(YmError::ShapeMismatch(format!(
                "perturbation has {} components, connection has {}",
                mu.m.len(),
                self.a.len()
            )));
        }
        let a = self
            .a
            .iter()
            .zip(&mu.m)
            .map(|(x, m)| x.checked_add(&m.scale_real(t)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Connection { theta: Arc::clone(&self.theta), q: self.q, proj: self.proj.clone(), a })
    }

    pub(crate) fn with_potentials(&self, a: Vec<TorusMatrix>) -> Connection {
        Connection { theta: Arc::clone(&self.theta), q: self.q, proj: self.proj.clone(), a }
    }

    pub fn to_spec(&self) -> ConnectionSpec {
        ConnectionSpec {
            theta: (*self.theta).clone(),
            q: self.q,
            proj: if self.proj.is_free() { None } else { Some(self.proj.matrix().to_records()) },
            a: self.a.iter().map(TorusMatrix::to_records).collect(),
        }
    }

    pub fn from_spec(spec: &ConnectionSpec) -> Result<Self, YmError> {
        let theta = Arc::new(spec.theta.clone());
        if spec.q == 0 {
            return Err(YmError::ShapeMismatch("q must be positive".into()));
        }
        let proj = match &spec.proj {
            None => Projection::free(&theta, spec.q),
            Some(p) => Projection::new(TorusMatrix::from_records(&theta, spec.q, p)?, TOL_IDEM)?,
        };
        let a = spec
            .a
            .iter()
            .map(|m| TorusMatrix::from_records(&theta, spec.q, m))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(theta, proj, a)
    }
}

/// JSON form `{"theta", "q", "proj"?, "A"}`; each matrix is a row-major list of element payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSpec {
    pub theta: ThetaMatrix,
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proj: Option<Vec<Vec<TermRecord>>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<TermRecord>>>,
}

impl Serialize for Connection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Connection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = ConnectionSpec::deserialize(d)?;
        Connection::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

/// Module element `ξ ∈ E`, a column of q torus elements.
pub(crate) fn random_section<R: Rng + ?Sized>(c: &Connection, radius: u32, rng: &mut R) -> Vec<TorusElement> {
    let col: Vec<TorusElement> =
        (0..c.q).map(|_| TorusElement::random(&c.theta, radius, 1.0, rng)).collect();
    apply(c.proj.matrix(), &col)
}

/// Matrix acting on a column.
pub(crate) fn apply(m: &TorusMatrix, v: &[TorusElement]) -> Vec<TorusElement> {
    let q = m.q();
    (0..q)
        .map(|a| {
            let mut acc = TorusElement::zero(m.theta());
            for (b, x) in v.iter().enumerate() {
                let e = m.get(a, b);
                if !e.is_zero() && !x.is_zero() {
                    acc += &(e * x);
                }
            }
            acc
        })
        .collect()
}
