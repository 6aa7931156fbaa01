use std::sync::Arc;

use nctorus_core::{product_theta, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{Connection, Perturbation, Projection, TOL_IDEM};
use crate::curvature::{critical_report, curvature_raw, sample_radius, ym_value, Curvature};
use crate::error::YmError;
use crate::matrix::{kron_with, TorusMatrix};

/// Connection `∇₁ ⊗ 1 + 1 ⊗ ∇₂` on `E₁ ⊗ E₂` over the (n+m)-torus `diag(Θ, Φ)`.
///
/// Components `j ≤ n` carry `A_j ⊗ 1_{q₂}`, the rest `1_{q₁} ⊗ B_{j−n}`.
pub fn product_connection(c1: &Connection, c2: &Connection) -> Result<Connection, YmError> {
    let c1 = Connection::new(c1.theta().clone(), c1.proj().clone(), c1.potentials().to_vec())?;
    let c2 = Connection::new(c2.theta().clone(), c2.proj().clone(), c2.potentials().to_vec())?;
    let psi = Arc::new(product_theta(c1.theta(), c2.theta()));
    let one1 = TorusMatrix::identity(c1.theta(), c1.q());
    let one2 = TorusMatrix::identity(c2.theta(), c2.q());
    let mut a: Vec<TorusMatrix> = c1.potentials().iter().map(|x| kron_with(&psi, x, &one2)).collect();
    a.extend(c2.potentials().iter().map(|y| kron_with(&psi, &one1, y)));
    let p = kron_with(&psi, c1.proj().matrix(), c2.proj().matrix());
    let proj = if c1.proj().is_free() && c2.proj().is_free() {
        Projection::free(&psi, c1.q() * c2.q())
    } else {
        Projection::new(p, TOL_IDEM.max(c1.proj().defect() + c2.proj().defect()) * 4.0)?
    };
    Connection::new(psi, proj, a)
}

/// Largest coefficient of a mixed component `Θ_ij` with `i ≤ n < j`.
pub fn mixed_curvature_max(curv: &Curvature, n: usize) -> f64 {
    curv.components()
        .filter(|&(i, j, _)| i <= n && j > n)
        .flat_map(|(_, _, m)| m.entries().iter().flat_map(|e| e.terms().map(|(_, c)| c.norm())).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// Quantities of the subadditivity and additivity statements for a product connection,
/// in the trace normalization `τ_q = τ ⊗ Tr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub ym_product: f64,
    pub ym1: f64,
    pub ym2: f64,
    /// `τ_{q₂}(p₂)`; equals `q₂` for a free second factor.
    pub alpha_tau: f64,
    /// `τ_{q₁}(p₁)`; equals `q₁` for a free first factor.
    pub beta_tau: f64,
    pub defect: f64,
    pub xi_re: f64,
    pub xi_im: f64,
    pub eta_re: f64,
    pub eta_im: f64,
    /// `2 Re(conj(ξ) η)`.
    pub cross_term: f64,
    pub mixed_curvature_max: f64,
    /// `√(α YM₁) + √(β YM₂) − √YM`.
    pub subadditivity_slack: f64,
}

impl AdditivityReport {
    pub fn xi(&self) -> Complex64 {
        Complex64::new(self.xi_re, self.xi_im)
    }

    pub fn eta(&self) -> Complex64 {
        Complex64::new(self.eta_re, self.eta_im)
    }
}

/// `Σ_{i<j} τ_q(Θ_ij)`.
fn trace_coordinates(curv: &Curvature) -> Complex64 {
    curv.components().map(|(_, _, m)| m.trace()).sum()
}

pub fn additivity_report(c1: &Connection, c2: &Connection) -> Result<AdditivityReport, YmError> {
    let prod = product_connection(c1, c2)?;
    let curv = curvature_raw(&prod);
    let ym_product = curv.energy();
    let ym1 = ym_value(c1)?;
    let ym2 = ym_value(c2)?;
    let alpha_tau = c2.proj().rank();
    let beta_tau = c1.proj().rank();
    let xi = trace_coordinates(&curvature_raw(c1));
    let eta = trace_coordinates(&curvature_raw(c2));
    let slack = (alpha_tau * ym1).sqrt() + (beta_tau * ym2).sqrt() - ym_product.sqrt();
    Ok(AdditivityReport {
        ym_product,
        ym1,
        ym2,
        alpha_tau,
        beta_tau,
        defect: ym_product - alpha_tau * ym1 - beta_tau * ym2,
        xi_re: xi.re,
        xi_im: xi.im,
        eta_re: eta.re,
        eta_im: eta.im,
        cross_term: 2.0 * (xi.conj() * eta).re,
        mixed_curvature_max: mixed_curvature_max(&curv, c1.n()),
        subadditivity_slack: slack,
    })
}

/// `√YM(∇) ≤ √(α YM(∇₁)) + √(β YM(∇₂))` with slack `−1e-9`.
pub fn subadditivity_check(c1: &Connection, c2: &Connection) -> Result<bool, YmError> {
    Ok(additivity_report(c1, c2)?.subadditivity_slack >= -1e-9)
}

/// Outcome of [`critical_splitting_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    /// Both factors are critical.
    pub necessary: bool,
    pub product_critical: bool,
    pub factor1_critical: bool,
    pub factor2_critical: bool,
    pub product_gradient_norm: f64,
    /// Largest `|⟨⟨[∇₁⊗1, μ], Θ₁⊗1⟩⟩ + ⟨⟨[1⊗∇₂, μ], 1⊗Θ₂⟩⟩|` over the sampled μ.
    pub bilinear_max: f64,
}

/// Sum over same-factor pairs `i < j` of `Re τ_q(Θ_ij* (D_i μ_j − D_j μ_i))`, `D_i = δ_i + [A_i, ·]`.
fn bilinear_form(prod: &Connection, curv: &Curvature, n: usize, mu: &Perturbation) -> Result<f64, YmError> {
    let cov = |i: usize, x: &TorusMatrix| -> Result<TorusMatrix, YmError> {
        x.derivation(i)?.checked_add(&prod.potential(i).commutator(x)?)
    };
    let mut total = 0.0;
    for (i, j, theta_ij) in curv.components() {
        if (i <= n) != (j <= n) {
            continue;
        }
        let var = cov(i, &mu.m[j - 1])?.checked_sub(&cov(j, &mu.m[i - 1])?)?;
        total += theta_ij.inner(&prod.proj().compress(&var)).re;
    }
    Ok(total)
}

/// Decides criticality of the product connection and of its factors.
///
/// When both factors are critical, the product verdict also requires the bilinear
/// condition to vanish on `samples` random perturbations of the product module.
pub fn critical_splitting_check(
    c1: &Connection,
    c2: &Connection,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SplittingReport, YmError> {
    let f1 = critical_report(c1, tol, samples, seed)?.critical;
    let f2 = critical_report(c2, tol, samples, seed.wrapping_add(1))?.critical;
    let prod = product_connection(c1, c2)?;
    let pr = critical_report(&prod, tol, samples, seed.wrapping_add(2))?;
    let curv = curvature_raw(&prod);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let radius = sample_radius(&prod);
    let mut bilinear_max: f64 = 0.0;
    for _ in 0..samples {
        let mu = Perturbation::random_unit(&prod, radius, &mut rng);
        bilinear_max = bilinear_max.max(bilinear_form(&prod, &curv, c1.n(), &mu)?.abs());
    }
    let necessary = f1 && f2;
    let product_critical = pr.critical && (!necessary || bilinear_max <= tol);
    Ok(SplittingReport {
        necessary,
        product_critical,
        factor1_critical: f1,
        factor2_critical: f2,
        product_gradient_norm: pr.gradient_norm,
        bilinear_max,
    })
}
