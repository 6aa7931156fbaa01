use nctorus_core::TorusElement;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connection::{apply, random_section, Connection, Perturbation};
use crate::error::YmError;
use crate::matrix::TorusMatrix;

/// Curvature table `Θ_ij = [∇_i, ∇_j]` compressed to the module, for `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    n: usize,
    // Upper triangle, row by row.
    upper: Vec<TorusMatrix>,
}

impl Curvature {
    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        // Pairs (i, j) with i < j, 0-based, listed row by row.
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// `Θ_ij` for `i, j` in `1..=n`, `None` outside that range. `Θ_ji = −Θ_ij`, `Θ_ii = 0`.
    pub fn get(&self, i: usize, j: usize) -> Option<TorusMatrix> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return None;
        }
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Some(self.upper.first()?.scale_real(0.0)),
            std::cmp::Ordering::Less => Some(self.upper[self.slot(i - 1, j - 1)].clone()),
            std::cmp::Ordering::Greater => Some(self.upper[self.slot(j - 1, i - 1)].scale_real(-1.0)),
        }
    }

    /// Components `(i, j, Θ_ij)` with `i < j`, 1-based.
    pub fn components(&self) -> impl Iterator<Item = (usize, usize, &TorusMatrix)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j))).zip(&self.upper).map(|((i, j), m)| (i + 1, j + 1, m))
    }

    pub fn is_flat(&self, tol: f64) -> bool {
        self.upper.iter().all(|m| m.l1_norm() <= tol)
    }

    /// `Σ_{i<j} τ_q(Θ_ij* Θ_ij)`.
    pub fn energy(&self) -> f64 {
        self.upper.iter().map(TorusMatrix::norm_sq).sum()
    }
}

/// Curvature without re-validating the connection.
pub(crate) fn curvature_raw(c: &Connection) -> Curvature {
    let n = c.n();
    let a = c.potentials();
    let da: Vec<Vec<TorusMatrix>> = (1..=n)
        .map(|i| a.iter().map(|x| x.derivation(i).expect("direction in range")).collect())
        .collect();
    let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            // δ_i A_j − δ_j A_i + [A_i, A_j]
            let t = da[i][j]
                .checked_sub(&da[j][i])
                .and_then(|x| x.checked_add(&a[i].commutator(&a[j])?))
                .expect("shapes checked at construction");
            upper.push(c.proj().compress(&t));
        }
    }
    Curvature { n, upper }
}

fn revalidate(c: &Connection) -> Result<(), YmError> {
    Connection::new(c.theta().clone(), c.proj().clone(), c.potentials().to_vec()).map(|_| ())
}

/// Curvature `Θ_ij = δ_i A_j − δ_j A_i + [A_i, A_j]`, compressed by the projection.
pub fn curvature(c: &Connection) -> Result<Curvature, YmError> {
    revalidate(c)?;
    Ok(curvature_raw(c))
}

/// Yang-Mills value `Σ_{i<j} τ_q(Θ_ij* Θ_ij)`; zero when n = 1.
pub fn ym_value(c: &Connection) -> Result<f64, YmError> {
    revalidate(c)?;
    Ok(curvature_raw(c).energy())
}

pub(crate) fn ym_raw(c: &Connection) -> f64 {
    curvature_raw(c).energy()
}

/// Central difference `(YM(∇ + hμ) − YM(∇ − hμ)) / 2h`.
pub fn directional_derivative(c: &Connection, mu: &Perturbation, h: f64) -> Result<f64, YmError> {
    if !(h > 0.0) {
        return Err(YmError::DomainError(format!("step must be positive, got {h}")));
    }
    let plus = ym_raw(&c.perturbed(mu, h)?);
    let minus = ym_raw(&c.perturbed(mu, -h)?);
    Ok((plus - minus) / (2.0 * h))
}

/// Five-point derivative. YM along a line is a quartic polynomial, for which this stencil is exact.
pub(crate) fn exact_directional_derivative(c: &Connection, mu: &Perturbation, h: f64) -> Result<f64, YmError> {
    let f = |t: f64| -> Result<f64, YmError> { Ok(ym_raw(&c.perturbed(mu, t)?)) };
    Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h))
}

/// Gradient `G` with `d/dt YM(∇ + tμ)|₀ = 2 Re Σ_k τ_q(G_k* μ_k)` for μ supported on the module.
///
/// `G_k = p (Σ_i −δ_i Θ_ik + [A_i*, Θ_ik]) p`.
pub fn ym_gradient(c: &Connection) -> Result<Perturbation, YmError> {
    revalidate(c)?;
    gradient_raw(c)
}

pub(crate) fn gradient_raw(c: &Connection) -> Result<Perturbation, YmError> {
    if !c.proj().is_constant() {
        return Err(YmError::UnsupportedProjection);
    }
    let n = c.n();
    let curv = curvature_raw(c);
    let adj: Vec<TorusMatrix> = c.potentials().iter().map(TorusMatrix::adjoint).collect();
    let mut m = Vec::with_capacity(n);
    for k in 1..=n {
        let mut g = TorusMatrix::zeros(c.theta(), c.q());
        for i in (1..=n).filter(|&i| i != k) {
            let phi = curv.get(i, k).expect("indices in range");
            if phi.is_zero() {
                continue;
            }
            g = g.checked_sub(&phi.derivation(i)?)?;
            g = g.checked_add(&adj[i - 1].commutator(&phi)?)?;
        }
        m.push(c.proj().compress(&g));
    }
    Ok(Perturbation { m })
}

/// Largest number of Fourier modes per entry of a sampled perturbation.
pub const SAMPLE_TERMS: usize = 1024;

/// Support radius for sampled perturbations: that of the potentials (at least 1), shrunk
/// until the box `|r|_∞ ≤ radius` holds at most [`SAMPLE_TERMS`] modes.
pub fn sample_radius(c: &Connection) -> u32 {
    let mut radius = c.potentials().iter().map(TorusMatrix::support_radius).max().unwrap_or(0).max(1);
    while radius > 1 && (2 * radius as usize + 1).pow(c.n() as u32) > SAMPLE_TERMS {
        radius -= 1;
    }
    radius
}

/// Outcome of [`critical_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalReport {
    pub critical: bool,
    pub gradient_norm: f64,
    pub max_directional: f64,
}

/// Tests `‖G‖ ≤ tol` and `|d/dt YM(∇ + tμ)| ≤ tol` for `samples` random unit μ.
pub fn critical_report(c: &Connection, tol: f64, samples: usize, seed: u64) -> Result<CriticalReport, YmError> {
    if !(tol > 0.0) {
        return Err(YmError::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    let gradient_norm = ym_gradient(c)?.norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = sample_radius(c);
    let mut max_directional: f64 = 0.0;
    for _ in 0..samples {
        let mu = Perturbation::random_unit(c, radius, &mut rng);
        max_directional = max_directional.max(exact_directional_derivative(c, &mu, 1e-3)?.abs());
    }
    Ok(CriticalReport { critical: gradient_norm <= tol && max_directional <= tol, gradient_norm, max_directional })
}

pub fn is_critical(c: &Connection, tol: f64, samples: usize, seed: u64) -> bool {
    critical_report(c, tol, samples, seed).map(|r| r.critical).unwrap_or(false)
}

/// Outcome of [`check_compatibility`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub compatible: bool,
    /// Largest coefficient deviation relative to `1 + ‖terms‖₁`.
    pub worst: f64,
}

/// Samples pairs `ξ, η ∈ E` and checks `⟨ξ, ∇_j η⟩ + ⟨∇_j ξ, η⟩ = δ_j ⟨ξ, η⟩` in each direction.
///
/// The sign is that of the compatibility identity once `∇ξ = Σ_j ∇_j ξ ⊗ σ_j` is expanded
/// in the basis one-forms, which satisfy `σ_j* = −σ_j`.
pub fn check_compatibility(c: &Connection, samples: usize, seed: u64) -> CompatibilityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let hermitian = |x: &[TorusElement], y: &[TorusElement]| {
        let mut acc = TorusElement::zero(c.theta());
        for (u, v) in x.iter().zip(y) {
            acc += &(&u.adjoint() * v);
        }
        acc
    };
    for _ in 0..samples {
        let xi = random_section(c, 1, &mut rng);
        let eta = random_section(c, 1, &mut rng);
        let base = hermitian(&xi, &eta);
        for j in 1..=c.n() {
            let nabla = |v: &[TorusElement]| -> Vec<TorusElement> {
                let av = apply(c.potential(j), v);
                let dv: Vec<TorusElement> = v.iter().map(|x| x.derivation(j).expect("direction in range")).collect();
                let sum: Vec<TorusElement> = dv.iter().zip(&av).map(|(x, y)| x + y).collect();
                apply(c.proj().matrix(), &sum)
            };
            let lhs = &hermitian(&xi, &nabla(&eta)) + &hermitian(&nabla(&xi), &eta);
            let rhs = base.derivation(j).expect("direction in range");
            let dev = lhs.max_abs_diff(&rhs) / (1.0 + lhs.l1_norm() + rhs.l1_norm());
            worst = worst.max(dev);
        }
    }
    CompatibilityReport { compatible: worst <= 1e-10, worst }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use nctorus_core::{Complex64, ThetaMatrix};

    use super::*;

    fn example(theta: f64, s: f64) -> Connection {
        let th = Arc::new(ThetaMatrix::two_torus(theta));
        let u1 = TorusElement::generator(&th, 1);
        let a2 = &(&u1 - &u1.adjoint()) * s;
        Connection::free(Arc::clone(&th), vec![TorusMatrix::zeros(&th, 1), TorusMatrix::scalar_diag(&a2, 1)]).unwrap()
    }

    #[test]
    fn example_curvature_and_value() {
        let c = example(0.3, 1.0);
        let th = c.theta().clone();
        let u1 = TorusElement::generator(&th, 1);
        let expected = (&u1 + &u1.adjoint()).scale(Complex64::new(0.0, 2.0 * PI));
        let curv = curvature(&c).unwrap();
        assert!(curv.get(1, 2).unwrap().get(0, 0).max_abs_diff(&expected) < 1e-12);
        assert!((ym_value(&c).unwrap() - 8.0 * PI * PI).abs() < 1e-9 * 8.0 * PI * PI);
    }

    #[test]
    fn antisymmetric_lookup() {
        let c = example(0.1, 0.5);
        let curv = curvature(&c).unwrap();
        assert!(curv.get(1, 1).unwrap().is_zero());
        assert!(curv.get(3, 1).is_none());
        let sum = curv.get(1, 2).unwrap().checked_add(&curv.get(2, 1).unwrap()).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn one_torus_has_no_curvature() {
        let th = Arc::new(ThetaMatrix::zero(1));
        let c = Connection::flat(&th, crate::connection::Projection::free(&th, 2)).unwrap();
        assert_eq!(curvature(&c).unwrap().components().count(), 0);
        assert_eq!(ym_value(&c).unwrap(), 0.0);
    }

    #[test]
    fn example_gradient_closed_form() {
        let s = 0.7;
        let c = example(0.42, s);
        let g = ym_gradient(&c).unwrap();
        let th = c.theta().clone();
        let u1 = TorusElement::generator(&th, 1);
        let expected = &(&u1 - &u1.adjoint()) * (4.0 * PI * PI * s);
        assert!(g.m[0].is_zero());
        assert!(g.m[1].get(0, 0).max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn central_difference_is_nonpositive_step_guarded() {
        let c = example(0.3, 1.0);
        let mu = Perturbation::zeros(c.theta(), 1);
        assert!(matches!(directional_derivative(&c, &mu, 0.0), Err(YmError::DomainError(_))));
        assert_eq!(directional_derivative(&c, &mu, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn sample_radius_is_capped_by_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let th2 = Arc::new(ThetaMatrix::two_torus(0.2));
        assert_eq!(sample_radius(&Connection::random_free(&th2, 1, 4, 0.1, &mut rng)), 4);
        assert_eq!(sample_radius(&Connection::flat(&th2, crate::connection::Projection::free(&th2, 1)).unwrap()), 1);
        let th4 = Arc::new(ThetaMatrix::zero(4));
        assert_eq!(sample_radius(&Connection::random_free(&th4, 1, 4, 0.1, &mut rng)), 2);
    }
}
