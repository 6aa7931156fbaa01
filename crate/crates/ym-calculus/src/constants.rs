use std::f64::consts::PI;

use crate::error::YmError;

/// `Γ(x)`, exact up to roundoff for positive integers and half-integers.
pub fn gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && twice.fract() == 0.0 && twice <= 340.0 {
        // Γ(x) = (x−1)(x−2)···Γ(1) or ···Γ(1/2).
        let (mut acc, base) = if x.fract() == 0.0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
        let mut y = base;
        while y < x {
            acc *= y;
            y += 1.0;
        }
        acc
    } else {
        statrs::function::gamma::gamma(x)
    }
}

/// Closed form `2N π^{n/2} / (n (2π)^n Γ(n/2))` with `N = 2^⌊n/2⌋`.
pub fn dixmier_torus_constant(n: u32) -> Result<f64, YmError> {
    if n == 0 {
        return Err(YmError::DomainError("torus dimension must be at least 1".into()));
    }
    let nf = n as f64;
    let spinor = 2f64.powi((n / 2) as i32);
    Ok(2.0 * spinor * PI.powf(nf / 2.0) / (nf * (2.0 * PI).powf(nf) * gamma(nf / 2.0)))
}

/// `c = Γ(k/2+1) Γ(l/2+1) / Γ((k+l)/2+1)`.
pub fn gamma_ratio(k: f64, l: f64) -> Result<f64, YmError> {
    if !(k > 0.0 && l > 0.0) {
        return Err(YmError::DomainError(format!("summability orders must be positive, got k = {k}, l = {l}")));
    }
    Ok(gamma(k / 2.0 + 1.0) * gamma(l / 2.0 + 1.0) / gamma((k + l) / 2.0 + 1.0))
}

/// `(α, β) = (n c trD2, m c trD1)`.
pub fn gamma_constants(k: f64, l: f64, m: u32, n: u32, tr_d1: f64, tr_d2: f64) -> Result<(f64, f64), YmError> {
    if m == 0 || n == 0 {
        return Err(YmError::DomainError("m and n must be at least 1".into()));
    }
    let c = gamma_ratio(k, l)?;
    Ok((n as f64 * c * tr_d2, m as f64 * c * tr_d1))
}
