use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::connection::{Connection, Perturbation};
use crate::curvature::{gradient_raw, ym_raw};
use crate::error::YmError;
use crate::matrix::TorusMatrix;

/// Extra Fourier shells searched beyond the start when no box is given.
///
/// Flat connections gauge-equivalent to a polynomial start are not polynomials, and on the
/// start's own modes the descent creeps along a quartic valley instead of converging.
pub const SUPPORT_MARGIN: u32 = 3;

/// How the first trial step of each line search is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Always start from `initial_step`.
    Fixed,
    /// Start from the Barzilai-Borwein step `⟨s,s⟩/⟨s,y⟩` of the previous iterate and gradient
    /// differences, falling back to `initial_step` on the first iteration.
    BarzilaiBorwein,
}

/// Line-search settings for [`minimize_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DescentOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub initial_step: f64,
    pub step_rule: StepRule,
    /// Iterates live on the box `|r|_∞ ≤ support_radius`; `None` uses the support radius of the
    /// start plus [`SUPPORT_MARGIN`].
    pub support_radius: Option<u32>,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iters: 10_000,
            grad_tol: 1e-9,
            armijo: 1e-4,
            shrink: 0.5,
            initial_step: 1.0,
            step_rule: StepRule::BarzilaiBorwein,
            support_radius: None,
        }
    }
}

/// Result of a descent run.
#[derive(Debug, Clone)]
pub struct DescentResult {
    pub connection: Connection,
    /// YM at the start and after every accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// Gradient descent with the default options except for the iteration cap and gradient tolerance.
pub fn minimize(c0: &Connection, max_iters: usize, grad_tol: f64) -> Result<DescentResult, YmError> {
    minimize_with(c0, &DescentOptions { max_iters, grad_tol, ..DescentOptions::default() })
}

/// Backtracking gradient descent on the potentials.
///
/// Iterates stay on a box of Fourier modes, so the search space is finite-dimensional. After
/// each step the potentials are made skew-adjoint on the module again.
pub fn minimize_with(c0: &Connection, opts: &DescentOptions) -> Result<DescentResult, YmError> {
    if !c0.proj().is_constant() {
        return Err(YmError::UnsupportedProjection);
    }
    let radius = opts.support_radius.unwrap_or_else(|| start_radius(c0) + SUPPORT_MARGIN);
    let support: BTreeSet<Vec<i32>> =
        nctorus_core::box_indices(c0.n(), radius as i32).into_iter().map(|r| r.to_vec()).collect();
    let restrict = |g: Perturbation| Perturbation {
        m: g.m.iter().map(|x| x.map(|e| e.filter_support(|r| support.contains(r)))).collect(),
    };
    let mut current = c0.clone();
    let mut value = ym_raw(&current);
    if !value.is_finite() {
        return Err(YmError::NonFiniteValue { iteration: 0 });
    }
    let mut trace = vec![value];
    let mut grad = restrict(gradient_raw(&current)?);
    let mut gnorm = grad.norm();
    let mut iterations = 0;
    let mut bb_step: Option<f64> = None;
    while gnorm > opts.grad_tol && iterations < opts.max_iters {
        iterations += 1;
        // Slope of YM along −G is −2‖G‖².
        let slope = 2.0 * gnorm * gnorm;
        let mut t = match (opts.step_rule, bb_step) {
            (StepRule::BarzilaiBorwein, Some(step)) => step,
            _ => opts.initial_step,
        };
        let accepted = loop {
            let trial = project_skew(&current.perturbed(&grad, -t)?);
            let v = ym_raw(&trial);
            if !v.is_finite() {
                return Err(YmError::NonFiniteValue { iteration: iterations });
            }
            if v <= value - opts.armijo * t * slope {
                break Some((trial, v));
            }
            t *= opts.shrink;
            if t < 1e-18 {
                break None;
            }
        };
        let Some((next, v)) = accepted else {
            log::debug!("line search stalled at iteration {iterations}, YM = {value:.3e}");
            break;
        };
        let next_grad = restrict(gradient_raw(&next)?);
        // s = −t·G_old and y = 2(G_new − G_old); the step along −G is twice ⟨s,s⟩/⟨s,y⟩.
        let sy = -t * (next_grad.inner(&grad).re - gnorm * gnorm);
        bb_step = (sy > 0.0).then(|| t * t * gnorm * gnorm / sy).filter(|s| s.is_finite());
        current = next;
        value = v;
        trace.push(value);
        grad = next_grad;
        gnorm = grad.norm();
        if iterations % 500 == 0 {
            log::debug!("iteration {iterations}: YM = {value:.3e}, |G| = {gnorm:.3e}");
        }
    }
    Ok(DescentResult { connection: current, trace, iterations, gradient_norm: gnorm, converged: gnorm <= opts.grad_tol })
}

fn start_radius(c: &Connection) -> u32 {
    c.potentials().iter().map(TorusMatrix::support_radius).max().unwrap_or(0)
}

/// `A_j ← A_j − p ((A_j + A_j*)/2) p`.
fn project_skew(c: &Connection) -> Connection {
    let a: Vec<TorusMatrix> = c
        .potentials()
        .iter()
        .map(|x| x.checked_sub(&c.proj().compress(&x.hermitian_part())).expect("shapes agree"))
        .collect();
    c.with_potentials(a)
}
