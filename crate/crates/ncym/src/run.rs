use std::collections::BTreeMap;
use std::time::Instant;

use finite_triple_lab::{
    classify_matrix_case, decomposition_check, double_odd, form_report_weighted, hypothesis_check, orthogonality_check,
    product_triple, unitary_equivalence_defect, FiniteTriple, MatrixCase, EQUALITY_TOL, PROPORTIONALITY_TOL, RANK_TOL,
    STRUCTURE_TOL,
};
use nctorus_core::{CANONICAL_EPS, COCYCLE_CONVENTION};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use ym_calculus::{
    additivity_report, check_compatibility, critical_report, critical_splitting_check, curvature, dixmier_torus_constant,
    gamma_constants, gamma_ratio, minimize_with, ym_gradient, ym_value, Connection, SAMPLE_TERMS, SUPPORT_MARGIN,
    TOL_IDEM,
};

use crate::config::*;
use crate::error::NcymError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Absolute tolerance on `|defect − cross_term|`.
pub const DEFECT_TOL: f64 = 1e-9;
/// Slack allowed below zero in the subadditivity inequality.
pub const SUBADDITIVITY_TOL: f64 = 1e-9;
/// Coefficientwise bound on mixed curvature components of a product connection.
pub const MIXED_CURVATURE_TOL: f64 = 1e-12;
/// Bound on `‖U D U* − D′‖` for the two orderings of a product triple.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub cocycle: String,
    pub trace: String,
    pub indexing: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            cocycle: COCYCLE_CONVENTION.to_string(),
            trace: "tau_q = tau (x) Tr; YM = sum_{i<j} tau_q(F_ij^* F_ij)".to_string(),
            indexing: "derivations and generators 1-based; theta rows and matrix entries 0-based".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub kind: Kind,
    pub config: Value,
    pub conventions: Conventions,
    pub tolerances: BTreeMap<String, f64>,
    pub results: Value,
    pub verdicts: BTreeMap<String, bool>,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    /// Everything except the wall-clock time; equal across reruns of the same config.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().expect("object").remove("wall_clock_seconds");
        v
    }
}

struct Outcome {
    results: Value,
    verdicts: BTreeMap<String, bool>,
    tolerances: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(results: Value) -> Self {
        Outcome { results, verdicts: BTreeMap::new(), tolerances: BTreeMap::new() }
    }

    fn verdict(&mut self, name: &str, ok: bool) {
        self.verdicts.insert(name.to_string(), ok);
    }

    fn tol(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }
}

fn library_tolerances() -> BTreeMap<String, f64> {
    [
        ("canonical_eps", CANONICAL_EPS),
        ("projection_idempotence", TOL_IDEM),
        ("rank", RANK_TOL),
        ("subspace_equality", EQUALITY_TOL),
        ("triple_structure", STRUCTURE_TOL),
        ("proportionality", PROPORTIONALITY_TOL),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Runs one experiment. The config is revalidated first, so hand-built configs get the same
/// diagnostics as files.
pub fn run(config: &ExperimentConfig) -> Result<Report, NcymError> {
    let start = Instant::now();
    let text = serde_json::to_string(config).expect("configs serialize");
    let diagnostics = crate::validate(&text);
    if !diagnostics.is_empty() {
        return Err(NcymError::ConfigInvalid(diagnostics));
    }
    log::info!("running {}", config.kind.as_str());
    let outcome = match config.kind {
        Kind::TorusYm => torus_ym(&config.decode()?)?,
        Kind::TorusMinimize => torus_minimize(&config.decode()?)?,
        Kind::TorusProduct => torus_product(&config.decode()?)?,
        Kind::FiniteForms => finite_forms(config, &config.decode()?)?,
        Kind::FiniteProduct => finite_product(config, &config.decode()?)?,
        Kind::Constants => constants(&config.decode()?)?,
    };
    let mut tolerances = library_tolerances();
    tolerances.extend(outcome.tolerances);
    let report = Report {
        version: VERSION.to_string(),
        kind: config.kind,
        config: serde_json::to_value(config).expect("configs serialize"),
        conventions: Conventions::default(),
        tolerances,
        results: outcome.results,
        verdicts: outcome.verdicts,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    log::info!("finished in {:.3}s, passed = {}", report.wall_clock_seconds, report.passed());
    Ok(report)
}

fn connection_summary(c: &Connection) -> Result<Value, NcymError> {
    let curv = curvature(c)?;
    let components: Vec<Value> = curv
        .components()
        .map(|(i, j, f)| json!({ "i": i, "j": j, "tau_norm_sq": f.norm_sq() }))
        .collect();
    Ok(json!({
        "n": c.n(),
        "q": c.q(),
        "rank": c.proj().rank(),
        "support_radius": c.potentials().iter().map(|p| p.support_radius()).max().unwrap_or(0),
        "ym": ym_value(c)?,
        "gradient_norm": ym_gradient(c)?.norm(),
        "curvature": components,
        "flat": curv.is_flat(0.0),
    }))
}

fn torus_ym(p: &TorusYmPayload) -> Result<Outcome, NcymError> {
    let c = p.module.build()?;
    let mut out = Outcome::new(json!({ "connection": connection_summary(&c)? }));
    if let Some(checks) = p.checks {
        let compat = check_compatibility(&c, checks.samples, checks.seed);
        let crit = critical_report(&c, checks.tol, checks.samples, checks.seed)?;
        out.results["compatibility"] = serde_json::to_value(compat).expect("serializable");
        out.results["critical"] = serde_json::to_value(crit).expect("serializable");
        out.verdict("compatible", compat.compatible);
        out.tol("critical", checks.tol);
        out.tol("sample_terms", SAMPLE_TERMS as f64);
    }
    Ok(out)
}

fn torus_minimize(p: &TorusMinimizePayload) -> Result<Outcome, NcymError> {
    let c = p.module.build()?;
    let opts = p.optimizer.options();
    let r = minimize_with(&c, &opts)?;
    let ym_final = *r.trace.last().expect("trace starts with the initial value");
    let monotone = r.trace.windows(2).all(|w| w[1] <= w[0]);
    let mut out = Outcome::new(json!({
        "start": connection_summary(&c)?,
        "options": opts,
        "ym_initial": r.trace[0],
        "ym_final": ym_final,
        "iterations": r.iterations,
        "gradient_norm": r.gradient_norm,
        "converged": r.converged,
        "trace": r.trace,
        "minimizer": r.connection,
    }));
    out.verdict("converged", r.converged);
    out.verdict("trace_monotone", monotone);
    out.tol("grad_tol", opts.grad_tol);
    out.tol("support_margin", SUPPORT_MARGIN as f64);
    if let Some(target) = p.target_ym {
        out.verdict("target_reached", ym_final <= target);
        out.tol("target_ym", target);
    }
    Ok(out)
}

fn torus_product(p: &TorusProductPayload) -> Result<Outcome, NcymError> {
    let c1 = p.factor1.build()?;
    let c2 = p.factor2.build()?;
    let add = additivity_report(&c1, &c2)?;
    let split = critical_splitting_check(&c1, &c2, p.checks.samples, p.checks.seed, p.checks.tol)?;
    let weighted = add.alpha_tau * add.ym1 + add.beta_tau * add.ym2;
    let mut out = Outcome::new(json!({
        "factor1": connection_summary(&c1)?,
        "factor2": connection_summary(&c2)?,
        "additivity": add,
        "additivity_residual": (add.ym_product - weighted).abs(),
        "splitting": split,
    }));
    out.verdict("subadditivity", add.subadditivity_slack >= -SUBADDITIVITY_TOL);
    out.verdict("defect_matches_cross_term", (add.defect - add.cross_term).abs() <= DEFECT_TOL);
    out.verdict("mixed_curvature_vanishes", add.mixed_curvature_max <= MIXED_CURVATURE_TOL);
    out.verdict("splitting_implication", !split.product_critical || split.necessary);
    out.tol("subadditivity", SUBADDITIVITY_TOL);
    out.tol("defect", DEFECT_TOL);
    out.tol("mixed_curvature", MIXED_CURVATURE_TOL);
    out.tol("critical", p.checks.tol);
    out.tol("sample_terms", SAMPLE_TERMS as f64);
    Ok(out)
}

fn case_name(c: MatrixCase) -> &'static str {
    match c {
        MatrixCase::Case1 => "case1",
        MatrixCase::Case2 => "case2",
        MatrixCase::Case3 => "case3",
        MatrixCase::Unclassified => "unclassified",
    }
}

fn triple_summary(t: &FiniteTriple) -> Value {
    json!({ "dim_h": t.dim_h(), "algebra_dim": t.algebra_dim(), "even": t.is_even() })
}

fn finite_forms(config: &ExperimentConfig, p: &FiniteFormsPayload) -> Result<Outcome, NcymError> {
    let t = p.triple.load(config)?;
    let case = match p.triple.mu() {
        Some(mu) => Some(case_name(classify_matrix_case(&mu?)?)),
        None => None,
    };
    let forms = form_report_weighted(&t, p.weight);
    let mut out = Outcome::new(json!({ "triple": triple_summary(&t), "case": case, "forms": forms }));
    out.verdict("junk_inside_pi_omega2", forms.junk_containment_residual <= EQUALITY_TOL);
    if let Some(e) = &p.expect {
        if let Some(want) = &e.case {
            out.verdict("expect_case", case == Some(want.as_str()));
        }
        for (name, want, got) in [
            ("expect_dim_omega1", e.dim_omega1, forms.dim_omega1),
            ("expect_dim_pi_omega2", e.dim_pi_omega2, forms.dim_pi_omega2),
            ("expect_dim_junk", e.dim_junk, forms.dim_junk),
            ("expect_dim_omega2", e.dim_omega2, forms.dim_omega2),
        ] {
            if let Some(want) = want {
                out.verdict(name, want == got);
            }
        }
    }
    Ok(out)
}

fn finite_product(config: &ExperimentConfig, p: &FiniteProductPayload) -> Result<Outcome, NcymError> {
    let mut t1 = p.triple1.load(config)?;
    let t2 = p.triple2.load(config)?;
    let doubled = !t1.is_even() && p.auto_double;
    if doubled {
        t1 = double_odd(&t1)?;
    }
    let prod = product_triple(&t1, &t2, false)?;
    let decomposition = decomposition_check(&t1, &t2)?;
    let hypothesis = hypothesis_check(&t1, &t2)?;
    let orth = orthogonality_check(&t1, &t2, p.orthogonality.samples, p.orthogonality.seed, p.weight)?;
    let unitary = if t2.is_even() { Some(unitary_equivalence_defect(&t1, &t2)?) } else { None };
    let mut out = Outcome::new(json!({
        "triple1": triple_summary(&t1),
        "triple2": triple_summary(&t2),
        "first_factor_doubled": doubled,
        "product": triple_summary(&prod),
        "decomposition": decomposition,
        "hypothesis": hypothesis,
        "orthogonality": orth,
        "unitary_defect": unitary,
    }));
    out.verdict("decomposition", decomposition.all());
    out.verdict("hypothesis", hypothesis.holds);
    out.verdict("orthogonality", orth.orthogonal);
    if let Some(d) = unitary {
        out.verdict("unitary_equivalence", d <= UNITARY_TOL);
        out.tol("unitary", UNITARY_TOL);
    }
    Ok(out)
}

fn constants(p: &ConstantsPayload) -> Result<Outcome, NcymError> {
    let mut results = json!({ "n": p.n, "dixmier": dixmier_torus_constant(p.n)? });
    if let Some(g) = p.gamma {
        let (alpha, beta) = gamma_constants(g.k, g.l, g.m, g.n, g.tr_d1, g.tr_d2)?;
        results["gamma"] = json!({ "input": g, "c": gamma_ratio(g.k, g.l)?, "alpha": alpha, "beta": beta });
    }
    Ok(Outcome::new(results))
}
