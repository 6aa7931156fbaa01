use std::path::{Path, PathBuf};
use std::sync::Arc;

use finite_triple_lab::{matrix_case_triple, CMatrix, FiniteTriple, TraceWeight, TripleSpec};
use nctorus_core::{Complex64, TermRecord, ThetaMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use ym_calculus::{Connection, DescentOptions, Projection, StepRule, TorusMatrix};

use crate::error::NcymError;
use crate::validate::validate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    TorusYm,
    TorusMinimize,
    TorusProduct,
    FiniteForms,
    FiniteProduct,
    Constants,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::TorusYm => "torus_ym",
            Kind::TorusMinimize => "torus_minimize",
            Kind::TorusProduct => "torus_product",
            Kind::FiniteForms => "finite_forms",
            Kind::FiniteProduct => "finite_product",
            Kind::Constants => "constants",
        }
    }
}

/// One experiment. The payload stays untyped until [`crate::run`] decodes it for `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub kind: Kind,
    pub payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    /// Directory that relative triple paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses and validates config text; any diagnostic makes this fail.
    pub fn parse(text: &str) -> Result<Self, NcymError> {
        let diagnostics = validate(text);
        if !diagnostics.is_empty() {
            return Err(NcymError::ConfigInvalid(diagnostics));
        }
        serde_json::from_str(text).map_err(|e| NcymError::Decode(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, NcymError> {
        let text = std::fs::read_to_string(path).map_err(|source| NcymError::Io { path: path.to_path_buf(), source })?;
        let mut config = Self::parse(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn constants(n: u32) -> Self {
        ExperimentConfig {
            schema_version: Some(1),
            kind: Kind::Constants,
            payload: serde_json::json!({ "n": n }),
            output_path: None,
            base_dir: None,
        }
    }

    /// Replaces every `seed` in the payload by `seed`, `seed + 1`, ... in key order.
    pub fn with_seed(&self, seed: u64) -> Self {
        fn walk(v: &mut Value, next: &mut u64) {
            match v {
                Value::Object(map) => {
                    for (key, child) in map.iter_mut() {
                        if key == "seed" && child.is_u64() {
                            *child = Value::from(*next);
                            *next = next.wrapping_add(1);
                        } else {
                            walk(child, next);
                        }
                    }
                }
                Value::Array(items) => items.iter_mut().for_each(|x| walk(x, next)),
                _ => {}
            }
        }
        let mut out = self.clone();
        let mut next = seed;
        walk(&mut out.payload, &mut next);
        out
    }

    pub(crate) fn decode<T: for<'de> Deserialize<'de>>(&self) -> Result<T, NcymError> {
        serde_json::from_value(self.payload.clone()).map_err(|e| NcymError::Decode(format!("payload: {e}")))
    }

    /// Resolves a path from the config against its directory.
    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConnectionSource {
    Explicit {
        #[serde(rename = "A")]
        a: Vec<Vec<Vec<TermRecord>>>,
        #[serde(default)]
        proj: Option<Vec<Vec<TermRecord>>>,
    },
    Random {
        radius: u32,
        amplitude: f64,
        seed: u64,
    },
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusModule {
    pub n: usize,
    pub theta: Vec<Vec<f64>>,
    pub q: usize,
    pub connection: ConnectionSource,
}

impl TorusModule {
    pub fn theta_matrix(&self) -> Result<Arc<ThetaMatrix>, NcymError> {
        if self.theta.len() != self.n || self.theta.iter().any(|row| row.len() != self.n) {
            return Err(NcymError::Decode(format!("theta must be {0} x {0}", self.n)));
        }
        Ok(Arc::new(ThetaMatrix::new(self.n, self.theta.concat())?))
    }

    pub fn build(&self) -> Result<Connection, NcymError> {
        let th = self.theta_matrix()?;
        let c = match &self.connection {
            ConnectionSource::Explicit { a, proj } => {
                let a = a
                    .iter()
                    .map(|m| TorusMatrix::from_records(&th, self.q, m))
                    .collect::<Result<Vec<_>, _>>()?;
                let proj = match proj {
                    Some(p) => Projection::new(TorusMatrix::from_records(&th, self.q, p)?, ym_calculus::TOL_IDEM)?,
                    None => Projection::free(&th, self.q),
                };
                Connection::new(Arc::clone(&th), proj, a)?
            }
            ConnectionSource::Random { radius, amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Connection::random_free(&th, self.q, *radius, *amplitude, &mut rng)
            }
            ConnectionSource::Flat => Connection::flat(&th, Projection::free(&th, self.q))?,
        };
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusYmPayload {
    #[serde(flatten)]
    pub module: TorusModule,
    #[serde(default)]
    pub checks: Option<Checks>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    #[serde(default)]
    pub armijo: Option<f64>,
    #[serde(default)]
    pub shrink: Option<f64>,
    #[serde(default)]
    pub initial_step: Option<f64>,
    #[serde(default)]
    pub step_rule: Option<StepRule>,
    #[serde(default)]
    pub support_radius: Option<u32>,
}

impl OptimizerConfig {
    pub fn options(&self) -> DescentOptions {
        let d = DescentOptions::default();
        DescentOptions {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            armijo: self.armijo.unwrap_or(d.armijo),
            shrink: self.shrink.unwrap_or(d.shrink),
            initial_step: self.initial_step.unwrap_or(d.initial_step),
            step_rule: self.step_rule.unwrap_or(d.step_rule),
            support_radius: self.support_radius.or(d.support_radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusMinimizePayload {
    #[serde(flatten)]
    pub module: TorusModule,
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub target_ym: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusProductPayload {
    pub factor1: TorusModule,
    pub factor2: TorusModule,
    pub checks: Checks,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleSource {
    Path(String),
    Inline(TripleSpec),
    MatrixCase { mu: Vec<Vec<Entry>> },
}

impl TripleSource {
    pub fn mu(&self) -> Option<Result<CMatrix, NcymError>> {
        let TripleSource::MatrixCase { mu } = self else { return None };
        let cols = mu[0].len();
        if mu.iter().any(|row| row.len() != cols) {
            return Some(Err(NcymError::Decode("mu rows must have equal length".into())));
        }
        let values: Vec<Complex64> = mu.iter().flatten().map(|e| e.value()).collect();
        Some(Ok(CMatrix::from_row_slice(mu.len(), cols, &values)))
    }

    pub fn load(&self, config: &ExperimentConfig) -> Result<FiniteTriple, NcymError> {
        match self {
            TripleSource::Path(p) => {
                let path = config.resolve(p);
                let text = std::fs::read_to_string(&path).map_err(|source| NcymError::Io { path: path.clone(), source })?;
                let spec: TripleSpec =
                    serde_json::from_str(&text).map_err(|e| NcymError::Decode(format!("{}: {e}", path.display())))?;
                Ok(FiniteTriple::from_spec(&spec)?)
            }
            TripleSource::Inline(spec) => Ok(FiniteTriple::from_spec(spec)?),
            TripleSource::MatrixCase { .. } => Ok(matrix_case_triple(&self.mu().expect("matrix case")?)?),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormExpectations {
    #[serde(default)]
    pub case: Option<String>,
    #[serde(default)]
    pub dim_omega1: Option<usize>,
    #[serde(default)]
    pub dim_pi_omega2: Option<usize>,
    #[serde(default)]
    pub dim_junk: Option<usize>,
    #[serde(default)]
    pub dim_omega2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteFormsPayload {
    pub triple: TripleSource,
    #[serde(default)]
    pub weight: TraceWeight,
    #[serde(default)]
    pub expect: Option<FormExpectations>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteProductPayload {
    pub triple1: TripleSource,
    pub triple2: TripleSource,
    #[serde(default)]
    pub auto_double: bool,
    #[serde(default)]
    pub weight: TraceWeight,
    pub orthogonality: Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaInput {
    pub k: f64,
    pub l: f64,
    pub m: u32,
    pub n: u32,
    pub tr_d1: f64,
    pub tr_d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsPayload {
    pub n: u32,
    #[serde(default)]
    pub gamma: Option<GammaInput>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_override_numbers_seeds_in_key_order() {
        let text = r#"{"kind":"torus_product","payload":{
            "factor1":{"n":2,"theta":[[0,0.1],[-0.1,0]],"q":1,"connection":{"type":"random","radius":1,"amplitude":0.1,"seed":5}},
            "factor2":{"n":2,"theta":[[0,0.2],[-0.2,0]],"q":1,"connection":{"type":"random","radius":1,"amplitude":0.1,"seed":5}},
            "checks":{"tol":1e-8,"samples":2,"seed":9}}}"#;
        let c = ExperimentConfig::parse(text).unwrap().with_seed(100);
        let p: TorusProductPayload = c.decode().unwrap();
        assert_eq!(p.checks.seed, 100);
        assert!(matches!(p.factor1.connection, ConnectionSource::Random { seed: 101, .. }));
        assert!(matches!(p.factor2.connection, ConnectionSource::Random { seed: 102, .. }));
    }

    #[test]
    fn relative_paths_resolve_against_the_config() {
        let mut c = ExperimentConfig::constants(2);
        assert_eq!(c.resolve("a.json"), PathBuf::from("a.json"));
        c.base_dir = Some(PathBuf::from("/tmp/x"));
        assert_eq!(c.resolve("a.json"), PathBuf::from("/tmp/x/a.json"));
        assert_eq!(c.resolve("/abs.json"), PathBuf::from("/abs.json"));
    }

    #[test]
    fn mu_entries_accept_reals_and_pairs() {
        let src: TripleSource = serde_json::from_str(r#"{"matrix_case":{"mu":[[1,[0,2]],[0.5,0]]}}"#).unwrap();
        let mu = src.mu().unwrap().unwrap();
        assert_eq!(mu.shape(), (2, 2));
        assert_eq!(mu[(0, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(mu[(1, 0)], Complex64::new(0.5, 0.0));
    }
}
