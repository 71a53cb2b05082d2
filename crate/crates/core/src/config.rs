//! Declarative experiment descriptions.
//!
//! Config files are JSON with exact scalar strings (`"1/2 + 3/4*sqrt(2)"`)
//! so that radical inputs survive serialization losslessly. Matrices are
//! row-major arrays of scalar strings including the unit diagonal; test
//! functions list `{m, re, im}` terms plus a window order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::experiments::{Estimator, ExperimentConfig};
use crate::group::UniMatrix;
use crate::nilmanifold::TestFunction;
use crate::scalar::Exact;
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Parse a row-major matrix literal of exact scalar strings.
pub fn parse_matrix(dimension: usize, entries: &[String]) -> Result<UniMatrix<Exact>, Error> {
    let parsed: Result<Vec<Exact>, Error> = entries.iter().map(|s| s.parse()).collect();
    UniMatrix::from_entries(dimension, parsed?)
}

/// Render a matrix back into its literal form.
pub fn matrix_literal(m: &UniMatrix<Exact>) -> Vec<String> {
    let n = m.dim();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| m.entry(i, j).to_string()))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub m: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    #[serde(default)]
    pub window_order: u32,
    pub terms: Vec<TermSpec>,
}

impl FunctionSpec {
    pub fn build(&self, dimension: usize) -> Result<TestFunction, Error> {
        let terms = self
            .terms
            .iter()
            .map(|t| (t.m.clone(), Complex64::new(t.re, t.im)))
            .collect();
        TestFunction::new(dimension, terms, self.window_order)
    }
}

/// Scenario file for `average`, `limit`, and `compare`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub schema_version: u32,
    pub dimension: usize,
    pub a: Vec<String>,
    pub x: Vec<String>,
    pub functions: Vec<FunctionSpec>,
    pub n_steps: u64,
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    pub m_samples: u64,
    pub estimator: Estimator,
    #[serde(default)]
    pub grid: usize,
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl ExperimentFile {
    pub fn build(&self) -> Result<ExperimentConfig, Error> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::BadConfig(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let functions = self
            .functions
            .iter()
            .map(|f| f.build(self.dimension))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = ExperimentConfig {
            dimension: self.dimension,
            a: parse_matrix(self.dimension, &self.a)?,
            x: parse_matrix(self.dimension, &self.x)?,
            functions,
            n_steps: self.n_steps,
            checkpoints: self.checkpoints.clone(),
            m_samples: self.m_samples,
            estimator: self.estimator,
            grid: self.grid,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Scenario file for `ergodic-check`: with `x` present the skew
/// translation is queried, otherwise the base translation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicCheckFile {
    pub schema_version: u32,
    pub dimension: usize,
    pub a: Vec<String>,
    #[serde(default)]
    pub x: Option<Vec<String>>,
}

impl ErgodicCheckFile {
    pub fn matrices(&self) -> Result<(UniMatrix<Exact>, Option<UniMatrix<Exact>>), Error> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::BadConfig(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        let a = parse_matrix(self.dimension, &self.a)?;
        let x = self
            .x
            .as_ref()
            .map(|m| parse_matrix(self.dimension, m))
            .transpose()?;
        Ok((a, x))
    }
}

/// Scenario file for the verification suites.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub schema_version: u32,
    pub dimensions: Vec<usize>,
    pub cases: u32,
    pub seed: u64,
    /// Lower-central-series levels for the commutator-lemma suite.
    #[serde(default)]
    pub levels: Vec<usize>,
}

impl VerifyFile {
    pub fn validate(&self) -> Result<(), Error> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::BadConfig(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        if self.dimensions.is_empty() {
            return Err(Error::BadConfig("dimensions must be nonempty".into()));
        }
        for &n in &self.dimensions {
            if !(2..=6).contains(&n) {
                return Err(Error::BadConfig(format!(
                    "dimension {n} outside supported range 2..=6"
                )));
            }
        }
        if self.cases == 0 {
            return Err(Error::BadConfig("cases must be >= 1".into()));
        }
        Ok(())
    }
}
