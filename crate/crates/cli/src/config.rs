//! Problem configuration files.
//!
//! ```json
//! {
//!   "problem": "example72",
//!   "beta": 0.2, "mu": 0.5, "rho": 0.16666666666666666,
//!   "weights": { "kind": "linear" },
//!   "N": 20, "M": 256, "tol": 1e-10, "max_iter": 200, "init": 0.0,
//!   "output": "json"
//! }
//! ```
//!
//! `beta`, `mu` and `rho` default to the registry entry. `problem` may also
//! be `{ "key": "constant", "params": { "value": 2.0 } }`.

use hahn_fde::bvp::check_nonsingular;
use hahn_fde::problems::Problem;
use hahn_fde::{BvpSpec, FractionalOrder, Grid, GridFunction, SolveOptions, WeightSequence};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_N: usize = 20;
pub const DEFAULT_M: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemRef {
    Key(String),
    Inline(InlineProblem),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    pub key: String,
    #[serde(default)]
    pub params: ProblemParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemParams {
    /// Value of the `constant` family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl ProblemRef {
    pub fn key(&self) -> &str {
        match self {
            ProblemRef::Key(k) => k,
            ProblemRef::Inline(p) => &p.key,
        }
    }

    pub fn resolve(&self) -> Result<Problem, CliError> {
        let value = match self {
            ProblemRef::Key(_) => None,
            ProblemRef::Inline(p) => p.params.value,
        };
        if let Some(v) = value {
            if self.key() != "constant" {
                return Err(CliError::config(
                    "problem.params.value",
                    "only the `constant` problem takes a value",
                ));
            }
            if !v.is_finite() {
                return Err(CliError::config("problem.params.value", "must be finite"));
            }
        }
        Problem::from_key(self.key(), value).ok_or_else(|| {
            CliError::config(
                "problem",
                format!(
                    "unknown problem `{}` (expected example71, example72, manufactured, zero or constant)",
                    self.key()
                ),
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub problem: ProblemRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default = "default_weights")]
    pub weights: WeightSequence,
    #[serde(rename = "N", alias = "n", default = "default_n")]
    pub n: usize,
    #[serde(rename = "M", alias = "m", default = "default_m")]
    pub m: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Starting iterate `m_i(ξ) = init · ξ`; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputFormat>,
}

fn default_weights() -> WeightSequence {
    WeightSequence::Linear
}

fn default_n() -> usize {
    DEFAULT_N
}

fn default_m() -> usize {
    DEFAULT_M
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

/// Resolved `(β, μ, ϱ)` after applying registry defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    pub beta: f64,
    pub mu: f64,
    pub rho: f64,
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<ProblemConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ProblemConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(
            if path == "." { String::new() } else { path },
            e.into_inner().to_string(),
        )
    })?;
    config.validate()?;
    Ok(config)
}

impl ProblemConfig {
    pub fn for_problem(key: &str) -> Self {
        ProblemConfig {
            problem: ProblemRef::Key(key.into()),
            beta: None,
            mu: None,
            rho: None,
            weights: default_weights(),
            n: DEFAULT_N,
            m: DEFAULT_M,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            init: None,
            output: None,
        }
    }

    pub fn parameters(&self) -> Result<Parameters, CliError> {
        let d = self.problem.resolve()?.defaults();
        Ok(Parameters {
            beta: self.beta.unwrap_or(d.beta),
            mu: self.mu.unwrap_or(d.mu),
            rho: self.rho.unwrap_or(d.rho),
        })
    }

    /// Checks every spec invariant, naming the offending field.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = self.parameters()?;
        if !(p.beta > 0.0 && p.beta <= 1.0) {
            return Err(CliError::config("beta", format!("must lie in (0, 1], got {}", p.beta)));
        }
        if !p.mu.is_finite() {
            return Err(CliError::config("mu", format!("must be finite, got {}", p.mu)));
        }
        if !(p.rho > 0.0 && p.rho < 1.0) {
            return Err(CliError::config("rho", format!("must lie in (0, 1), got {}", p.rho)));
        }
        if self.n == 0 {
            return Err(CliError::config("N", "at least one component is required"));
        }
        if self.m == 0 {
            return Err(CliError::config("M", "at least one grid interval is required"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::config("tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CliError::config("max_iter", "must be at least 1"));
        }
        if self.init.is_some_and(|v| !v.is_finite()) {
            return Err(CliError::config("init", "must be finite"));
        }
        check_nonsingular(p.mu, p.rho)?;
        // the grid value of ϱ must not be singular either
        let grid = Grid::new(self.m)?;
        check_nonsingular(p.mu, grid.node(grid.nearest_index(p.rho)))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.m)?)
    }

    pub fn spec(&self) -> Result<BvpSpec, CliError> {
        self.spec_with(self.n, self.m)
    }

    /// Spec with overridden truncation and grid sizes.
    pub fn spec_with(&self, n: usize, m: usize) -> Result<BvpSpec, CliError> {
        let p = self.parameters()?;
        let problem = self.problem.resolve()?;
        let beta = FractionalOrder::new(p.beta)?;
        Ok(problem.spec(beta, p.mu, p.rho, self.weights.clone(), n, Grid::new(m)?)?)
    }

    /// Tolerance, iteration cap and starting iterate for a spec built from
    /// this config.
    pub fn solve_options(&self, spec: &BvpSpec) -> SolveOptions {
        let options = SolveOptions::new(self.tol, self.max_iter);
        match self.init {
            Some(v) => options.with_init(GridFunction::from_fn(spec.components(), spec.grid(), |_, x| v * x)),
            None => options,
        }
    }
}
