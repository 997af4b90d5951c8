//! TOML experiment configs.
//!
//! ```toml
//! [operator]
//! kind = "pucci-minus"
//! gamma = 1
//! Gamma = 2
//!
//! [domain]
//! dim = 1
//! lo = 0
//! hi = "pi"
//! n_interior = 801
//!
//! [run]
//! lambda = "lambda1_minus + 0.01"
//! f = "sin(1)"
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operator::{parse_constant, Band, OperatorSpec, ScalarField};
use crate::solvers::{EigenOptions, SolveOptions};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Value(f64),
    Expr(String),
}

impl Number {
    fn value(&self) -> Result<f64> {
        match self {
            Number::Value(v) => Ok(*v),
            Number::Expr(s) => parse_constant(s),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Bound {
    Scalar(Number),
    PerAxis(Vec<Number>),
}

impl Bound {
    fn values(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            Bound::Scalar(n) => Ok(vec![n.value()?; dim]),
            Bound::PerAxis(v) if v.len() == dim => v.iter().map(Number::value).collect(),
            Bound::PerAxis(v) => Err(Error::Config(format!(
                "domain bound has {} entries for dim {dim}",
                v.len()
            ))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSection {
    dim: usize,
    lo: Bound,
    hi: Bound,
    n_interior: usize,
}

/// `λ` as a literal or relative to a computed half-eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaSpec {
    Value(f64),
    Plus(f64),
    Minus(f64),
}

impl LambdaSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        for (prefix, plus) in [("lambda1_minus", false), ("lambda1_plus", true)] {
            if let Some(rest) = t.strip_prefix(prefix) {
                let offset = match rest.chars().next() {
                    None => 0.0,
                    Some('+') => parse_constant(&rest[1..])?,
                    Some('-') => -parse_constant(&rest[1..])?,
                    Some(_) => return Err(Error::Config(format!("cannot parse lambda '{s}'"))),
                };
                return Ok(if plus { LambdaSpec::Plus(offset) } else { LambdaSpec::Minus(offset) });
            }
        }
        parse_constant(&t)
            .map(LambdaSpec::Value)
            .map_err(|_| Error::Config(format!("cannot parse lambda '{s}'")))
    }

    pub fn needs_eigen(&self) -> bool {
        !matches!(self, LambdaSpec::Value(_))
    }

    pub fn resolve(&self, lambda_plus: f64, lambda_minus: f64) -> f64 {
        match *self {
            LambdaSpec::Value(v) => v,
            LambdaSpec::Plus(eta) => lambda_plus + eta,
            LambdaSpec::Minus(eta) => lambda_minus + eta,
        }
    }
}

/// Command-specific parameters; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    lambda: Option<Number>,
    pub f: Option<ScalarField>,
    pub eta: Option<Vec<f64>>,
    pub lambda_range: Option<[f64; 2]>,
    pub resolution: Option<usize>,
    pub n_steps: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub restarts: Option<usize>,
    pub max_iter: Option<usize>,
    pub samples: Option<usize>,
    pub trials: Option<usize>,
    /// Band that the structure check is run against instead of the
    /// operator's own.
    pub band: Option<Band>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    operator: OperatorSpec,
    domain: DomainSection,
    #[serde(default)]
    run: RunSection,
}

/// A validated operator, grid and run section.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub operator: OperatorSpec,
    pub grid: Arc<Grid>,
    pub run: RunSection,
    pub lambda: Option<LambdaSpec>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let d = &raw.domain;
        let grid = Grid::new(d.dim, &d.lo.values(d.dim)?, &d.hi.values(d.dim)?, d.n_interior)?;
        let mut operator = raw.operator;
        if let Some(od) = operator.dim() {
            if od != grid.dim() {
                return Err(Error::DimensionMismatch {
                    expected: grid.dim(),
                    found: od,
                });
            }
        }
        let points: Vec<[f64; 2]> = (0..grid.num_nodes()).map(|k| grid.coords(k)).collect();
        operator.infer_bands(&points)?;
        operator.validate()?;
        let lambda = match &raw.run.lambda {
            None => None,
            Some(Number::Value(v)) => Some(LambdaSpec::Value(*v)),
            Some(Number::Expr(s)) => Some(LambdaSpec::parse(s)?),
        };
        let run = raw.run;
        if let Some(t) = run.tol {
            if !(t > 0.0) {
                return Err(Error::Config(format!("tol must be positive, got {t}")));
            }
        }
        Ok(ExperimentConfig {
            operator,
            grid: Arc::new(grid),
            run,
            lambda,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Command-line seed, else `run.seed`, else 0.
    pub fn seed(&self, cli: Option<u64>) -> u64 {
        cli.or(self.run.seed).unwrap_or(0)
    }

    pub fn solve_options(&self, seed: u64) -> SolveOptions {
        let mut o = SolveOptions {
            seed,
            ..SolveOptions::default()
        };
        if let Some(t) = self.run.tol {
            o.tol = t;
        }
        if let Some(r) = self.run.restarts {
            o.restarts = r;
        }
        if let Some(m) = self.run.max_iter {
            o.max_iter = m;
        }
        o
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions::default()
    }

    /// `run.f` sampled on the grid with zero boundary values.
    pub fn forcing(&self) -> Result<GridFunction> {
        let f = self
            .run
            .f
            .as_ref()
            .ok_or_else(|| Error::Config("run.f is required".into()))?;
        Ok(GridFunction::from_field(self.grid.clone(), f)?.with_zero_boundary())
    }

    pub fn require_lambda(&self) -> Result<&LambdaSpec> {
        self.lambda
            .as_ref()
            .ok_or_else(|| Error::Config("run.lambda is required".into()))
    }
}
