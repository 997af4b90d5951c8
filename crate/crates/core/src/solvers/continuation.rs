//! Half-eigenvalues along the homotopy `F_s = -sΓ tr(M) + (1 - s) F`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::eigen::{principal_eigenpair_from, EigenOptions, EigenSign};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operator::OperatorSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationRow {
    pub s: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationTable {
    pub big_gamma: f64,
    pub rows: Vec<ContinuationRow>,
}

impl ContinuationTable {
    pub fn complete(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    /// Largest step-to-step change of either half-eigenvalue.
    pub fn max_jump(&self) -> f64 {
        self.rows
            .windows(2)
            .filter(|w| w[0].ok && w[1].ok)
            .map(|w| {
                (w[1].lambda_plus - w[0].lambda_plus)
                    .abs()
                    .max((w[1].lambda_minus - w[0].lambda_minus).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Computes both half-eigenvalues at `n_steps` equally spaced values
/// `s_k = k / (n_steps - 1)`, warm-starting each from the previous
/// eigenfunctions. `Γ` is the upper ellipticity constant of `op`.
pub fn continuation_sweep(
    op: &OperatorSpec,
    n_steps: usize,
    grid: Arc<Grid>,
    opts: &EigenOptions,
) -> Result<ContinuationTable> {
    if n_steps < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 steps, got {n_steps}")));
    }
    let big_gamma = op.band()?.big_gamma;
    let mut rows = Vec::with_capacity(n_steps);
    let mut warm: [Option<GridFunction>; 2] = [None, None];
    for k in 0..n_steps {
        let s = k as f64 / (n_steps - 1) as f64;
        let fs = OperatorSpec::homotopy(op.clone(), s, big_gamma)?;
        let mut lam = [f64::NAN; 2];
        let mut err = None;
        for (i, sign) in [EigenSign::Positive, EigenSign::Negative].into_iter().enumerate() {
            match principal_eigenpair_from(&fs, grid.clone(), sign, opts, warm[i].as_ref()) {
                Ok(p) if p.converged => {
                    lam[i] = p.lambda;
                    warm[i] = Some(p.phi);
                }
                Ok(p) => {
                    lam[i] = p.lambda;
                    err = Some(format!("sign {} did not converge", sign.symbol()));
                }
                Err(e) => err = Some(e.to_string()),
            }
        }
        rows.push(ContinuationRow {
            s,
            lambda_plus: lam[0],
            lambda_minus: lam[1],
            ok: err.is_none(),
            error: err,
        });
    }
    Ok(ContinuationTable { big_gamma, rows })
}
