//! Sample-based checkers for positive homogeneity and the Pucci structure
//! bound. Failures are returned as data.

use serde::{Deserialize, Serialize};

use super::{pucci_minus, pucci_plus, Band, Jet, OperatorSpec};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub index: usize,
    /// Amount by which the inequality is violated (positive).
    pub excess: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub checked: usize,
    pub failures: Vec<CheckFailure>,
    /// Smallest slack `tol - |F(tj) - tF(j)|` over all checks.
    pub worst_margin: f64,
}

impl HomogeneityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub checked: usize,
    pub failures: Vec<CheckFailure>,
    pub worst_margin: f64,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `|F(t j) - t F(j)| <= rel_tol (1 + |t F(j)|)` for every sample and
/// every `t`.
pub fn check_homogeneity(
    op: &OperatorSpec,
    samples: &[Jet],
    ts: &[f64],
    rel_tol: f64,
) -> Result<HomogeneityReport> {
    let mut report = HomogeneityReport {
        worst_margin: f64::INFINITY,
        ..Default::default()
    };
    for (i, jet) in samples.iter().enumerate() {
        let base = op.eval(jet)?;
        for &t in ts {
            let scaled = op.eval(&jet.scale(t))?;
            let target = t * base;
            let tol = rel_tol * (1.0 + target.abs());
            let err = (scaled - target).abs();
            report.checked += 1;
            report.worst_margin = report.worst_margin.min(tol - err);
            if err > tol {
                report.failures.push(CheckFailure {
                    index: i,
                    excess: err - tol,
                    detail: format!("t={t}: F(tj)={scaled}, tF(j)={target}"),
                });
            }
        }
    }
    Ok(report)
}

/// Checks the two-sided structure bound
/// `P⁻(M-N) - δ₁|p-q| - δ₀|z-w| <= F(j1) - F(j2) <= P⁺(M-N) + δ₁|p-q| + δ₀|z-w|`
/// with slack `tol` on each side.
pub fn check_structure(
    op: &OperatorSpec,
    band: &Band,
    pairs: &[(Jet, Jet)],
    tol: f64,
) -> Result<StructureReport> {
    let mut report = StructureReport {
        worst_margin: f64::INFINITY,
        ..Default::default()
    };
    for (i, (j1, j2)) in pairs.iter().enumerate() {
        let mut j2 = *j2;
        j2.x = j1.x;
        let diff = op.eval(j1)? - op.eval(&j2)?;
        let d = j1.sub(&j2);
        let lower_order = band.delta1 * d.gradient_norm() + band.delta0 * d.z.abs();
        let lo = pucci_minus(&d.m, band) - lower_order;
        let hi = pucci_plus(&d.m, band) + lower_order;
        let margin = (diff - lo).min(hi - diff) + tol;
        report.checked += 1;
        report.worst_margin = report.worst_margin.min(margin);
        if margin < 0.0 {
            report.failures.push(CheckFailure {
                index: i,
                excess: -margin,
                detail: format!("difference {diff} outside [{lo}, {hi}]"),
            });
        }
    }
    Ok(report)
}
