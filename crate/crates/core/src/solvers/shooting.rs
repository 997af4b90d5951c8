//! 1D shooting for the spectrum above the principal half-eigenvalues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Jet, OperatorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    /// RK4 steps across the interval.
    pub steps: usize,
    /// Bracket width for the λ refinement.
    pub lambda_tol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            steps: 4000,
            lambda_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub end_value: f64,
    pub zero_count: usize,
}

/// Solves `F(m, p, z, x) = λ z` for `m`. `F` is strictly decreasing in `m`
/// with slopes in `[-Γ, -γ]`, so the root lies within `|λz - F(0)|/γ`.
fn invert_m(op: &OperatorSpec, gamma: f64, lambda: f64, p: f64, z: f64, x: f64) -> Result<f64> {
    let g = |m: f64| -> Result<f64> { Ok(op.eval(&Jet::scalar(m, p, z, x))? - lambda * z) };
    let g0 = g(0.0)?;
    if g0 == 0.0 {
        return Ok(0.0);
    }
    let r = g0.abs() / gamma * (1.0 + 1e-9) + f64::MIN_POSITIVE;
    let (mut lo, mut hi) = if g0 > 0.0 { (0.0, r) } else { (-r, 0.0) };
    let (mut glo, mut ghi) = (g(lo)?, g(hi)?);
    if !(glo >= 0.0 && ghi <= 0.0) {
        return Err(Error::Shooting(format!(
            "no sign change for m in [{lo}, {hi}] at x={x}: ellipticity violated"
        )));
    }
    // Illinois iteration; `g` is piecewise linear in `m` for the shipped
    // operators, so this terminates in a few steps.
    let mut side = 0i8;
    for _ in 0..200 {
        if glo == 0.0 {
            return Ok(lo);
        }
        if ghi == 0.0 {
            return Ok(hi);
        }
        let mut mid = (lo * ghi - hi * glo) / (ghi - glo);
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        if mid == lo || mid == hi {
            break;
        }
        let gm = g(mid)?;
        if gm > 0.0 {
            lo = mid;
            glo = gm;
            if side == 1 {
                ghi *= 0.5;
            }
            side = 1;
        } else {
            hi = mid;
            ghi = gm;
            if side == -1 {
                glo *= 0.5;
            }
            side = -1;
        }
        if hi - lo <= 1e-15 * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn ellipticity_floor(op: &OperatorSpec) -> Result<f64> {
    let b = op.band()?;
    if op.dim().is_some_and(|d| d != 1) {
        return Err(Error::Unsupported("shooting needs a 1D operator".into()));
    }
    Ok(b.gamma)
}

/// Integrates `F(u'', u', u, x) = λu`, `u(lo) = 0`, `u'(lo) = slope` with
/// RK4 and returns `u(hi)` and the number of interior sign changes.
pub fn shoot_1d(op: &OperatorSpec, lambda: f64, domain: (f64, f64), slope: f64, opts: &ShootOptions) -> Result<Shot> {
    let gamma = ellipticity_floor(op)?;
    let (a, b) = domain;
    if !(a < b) || opts.steps < 2 {
        return Err(Error::InvalidInput("need lo < hi and at least 2 steps".into()));
    }
    let h = (b - a) / opts.steps as f64;
    let rhs = |x: f64, y: [f64; 2]| -> Result<[f64; 2]> {
        Ok([y[1], invert_m(op, gamma, lambda, y[1], y[0], x)?])
    };
    let mut y = [0.0, slope];
    let mut zeros = 0;
    let mut last_sign = slope.signum();
    for k in 0..opts.steps {
        let x = a + k as f64 * h;
        let k1 = rhs(x, y)?;
        let k2 = rhs(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]])?;
        let k3 = rhs(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]])?;
        let k4 = rhs(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]])?;
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if k + 1 < opts.steps && y[0] != 0.0 {
            let s = y[0].signum();
            if s != last_sign {
                zeros += 1;
                last_sign = s;
            }
        }
    }
    Ok(Shot {
        end_value: y[0],
        zero_count: zeros,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanOutcome {
    Solved,
    NontrivialKernel,
    NoConvergence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub end_plus: f64,
    pub end_minus: f64,
    pub zeros_plus: usize,
    pub zeros_minus: usize,
    pub outcome: ScanOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    /// Refined eigenvalues in the range, ascending, each with the sign of the
    /// initial slope and the zero count of its eigenfunction.
    pub eigenvalues: Vec<(f64, f64, usize)>,
    /// Smallest eigenvalue in the range whose eigenfunction changes sign.
    pub lambda2_estimate: Option<f64>,
    /// Length of the eigenvalue-free interval at the start of the range.
    pub gap: f64,
}

impl ScanResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda).collect()
    }
}

fn refine(op: &OperatorSpec, domain: (f64, f64), slope: f64, mut lo: f64, mut hi: f64, opts: &ShootOptions) -> Result<f64> {
    let mut flo = shoot_1d(op, lo, domain, slope, opts)?.end_value;
    while hi - lo > opts.lambda_tol {
        let mid = 0.5 * (lo + hi);
        let fm = shoot_1d(op, mid, domain, slope, opts)?.end_value;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scans `resolution` equally spaced values of λ over `range`, shooting with
/// slopes `±1`, and refines every sign change of the end value by bisection.
pub fn lambda2_scan_1d(
    op: &OperatorSpec,
    domain: (f64, f64),
    range: (f64, f64),
    resolution: usize,
    opts: &ShootOptions,
) -> Result<ScanResult> {
    if !(range.0 < range.1) || resolution < 2 {
        return Err(Error::InvalidInput(format!(
            "empty scan range ({}, {}) or resolution {resolution} < 2",
            range.0, range.1
        )));
    }
    ellipticity_floor(op)?;
    let step = (range.1 - range.0) / (resolution - 1) as f64;
    let mut rows = Vec::with_capacity(resolution);
    for k in 0..resolution {
        let lambda = range.0 + k as f64 * step;
        let plus = shoot_1d(op, lambda, domain, 1.0, opts);
        let minus = shoot_1d(op, lambda, domain, -1.0, opts);
        let row = match (plus, minus) {
            (Ok(p), Ok(m)) => ScanRow {
                lambda,
                end_plus: p.end_value,
                end_minus: m.end_value,
                zeros_plus: p.zero_count,
                zeros_minus: m.zero_count,
                outcome: ScanOutcome::Solved,
            },
            _ => ScanRow {
                lambda,
                end_plus: f64::NAN,
                end_minus: f64::NAN,
                zeros_plus: 0,
                zeros_minus: 0,
                outcome: ScanOutcome::NoConvergence,
            },
        };
        rows.push(row);
    }
    let mut eigenvalues = Vec::new();
    for w in 0..resolution - 1 {
        let (r0, r1) = (&rows[w], &rows[w + 1]);
        if r0.outcome == ScanOutcome::NoConvergence || r1.outcome == ScanOutcome::NoConvergence {
            continue;
        }
        for (slope, e0, e1) in [(1.0, r0.end_plus, r1.end_plus), (-1.0, r0.end_minus, r1.end_minus)] {
            if e0 == 0.0 || (e0 > 0.0) != (e1 > 0.0) {
                let root = refine(op, domain, slope, r0.lambda, r1.lambda, opts)?;
                let zc = shoot_1d(op, root, domain, slope, opts)?.zero_count;
                eigenvalues.push((root, slope, zc));
            }
        }
    }
    eigenvalues.sort_by(|a, b| a.0.total_cmp(&b.0));
    for row in rows.iter_mut() {
        if eigenvalues.iter().any(|e| (e.0 - row.lambda).abs() <= 0.5 * step) {
            row.outcome = ScanOutcome::NontrivialKernel;
        }
    }
    let lambda2_estimate = eigenvalues.iter().find(|e| e.2 >= 1).map(|e| e.0);
    let gap = eigenvalues.first().map_or(range.1 - range.0, |e| e.0 - range.0);
    Ok(ScanResult {
        rows,
        eigenvalues,
        lambda2_estimate,
        gap,
    })
}
