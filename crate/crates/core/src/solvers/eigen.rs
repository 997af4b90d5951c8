//! Principal half-eigenpairs by normalized inverse iteration.
//!
//! With `G = F + σ` proper (`σ = δ₀ + 1`), each sweep solves
//! `G(w) = φ_k + s ε_k h` for the tent bump `h` and sign `s`, then sets
//! `φ_{k+1} = w / ‖w‖∞` and `λ_{k+1} = 1/‖w‖∞ - σ`. The bump weight
//! `ε_k = 2^-k` for `k <= 10` and zero afterwards.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::dirichlet::{DirichletSolver, SolveOptions};
use crate::discretization::apply_operator;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operator::OperatorSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenSign {
    Positive,
    Negative,
}

impl EigenSign {
    pub fn factor(self) -> f64 {
        match self {
            EigenSign::Positive => 1.0,
            EigenSign::Negative => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EigenSign::Positive => "+",
            EigenSign::Negative => "-",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenOptions {
    /// Properness shift `σ`; `None` means `δ₀ + 1` from the operator band.
    pub shift: Option<f64>,
    pub tol_lambda: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Last exponent of the bump schedule `ε_k = 2^-k`.
    pub eps_steps: usize,
    /// Options of the inner Dirichlet solves.
    pub inner: SolveOptions,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            shift: None,
            tol_lambda: 1e-10,
            tol_residual: 1e-8,
            max_iter: 400,
            eps_steps: 10,
            inner: SolveOptions {
                tol: 1e-11,
                max_iter: 50,
                restarts: 1,
                ..SolveOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: f64,
    pub phi: GridFunction,
    pub sign: EigenSign,
    /// `‖F_h(φ) - λφ‖∞` over interior nodes.
    pub residual: f64,
    pub iterations: usize,
    pub rayleigh_lo: f64,
    pub rayleigh_hi: f64,
    pub converged: bool,
    /// `λ` after every sweep.
    pub lambda_trace: Vec<f64>,
}

impl EigenPair {
    pub fn bracket_width(&self) -> f64 {
        self.rayleigh_hi - self.rayleigh_lo
    }
}

/// `(min, max)` over interior nodes of `F_h(φ)/φ`.
pub fn rayleigh_bounds(op: &OperatorSpec, phi: &GridFunction) -> Result<(f64, f64)> {
    let sign = phi.interior().first().copied().unwrap_or(0.0).signum();
    if phi.interior().iter().any(|&v| v == 0.0 || v.signum() != sign) {
        return Err(Error::SignViolation("Rayleigh quotient needs a one-signed field".into()));
    }
    let f = apply_operator(op, phi)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b) in f.interior().iter().zip(phi.interior()) {
        let q = a / b;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok((lo, hi))
}

fn eigen_residual(op: &OperatorSpec, phi: &GridFunction, lambda: f64) -> Result<f64> {
    let f = apply_operator(op, phi)?;
    Ok(f.interior()
        .iter()
        .zip(phi.interior())
        .fold(0.0f64, |m, (a, b)| m.max((a - lambda * b).abs())))
}

/// Principal eigenpair of `op` with the requested sign on `grid`.
pub fn principal_eigenpair(
    op: &OperatorSpec,
    grid: Arc<Grid>,
    sign: EigenSign,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    principal_eigenpair_from(op, grid, sign, opts, None)
}

/// As [`principal_eigenpair`], starting from `initial` (sign-corrected and
/// normalized) instead of the tent.
pub fn principal_eigenpair_from(
    op: &OperatorSpec,
    grid: Arc<Grid>,
    sign: EigenSign,
    opts: &EigenOptions,
    initial: Option<&GridFunction>,
) -> Result<EigenPair> {
    let sigma = match opts.shift {
        Some(s) => s,
        None => op.band()?.delta0 + 1.0,
    };
    let s = sign.factor();
    let g = OperatorSpec::shift(op.clone(), -sigma);
    let mut solver = DirichletSolver::new(g, grid.clone(), opts.inner.clone())?;
    let bump = GridFunction::tent(grid.clone());

    let mut phi = match initial {
        Some(u) => {
            let v = u.clone().with_zero_boundary();
            let mut abs = GridFunction::from_fn(grid.clone(), |_| 0.0)?;
            for (a, b) in abs.interior_mut().iter_mut().zip(v.interior()) {
                *a = s * b.abs();
            }
            if abs.interior_sup_norm() == 0.0 {
                bump.scaled(s)
            } else {
                abs.scaled(1.0 / abs.interior_sup_norm())
            }
        }
        None => bump.scaled(s),
    };
    let mut w = phi.scaled(1.0 / (1.0 + sigma));
    let mut lambda = f64::NAN;
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut bracket = (f64::NEG_INFINITY, f64::INFINITY);
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..opts.max_iter {
        iterations = k + 1;
        let eps = if k <= opts.eps_steps { 0.5f64.powi(k as i32) } else { 0.0 };
        let rhs = phi.add(&bump.scaled(s * eps));
        let rep = solver.solve_from(0.0, &rhs, &w)?;
        if !rep.converged && !rep.policy_fixed_point() {
            return Err(Error::Eigen(format!(
                "inner solve failed at sweep {k} (residual {:e}); lambda trace {:?}",
                rep.final_residual(),
                trace
            )));
        }
        w = rep.u;
        let norm = w.interior_sup_norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Eigen(format!("degenerate iterate at sweep {k}")));
        }
        let next = w.scaled(1.0 / norm);
        let lambda_next = 1.0 / norm - sigma;
        let dl = (lambda_next - lambda).abs();
        phi = next;
        lambda = lambda_next;
        trace.push(lambda);
        if k > opts.eps_steps {
            residual = eigen_residual(op, &phi, lambda)?;
            if dl <= opts.tol_lambda && residual <= opts.tol_residual {
                if let Ok(b) = rayleigh_bounds(op, &phi) {
                    bracket = b;
                    if b.1 - b.0 <= 10.0 * opts.tol_residual {
                        converged = true;
                        break;
                    }
                }
            }
        }
    }
    if !converged {
        residual = eigen_residual(op, &phi, lambda)?;
        if let Ok(b) = rayleigh_bounds(op, &phi) {
            bracket = b;
        }
    }
    if phi.interior().iter().any(|&v| s * v <= 0.0) {
        return Err(Error::SignViolation(format!(
            "eigenfunction for sign {} changes sign (lambda {lambda})",
            sign.symbol()
        )));
    }
    Ok(EigenPair {
        lambda,
        phi,
        sign,
        residual,
        iterations,
        rayleigh_lo: bracket.0,
        rayleigh_hi: bracket.1,
        converged,
        lambda_trace: trace,
    })
}

/// Both principal half-eigenpairs `(plus, minus)`.
pub fn half_eigenpairs(op: &OperatorSpec, grid: Arc<Grid>, opts: &EigenOptions) -> Result<(EigenPair, EigenPair)> {
    let plus = principal_eigenpair(op, grid.clone(), EigenSign::Positive, opts)?;
    let minus = principal_eigenpair(op, grid, EigenSign::Negative, opts)?;
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_eigenvector_bracket() {
        let n = 49;
        let g = Arc::new(Grid::interval(0.0, 1.0, n).unwrap());
        let h = g.h()[0];
        let phi = GridFunction::from_fn(g, |x| (PI * x[0]).sin()).unwrap().with_zero_boundary();
        let op = OperatorSpec::laplacian(1).unwrap();
        let (lo, hi) = rayleigh_bounds(&op, &phi).unwrap();
        let exact = 4.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
        assert!((lo - exact).abs() < 1e-9 && (hi - exact).abs() < 1e-9, "{lo} {hi} {exact}");
        let (lo3, hi3) = rayleigh_bounds(&op, &phi.scaled(3.0)).unwrap();
        assert!((lo3 - lo).abs() < 1e-12 && (hi3 - hi).abs() < 1e-12);
    }

    #[test]
    fn perturbed_sine_bracket_straddles() {
        let g = Arc::new(Grid::interval(0.0, 1.0, 99).unwrap());
        let phi = GridFunction::from_fn(g, |x| (PI * x[0]).sin() + 0.1 * (2.0 * PI * x[0]).sin())
            .unwrap()
            .with_zero_boundary();
        let (lo, hi) = rayleigh_bounds(&OperatorSpec::laplacian(1).unwrap(), &phi).unwrap();
        assert!(lo < PI * PI && PI * PI < hi);
    }

    #[test]
    fn sign_change_is_rejected() {
        let g = Arc::new(Grid::interval(0.0, 1.0, 9).unwrap());
        let phi = GridFunction::from_fn(g, |x| (2.0 * PI * x[0]).sin() + 0.01).unwrap();
        assert!(rayleigh_bounds(&OperatorSpec::laplacian(1).unwrap(), &phi).is_err());
    }

    #[test]
    fn pucci_minus_half_eigenvalues_coarse() {
        let g = Arc::new(Grid::interval(0.0, PI, 101).unwrap());
        let op = OperatorSpec::pucci_minus(1.0, 2.0).unwrap();
        let (p, m) = half_eigenpairs(&op, g, &EigenOptions::default()).unwrap();
        assert!(p.converged && m.converged);
        assert!((p.lambda - 1.0).abs() < 1e-3, "{}", p.lambda);
        assert!((m.lambda - 2.0).abs() < 1e-3, "{}", m.lambda);
        assert!(p.rayleigh_lo <= p.lambda + 1e-9 && p.lambda <= p.rayleigh_hi + 1e-9);
    }
}
