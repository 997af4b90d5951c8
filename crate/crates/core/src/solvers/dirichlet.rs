//! Policy iteration for `F_h(u) - λ u = f` with Dirichlet data.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretization::{linearize_with, select_stencil, Choice, Scheme};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, NO_NODE};
use crate::linalg::{BandLu, BandMatrix};
use crate::operator::OperatorSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Sup-norm residual target.
    pub tol: f64,
    pub max_iter: usize,
    /// Step fractions tried in order by the line search.
    pub damping: Vec<f64>,
    /// Number of starting points tried: 0, +bump, -bump, then random ones.
    pub restarts: usize,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 60,
            damping: vec![1.0, 0.5, 0.25, 0.125, 0.0625],
            restarts: 4,
            seed: 0,
            scheme: Scheme::Upwind,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || self.restarts == 0 {
            return Err(Error::InvalidInput(
                "tol must be positive, max_iter and restarts at least 1".into(),
            ));
        }
        if self.damping.is_empty() || self.damping.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return Err(Error::InvalidInput("damping factors must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    Zero,
    PlusBump,
    MinusBump,
    Random,
    Given,
}

/// One policy-iteration run from a single starting point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub start: StartKind,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    /// The last iterate reproduced its own policy, so it solves the discrete
    /// system up to rounding.
    pub policy_fixed_point: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u: GridFunction,
    pub converged: bool,
    /// Residual history of the reported attempt, starting with the initial
    /// residual.
    pub residual_history: Vec<f64>,
    pub restarts_used: usize,
    /// Number of nodes whose policy changed, per iteration.
    pub policy_changes: Vec<usize>,
    /// `‖u‖∞ / (1 + ‖f‖_p)` with `p = dim + 1`.
    pub bound_check: f64,
    pub attempts: Vec<Attempt>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history is never empty")
    }

    pub fn policy_fixed_point(&self) -> bool {
        self.attempts.last().is_some_and(|a| a.policy_fixed_point)
    }

    /// Smallest final residual over all attempts.
    pub fn residual_floor(&self) -> f64 {
        self.attempts
            .iter()
            .map(|a| a.final_residual)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn summary(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "converged: {}", self.converged);
        let _ = writeln!(s, "final_residual: {:e}", self.final_residual());
        let _ = writeln!(s, "bound_check: {:e}", self.bound_check);
        let _ = writeln!(s, "restarts_used: {}", self.restarts_used);
        let _ = writeln!(s, "attempts:");
        for a in &self.attempts {
            let _ = writeln!(
                s,
                "  {:?}: converged={} iterations={} residual={:e}{}",
                a.start,
                a.converged,
                a.iterations,
                a.final_residual,
                a.error.as_deref().map(|e| format!(" error={e}")).unwrap_or_default()
            );
        }
        let _ = writeln!(s, "residual_history:");
        for r in &self.residual_history {
            let _ = writeln!(s, "  {r:e}");
        }
        s
    }
}

struct Cached {
    policy: Vec<Choice>,
    lambda: f64,
    lu: BandLu,
}

/// Reusable solver for one operator on one grid. Keeps the last
/// factorization so repeated solves with an unchanged policy cost one
/// back-substitution.
pub struct DirichletSolver {
    op: OperatorSpec,
    grid: Arc<Grid>,
    opts: SolveOptions,
    cache: Option<Cached>,
}

struct RunOutcome {
    u: GridFunction,
    history: Vec<f64>,
    policy_changes: Vec<usize>,
    attempt: Attempt,
}

impl DirichletSolver {
    pub fn new(op: OperatorSpec, grid: Arc<Grid>, opts: SolveOptions) -> Result<Self> {
        op.validate()?;
        opts.validate()?;
        if let Some(d) = op.dim() {
            if d != grid.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: grid.dim(),
                });
            }
        }
        Ok(DirichletSolver {
            op,
            grid,
            opts,
            cache: None,
        })
    }

    pub fn op(&self) -> &OperatorSpec {
        &self.op
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn options(&self) -> &SolveOptions {
        &self.opts
    }

    /// `max over interior of |F_h(u) - λu - f|`.
    pub fn residual(&self, u: &GridFunction, lambda: f64, f: &GridFunction) -> Result<f64> {
        let mut worst = 0.0f64;
        for node in self.grid.interior_nodes() {
            let (st, _) = select_stencil(&self.op, u, node, self.opts.scheme)?;
            let v = st.apply(u.values(), node, self.grid.neighbors(node));
            let r = v - lambda * u.values()[node] - f.values()[node];
            if !r.is_finite() {
                return Ok(f64::INFINITY);
            }
            worst = worst.max(r.abs());
        }
        Ok(worst)
    }

    /// Multi-start solve with zero boundary values.
    pub fn solve(&mut self, lambda: f64, f: &GridFunction) -> Result<SolveReport> {
        let zero = GridFunction::zeros(self.grid.clone());
        self.solve_with_boundary(lambda, f, &zero)
    }

    /// Multi-start solve; boundary values are taken from `boundary`.
    pub fn solve_with_boundary(
        &mut self,
        lambda: f64,
        f: &GridFunction,
        boundary: &GridFunction,
    ) -> Result<SolveReport> {
        self.check_inputs(lambda, f, boundary)?;
        let starts = self.starts(f, boundary);
        let mut attempts = Vec::new();
        let mut best: Option<RunOutcome> = None;
        for (k, (kind, u0)) in starts.into_iter().enumerate() {
            let run = self.run(lambda, f, u0, kind)?;
            attempts.push(run.attempt.clone());
            let converged = run.attempt.converged;
            let better = best
                .as_ref()
                .is_none_or(|b| run.attempt.final_residual < b.attempt.final_residual);
            if converged || better {
                best = Some(run);
            }
            if converged {
                return Ok(self.report(best.expect("set above"), f, attempts, k));
            }
        }
        let n = attempts.len();
        Ok(self.report(best.expect("at least one start"), f, attempts, n.saturating_sub(1)))
    }

    /// Single run warm-started from `initial` (its boundary values are used
    /// as Dirichlet data).
    pub fn solve_from(&mut self, lambda: f64, f: &GridFunction, initial: &GridFunction) -> Result<SolveReport> {
        self.check_inputs(lambda, f, initial)?;
        let run = self.run(lambda, f, initial.clone(), StartKind::Given)?;
        let attempts = vec![run.attempt.clone()];
        Ok(self.report(run, f, attempts, 0))
    }

    fn check_inputs(&self, lambda: f64, f: &GridFunction, boundary: &GridFunction) -> Result<()> {
        if !lambda.is_finite() {
            return Err(Error::InvalidInput("lambda must be finite".into()));
        }
        for g in [f, boundary] {
            if g.grid().as_ref() != self.grid.as_ref() {
                return Err(Error::InvalidInput("grid function lives on a different grid".into()));
            }
        }
        Ok(())
    }

    fn report(&self, run: RunOutcome, f: &GridFunction, attempts: Vec<Attempt>, restarts_used: usize) -> SolveReport {
        let p = (self.grid.dim() + 1) as f64;
        let bound_check = run.u.interior_sup_norm() / (1.0 + f.lp_norm(p));
        SolveReport {
            converged: run.attempt.converged,
            u: run.u,
            residual_history: run.history,
            restarts_used,
            policy_changes: run.policy_changes,
            bound_check,
            attempts,
        }
    }

    fn starts(&self, f: &GridFunction, boundary: &GridFunction) -> Vec<(StartKind, GridFunction)> {
        let amp = f.interior_sup_norm().max(1.0);
        let tent = GridFunction::tent(self.grid.clone());
        let with_boundary = |interior: &GridFunction| {
            let mut u = interior.clone();
            let n = self.grid.num_interior();
            u.values_mut()[n..].copy_from_slice(&boundary.values()[n..]);
            u
        };
        let mut out = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        for k in 0..self.opts.restarts {
            let (kind, u) = match k {
                0 => (StartKind::Zero, GridFunction::zeros(self.grid.clone())),
                1 => (StartKind::PlusBump, tent.scaled(amp)),
                2 => (StartKind::MinusBump, tent.scaled(-amp)),
                _ => {
                    let mut u = GridFunction::zeros(self.grid.clone());
                    for v in u.interior_mut() {
                        *v = amp * rng.random_range(-1.0..1.0);
                    }
                    (StartKind::Random, u)
                }
            };
            out.push((kind, with_boundary(&u)));
        }
        out
    }

    fn factor(&mut self, policy: &[Choice], rows: &[crate::discretization::Stencil], lambda: f64) -> Result<()> {
        if let Some(c) = &self.cache {
            if c.lambda == lambda && c.policy == policy {
                return Ok(());
            }
        }
        let grid = &self.grid;
        let n = grid.num_interior();
        let bw = if grid.dim() == 1 { 1 } else { grid.n_interior_per_axis() + 1 };
        let mut m = BandMatrix::zeros(n, bw, bw);
        for (i, st) in rows.iter().enumerate() {
            m.add(i, i, st.center - lambda);
            for (c, &nb) in st.coef.iter().zip(grid.neighbors(i)) {
                if *c != 0.0 && nb != NO_NODE && grid.is_interior(nb) {
                    m.add(i, nb, *c);
                }
            }
        }
        self.cache = None;
        let lu = m.factor()?;
        self.cache = Some(Cached {
            policy: policy.to_vec(),
            lambda,
            lu,
        });
        Ok(())
    }

    fn run(&mut self, lambda: f64, f: &GridFunction, mut u: GridFunction, start: StartKind) -> Result<RunOutcome> {
        let n = self.grid.num_interior();
        let mut r = self.residual(&u, lambda, f)?;
        let mut history = vec![r];
        let mut policy_changes = Vec::new();
        let mut prev_policy: Option<Vec<Choice>> = None;
        let mut attempt = Attempt {
            start,
            converged: false,
            iterations: 0,
            final_residual: r,
            policy_fixed_point: false,
            error: None,
        };
        for it in 0..self.opts.max_iter {
            if r <= self.opts.tol {
                attempt.converged = true;
                break;
            }
            attempt.iterations = it + 1;
            let lin = linearize_with(&self.op, &u, self.opts.scheme)?;
            let same_policy = prev_policy.as_deref() == Some(&lin.policy[..]);
            policy_changes.push(match &prev_policy {
                Some(p) => p.iter().zip(&lin.policy).filter(|(a, b)| a != b).count(),
                None => n,
            });
            if same_policy && attempt.policy_fixed_point {
                // the previous step already solved this policy exactly
                break;
            }
            if let Err(e) = self.factor(&lin.policy, &lin.rows, lambda) {
                attempt.error = Some(e.to_string());
                break;
            }
            let rhs: Vec<f64> = (0..n).map(|i| f.values()[i] - lin.rhs_shift[i]).collect();
            let target = self.cache.as_ref().expect("factored above").lu.solve(&rhs);
            if target.iter().any(|v| !v.is_finite()) {
                attempt.error = Some("non-finite linear solve".into());
                break;
            }
            let mut accepted: Option<(GridFunction, f64, f64)> = None;
            let mut fallback: Option<(GridFunction, f64, f64)> = None;
            for &t in &self.opts.damping {
                let mut cand = u.clone();
                for (v, w) in cand.interior_mut().iter_mut().zip(&target) {
                    *v += t * (w - *v);
                }
                let rc = self.residual(&cand, lambda, f)?;
                if rc < r {
                    accepted = Some((cand, rc, t));
                    break;
                }
                if fallback.is_none() {
                    fallback = Some((cand, rc, t));
                }
            }
            // nonmonotone full step when no damping factor decreases the residual
            let (next, rn, t) = accepted.or(fallback).expect("damping is non-empty");
            attempt.policy_fixed_point =
                t == 1.0 && linearize_with(&self.op, &next, self.opts.scheme)?.policy == lin.policy;
            u = next;
            r = rn;
            history.push(r);
            prev_policy = Some(lin.policy);
            if !r.is_finite() {
                attempt.error = Some("residual overflow".into());
                break;
            }
        }
        if r <= self.opts.tol {
            attempt.converged = true;
        }
        attempt.final_residual = r;
        Ok(RunOutcome {
            u,
            history,
            policy_changes,
            attempt,
        })
    }
}

/// One-shot multi-start solve of `F_h(u) - λu = f`, `u = 0` on the boundary.
pub fn solve_dirichlet(
    op: &OperatorSpec,
    lambda: f64,
    f: &GridFunction,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    DirichletSolver::new(op.clone(), f.grid().clone(), opts.clone())?.solve(lambda, f)
}

/// As [`solve_dirichlet`] with boundary values taken from `boundary`.
pub fn solve_dirichlet_with_boundary(
    op: &OperatorSpec,
    lambda: f64,
    f: &GridFunction,
    boundary: &GridFunction,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    DirichletSolver::new(op.clone(), f.grid().clone(), opts.clone())?.solve_with_boundary(lambda, f, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn laplacian_parabola() {
        let g = Arc::new(Grid::interval(0.0, 1.0, 99).unwrap());
        let f = GridFunction::from_fn(g.clone(), |_| 2.0).unwrap().with_zero_boundary();
        let op = OperatorSpec::laplacian(1).unwrap();
        let rep = solve_dirichlet(&op, 0.0, &f, &SolveOptions::default()).unwrap();
        assert!(rep.converged);
        for node in g.interior_nodes() {
            let x = g.coords(node)[0];
            assert!((rep.u.values()[node] - x * (1.0 - x)).abs() < 1e-10);
        }
        assert_eq!(rep.residual_history.len(), 2);
    }

    #[test]
    fn pucci_minus_below_first_eigenvalue_is_nonnegative() {
        let g = Arc::new(Grid::interval(0.0, PI, 101).unwrap());
        let f = GridFunction::from_fn(g.clone(), |x| x[0].sin()).unwrap().with_zero_boundary();
        let op = OperatorSpec::pucci_minus(1.0, 2.0).unwrap();
        let rep = solve_dirichlet(&op, 0.0, &f, &SolveOptions::default()).unwrap();
        assert!(rep.converged);
        assert!(rep.u.interior_min() >= 0.0);
        // -u'' = sin exactly solved by sin on the concave branch, up to O(h²)
        assert!((rep.u.interior_max() - 1.0).abs() < 1e-3);
    }
}
