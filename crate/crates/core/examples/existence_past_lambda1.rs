//! Solvability between lambda1- and the second eigenvalue of P- on (0, pi)
//! for a one-signed bump source.

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::solvers::{solve_dirichlet, SolveOptions};
use halfeig::{Grid, GridFunction, OperatorSpec, ScalarField};

fn main() -> halfeig::Result<()> {
    let grid = Arc::new(Grid::interval(0.0, PI, 401)?);
    let op = OperatorSpec::pucci_minus(1.0, 2.0)?;
    let field: ScalarField = "bump(0.5*pi, 0.25*pi)".parse()?;
    let f = GridFunction::from_field(grid, &field)?.with_zero_boundary();
    let lambda2 = (1.0 + 2f64.sqrt()).powi(2);
    for lambda in [2.5, 4.0, 5.5] {
        let r = solve_dirichlet(&op, lambda, &f, &SolveOptions::default())?;
        println!(
            "lambda = {lambda} (< {lambda2:.4}): converged = {}, residual = {:.1e}, u in [{:.4}, {:.4}]",
            r.converged,
            r.final_residual(),
            r.u.interior_min(),
            r.u.interior_max()
        );
    }
    Ok(())
}
