//! Dirichlet problem F(u) - lambda u = sin for P- on (0, pi), below,
//! inside and above the window between the half-eigenvalues.

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::solvers::{solve_dirichlet, SolveOptions};
use halfeig::{Grid, GridFunction, OperatorSpec};

fn main() -> halfeig::Result<()> {
    let grid = Arc::new(Grid::interval(0.0, PI, 201)?);
    let op = OperatorSpec::pucci_minus(1.0, 2.0)?;
    let f = GridFunction::from_fn(grid, |x| x[0].sin())?.with_zero_boundary();
    for lambda in [0.5, 1.5, 2.5] {
        let r = solve_dirichlet(&op, lambda, &f, &SolveOptions::default())?;
        if r.converged {
            println!(
                "lambda = {lambda}: solved, u in [{:.4}, {:.4}]",
                r.u.interior_min(),
                r.u.interior_max()
            );
        } else {
            println!("lambda = {lambda}: no solution found, residual floor {:.2e}", r.residual_floor());
        }
    }
    Ok(())
}
