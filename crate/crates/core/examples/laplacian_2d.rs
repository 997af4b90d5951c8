//! Principal eigenvalue of the Laplacian on the square (0, pi)^2.

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::solvers::{principal_eigenpair, EigenOptions};
use halfeig::{EigenSign, Grid, OperatorSpec};

fn main() -> halfeig::Result<()> {
    let op = OperatorSpec::laplacian(2)?;
    for n in [15, 31, 63] {
        let grid = Arc::new(Grid::square(0.0, PI, n)?);
        let p = principal_eigenpair(&op, grid, EigenSign::Positive, &EigenOptions::default())?;
        println!("n = {n:3}  lambda1 = {:.8}  error = {:.2e}", p.lambda, (p.lambda - 2.0).abs());
    }
    Ok(())
}
