//! Half-eigenvalues along the homotopy from P- to Gamma times the Laplacian.

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::solvers::{continuation_sweep, EigenOptions};
use halfeig::{Grid, OperatorSpec};

fn main() -> halfeig::Result<()> {
    let grid = Arc::new(Grid::interval(0.0, PI, 201)?);
    let op = OperatorSpec::pucci_minus(1.0, 2.0)?;
    let table = continuation_sweep(&op, 6, grid, &EigenOptions::default())?;
    for r in &table.rows {
        println!("s = {:.1}  lambda+ = {:.6}  lambda- = {:.6}", r.s, r.lambda_plus, r.lambda_minus);
    }
    println!("complete = {}  max jump = {:.4}", table.complete(), table.max_jump());
    Ok(())
}
