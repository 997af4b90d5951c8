//! The two principal half-eigenvalues of P- on (0, pi).

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::solvers::{half_eigenpairs, EigenOptions};
use halfeig::{Grid, OperatorSpec};

fn main() -> halfeig::Result<()> {
    let grid = Arc::new(Grid::interval(0.0, PI, 401)?);
    let op = OperatorSpec::pucci_minus(1.0, 2.0)?;
    let (plus, minus) = half_eigenpairs(&op, grid, &EigenOptions::default())?;
    for p in [&plus, &minus] {
        println!(
            "lambda1{} = {:.8}  residual = {:.1e}  bracket = [{:.8}, {:.8}]  iterations = {}",
            p.sign.symbol(),
            p.lambda,
            p.residual,
            p.rayleigh_lo,
            p.rayleigh_hi,
            p.iterations
        );
    }
    println!("continuum values: gamma = 1, Gamma = 2");
    Ok(())
}
