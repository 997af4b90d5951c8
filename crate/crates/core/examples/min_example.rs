//! F(u'') = min(u'', 2u'') on (0, 1): the half-eigenvalues differ by a factor two.

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::operator::InfSup;
use halfeig::solvers::{half_eigenpairs, EigenOptions};
use halfeig::{Grid, LinearCoeffs, OperatorSpec};

fn main() -> halfeig::Result<()> {
    let lin = |a: f64| LinearCoeffs::constant(&[a], &[], 0.0);
    let op = OperatorSpec::inf_sup(InfSup::inf_of(vec![lin(1.0)?, lin(2.0)?])?)?;
    let grid = Arc::new(Grid::interval(0.0, 1.0, 401)?);
    let (plus, minus) = half_eigenpairs(&op, grid, &EigenOptions::default())?;
    println!("lambda1+ = {:.6}  (pi^2 = {:.6})", plus.lambda, PI * PI);
    println!("lambda1- = {:.6}  (2 pi^2 = {:.6})", minus.lambda, 2.0 * PI * PI);
    Ok(())
}
