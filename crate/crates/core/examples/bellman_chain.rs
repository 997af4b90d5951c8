//! A Bellman operator sits between its members: its half-eigenvalues are
//! bracketed by the smallest and largest member eigenvalues.

use std::sync::Arc;

use halfeig::operator::InfSup;
use halfeig::solvers::EigenOptions;
use halfeig::verification::check_bellman_chain;
use halfeig::{Grid, LinearCoeffs, OperatorSpec};

fn main() -> halfeig::Result<()> {
    let lin = |a: f64, b: f64| LinearCoeffs::constant(&[a], &[b], 0.0);
    let op = OperatorSpec::inf_sup(InfSup::sup_of(vec![lin(1.0, 0.5)?, lin(2.0, 0.0)?, lin(1.5, -1.0)?])?)?;
    let grid = Arc::new(Grid::interval(0.0, 1.0, 201)?);
    let r = check_bellman_chain(&op, grid, &EigenOptions::default())?;
    println!("{}: passed = {}  margin = {:.3e}", r.name, r.passed, r.margin);
    println!("{}", r.detail);
    Ok(())
}
