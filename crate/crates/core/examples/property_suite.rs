//! Runs the full property suite on P- in one dimension.

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::verification::{run_suite, SuiteConfig};
use halfeig::{Grid, OperatorSpec};

fn main() -> halfeig::Result<()> {
    let op = OperatorSpec::pucci_minus(1.0, 2.0)?;
    let grid = Arc::new(Grid::interval(0.0, PI, 101)?);
    let mut cfg = SuiteConfig::new(op, grid, 0);
    cfg.samples = 200;
    cfg.trials = 10;
    for r in run_suite(&cfg) {
        let verdict = match (&r.skipped, r.passed) {
            (Some(_), _) => "SKIP",
            (None, true) => "PASS",
            (None, false) => "FAIL",
        };
        println!("{verdict}  {:24} margin {:+.3e}", r.name, r.margin);
    }
    Ok(())
}
