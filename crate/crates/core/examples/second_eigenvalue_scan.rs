//! Shooting scan for the first sign-changing eigenvalue of P- on (0, pi).

use std::f64::consts::PI;

use halfeig::solvers::{lambda2_scan_1d, ShootOptions};
use halfeig::OperatorSpec;

fn main() -> halfeig::Result<()> {
    let op = OperatorSpec::pucci_minus(1.0, 2.0)?;
    let r = lambda2_scan_1d(&op, (0.0, PI), (2.01, 12.0), 100, &ShootOptions::default())?;
    for (lambda, slope, zeros) in &r.eigenvalues {
        println!("eigenvalue {lambda:.8}  initial slope {slope:+}  interior zeros {zeros}");
    }
    if let Some(l2) = r.lambda2_estimate {
        println!("lambda2 = {l2:.8}  (1 + sqrt 2)^2 = {:.8}", (1.0 + 2f64.sqrt()).powi(2));
    }
    Ok(())
}
