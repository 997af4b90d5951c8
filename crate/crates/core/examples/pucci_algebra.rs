//! Pucci extremal operators on a few symmetric matrices.

use halfeig::operator::{pucci_minus, pucci_plus};
use halfeig::{Band, Jet, OperatorSpec, SymMatrix};

fn main() -> halfeig::Result<()> {
    let band = Band::ellipticity(1.0, 2.0)?;
    for m in [
        SymMatrix::new2(1.0, 0.0, 1.0),
        SymMatrix::new2(1.0, 0.0, -1.0),
        SymMatrix::new2(0.0, 2.0, 0.0),
    ] {
        let [e1, e2] = m.eigenvalues();
        println!(
            "eig = ({e1:+.3}, {e2:+.3})  P- = {:+.3}  P+ = {:+.3}",
            pucci_minus(&m, &band),
            pucci_plus(&m, &band)
        );
    }

    // positive homogeneity of the operator form
    let op = OperatorSpec::pucci_minus(1.0, 2.0)?;
    let j = Jet::new(SymMatrix::new2(0.5, -1.0, 2.0), [0.0, 0.0], 0.3, [0.0, 0.0]);
    println!("F(3J) = {:.6}  3F(J) = {:.6}", op.eval(&j.scale(3.0))?, 3.0 * op.eval(&j)?);
    Ok(())
}
