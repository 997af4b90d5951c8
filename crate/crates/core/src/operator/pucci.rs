use serde::{Deserialize, Serialize};

use super::matrix::SymMatrix;
use crate::error::{Error, Result};

/// Structure constants of a uniformly elliptic operator: ellipticity
/// `0 < gamma <= Gamma`, gradient bound `delta1` and zeroth-order bound
/// `delta0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BandRepr", into = "BandRepr")]
pub struct Band {
    pub gamma: f64,
    pub big_gamma: f64,
    pub delta1: f64,
    pub delta0: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandRepr {
    gamma: f64,
    #[serde(rename = "Gamma")]
    big_gamma: f64,
    #[serde(default)]
    delta1: f64,
    #[serde(default)]
    delta0: f64,
}

impl TryFrom<BandRepr> for Band {
    type Error = Error;
    fn try_from(r: BandRepr) -> Result<Band> {
        Band::new(r.gamma, r.big_gamma, r.delta1, r.delta0)
    }
}

impl From<Band> for BandRepr {
    fn from(b: Band) -> BandRepr {
        BandRepr {
            gamma: b.gamma,
            big_gamma: b.big_gamma,
            delta1: b.delta1,
            delta0: b.delta0,
        }
    }
}

impl Band {
    pub fn new(gamma: f64, big_gamma: f64, delta1: f64, delta0: f64) -> Result<Band> {
        let finite = [gamma, big_gamma, delta1, delta0].iter().all(|v| v.is_finite());
        if !finite || gamma <= 0.0 || big_gamma < gamma || delta1 < 0.0 || delta0 < 0.0 {
            return Err(Error::InvalidBand(format!(
                "need 0 < gamma <= Gamma and delta1, delta0 >= 0, got gamma={gamma}, \
                 Gamma={big_gamma}, delta1={delta1}, delta0={delta0}"
            )));
        }
        Ok(Band {
            gamma,
            big_gamma,
            delta1,
            delta0,
        })
    }

    /// Pure second-order band `[gamma, Gamma]`.
    pub fn ellipticity(gamma: f64, big_gamma: f64) -> Result<Band> {
        Band::new(gamma, big_gamma, 0.0, 0.0)
    }

    /// Smallest band containing both.
    pub fn hull(&self, other: &Band) -> Band {
        Band {
            gamma: self.gamma.min(other.gamma),
            big_gamma: self.big_gamma.max(other.big_gamma),
            delta1: self.delta1.max(other.delta1),
            delta0: self.delta0.max(other.delta0),
        }
    }
}

/// `P⁺(M) = sup { -tr(AM) : A in [[gamma, Gamma]] }`, evaluated in closed form
/// from the eigenvalues of `M`.
pub fn pucci_plus(m: &SymMatrix, band: &Band) -> f64 {
    m.eigenvalues()
        .iter()
        .map(|&e| if e > 0.0 { -band.gamma * e } else { -band.big_gamma * e })
        .sum()
}

/// `P⁻(M) = inf { -tr(AM) : A in [[gamma, Gamma]] }`.
pub fn pucci_minus(m: &SymMatrix, band: &Band) -> f64 {
    m.eigenvalues()
        .iter()
        .map(|&e| if e > 0.0 { -band.big_gamma * e } else { -band.gamma * e })
        .sum()
}

/// Corner diffusion matrices `(a11, a12, a22)` used by the discrete Pucci
/// operators. In 1D these are `gamma` and `Gamma`. In 2D they are the four
/// axis-aligned corners followed by the two diagonal-frame corners with
/// unequal eigenvalues; the diagonal-frame matrices are diagonally dominant
/// so every member has a monotone wide stencil.
pub fn corner_matrices(dim: usize, band: &Band) -> Vec<[f64; 3]> {
    let (lo, hi) = (band.gamma, band.big_gamma);
    if dim == 1 {
        return vec![[lo, 0.0, 0.0], [hi, 0.0, 0.0]];
    }
    let mean = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut out = vec![[lo, 0.0, lo], [lo, 0.0, hi], [hi, 0.0, lo], [hi, 0.0, hi]];
    if half > 0.0 {
        out.push([mean, half, mean]);
        out.push([mean, -half, mean]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band12() -> Band {
        Band::ellipticity(1.0, 2.0).unwrap()
    }

    #[test]
    fn spec_values() {
        let b = band12();
        assert_eq!(pucci_plus(&SymMatrix::zeros(2).unwrap(), &b), 0.0);
        assert_eq!(pucci_plus(&SymMatrix::new2(1.0, 0.0, -1.0), &b), 1.0);
        assert_eq!(pucci_plus(&SymMatrix::new2(-1.0, 0.0, -1.0), &b), 4.0);
        assert_eq!(pucci_minus(&SymMatrix::zeros(2).unwrap(), &b), 0.0);
        assert_eq!(pucci_minus(&SymMatrix::new2(1.0, 0.0, 1.0), &b), -4.0);
        assert_eq!(pucci_minus(&SymMatrix::new2(1.0, 0.0, -1.0), &b), -1.0);
    }

    #[test]
    fn invalid_bands_rejected() {
        assert!(Band::new(2.0, 1.0, 0.0, 0.0).is_err());
        assert!(Band::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(Band::new(1.0, 1.0, -1.0, 0.0).is_err());
        assert!(Band::new(1.0, f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn corners_are_diagonally_dominant() {
        for c in corner_matrices(2, &band12()) {
            assert!(c[0] >= c[1].abs() && c[2] >= c[1].abs());
        }
        assert_eq!(corner_matrices(2, &Band::ellipticity(1.0, 1.0).unwrap()).len(), 4);
    }
}
