//! Pointwise evaluation and symbolic composition of positively homogeneous
//! uniformly elliptic operators.

mod checks;
mod field;
mod matrix;
mod pucci;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_homogeneity, check_structure, CheckFailure, HomogeneityReport, StructureReport,
};
pub use field::{parse_constant, ScalarField};
pub use matrix::{Jet, SymMatrix};
pub use pucci::{corner_matrices, pucci_minus, pucci_plus, Band};

use crate::error::{Error, Result};

/// Coefficients of `L u = -tr(A(x) D²u) + b(x)·Du + c(x) u`.
///
/// `a` holds `[a11]` in 1D and `[a11, a12, a22]` in 2D. The band is the
/// declared structure band; when absent it is inferred exactly for constant
/// coefficients, and [`LinearCoeffs::infer_band`] samples variable ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearCoeffs {
    pub a: Vec<ScalarField>,
    #[serde(default)]
    pub b: Vec<ScalarField>,
    #[serde(default = "zero_field")]
    pub c: ScalarField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<Band>,
}

fn zero_field() -> ScalarField {
    ScalarField::Const(0.0)
}

impl LinearCoeffs {
    /// Constant coefficients. `a` is `[a11]` or `[a11, a12, a22]`.
    pub fn constant(a: &[f64], b: &[f64], c: f64) -> Result<Self> {
        let mut out = LinearCoeffs {
            a: a.iter().map(|&v| ScalarField::Const(v)).collect(),
            b: b.iter().map(|&v| ScalarField::Const(v)).collect(),
            c: ScalarField::Const(c),
            band: None,
        };
        out.validate()?;
        out.band = Some(out.sample_band(std::iter::once([0.0, 0.0]))?);
        Ok(out)
    }

    /// `-k Δ` in the given dimension.
    pub fn scaled_laplacian(dim: usize, k: f64) -> Result<Self> {
        match dim {
            1 => Self::constant(&[k], &[0.0], 0.0),
            2 => Self::constant(&[k, 0.0, k], &[0.0, 0.0], 0.0),
            _ => Err(Error::Unsupported(format!("dimension {dim}"))),
        }
    }

    pub fn with_band(mut self, band: Band) -> Self {
        self.band = Some(band);
        self
    }

    pub fn dim(&self) -> usize {
        if self.a.len() == 3 {
            2
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = match self.a.len() {
            1 => 1,
            3 => 2,
            n => {
                return Err(Error::InvalidOperator(format!(
                    "diffusion needs 1 (1D) or 3 (2D) entries, got {n}"
                )))
            }
        };
        if !self.b.is_empty() && self.b.len() != dim {
            return Err(Error::InvalidOperator(format!(
                "drift has {} entries for a {dim}D operator",
                self.b.len()
            )));
        }
        Ok(())
    }

    fn is_constant(&self) -> bool {
        self.a.iter().chain(&self.b).chain(std::iter::once(&self.c)).all(|f| f.constant_value().is_some())
    }

    /// Coefficient values `(A, b, c)` at `x`.
    pub fn at(&self, x: &[f64; 2]) -> (SymMatrix, [f64; 2], f64) {
        let dim = self.dim();
        let a = if dim == 1 {
            SymMatrix::scalar(self.a[0].eval(x, 1))
        } else {
            SymMatrix::new2(self.a[0].eval(x, 2), self.a[1].eval(x, 2), self.a[2].eval(x, 2))
        };
        let mut b = [0.0; 2];
        for (bi, f) in b.iter_mut().zip(&self.b) {
            *bi = f.eval(x, dim);
        }
        (a, b, self.c.eval(x, dim))
    }

    fn sample_band(&self, points: impl Iterator<Item = [f64; 2]>) -> Result<Band> {
        let (mut lo, mut hi, mut d1, mut d0) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
        for x in points {
            let (a, b, c) = self.at(&x);
            let e = a.eigenvalues();
            let e = if self.dim() == 1 { &e[..1] } else { &e[..] };
            for &v in e {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            d1 = d1.max(b[0].hypot(b[1]));
            d0 = d0.max(c.abs());
        }
        Band::new(lo, hi, d1, d0)
    }

    /// Infers the band from coefficient samples unless one was declared.
    pub fn infer_band(&mut self, points: impl Iterator<Item = [f64; 2]>) -> Result<()> {
        if self.band.is_none() {
            self.band = Some(self.sample_band(points)?);
        }
        Ok(())
    }

    pub fn resolved_band(&self) -> Result<Band> {
        if let Some(b) = self.band {
            return Ok(b);
        }
        if self.is_constant() {
            return self.sample_band(std::iter::once([0.0, 0.0]));
        }
        Err(Error::InvalidOperator(
            "variable-coefficient linear operator needs a declared or inferred band".into(),
        ))
    }

    /// `-tr(A(x) M) + b(x)·p + c(x) z`.
    pub fn eval(&self, jet: &Jet) -> Result<f64> {
        if jet.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: jet.dim(),
            });
        }
        let (a, b, c) = self.at(&jet.x);
        Ok(-a.trace_product(&jet.m) + b[0] * jet.p[0] + b[1] * jet.p[1] + c * jet.z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub members: Vec<LinearCoeffs>,
}

/// `inf over families of sup over members` of linear operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfSup {
    pub families: Vec<Family>,
}

impl InfSup {
    pub fn new(families: Vec<Vec<LinearCoeffs>>) -> Result<Self> {
        let out = InfSup {
            families: families.into_iter().map(|members| Family { members }).collect(),
        };
        out.validate()?;
        Ok(out)
    }

    /// Pure sup (convex, Bellman) family.
    pub fn sup_of(members: Vec<LinearCoeffs>) -> Result<Self> {
        Self::new(vec![members])
    }

    /// Pure inf (concave) family.
    pub fn inf_of(members: Vec<LinearCoeffs>) -> Result<Self> {
        Self::new(members.into_iter().map(|m| vec![m]).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.families.iter().any(|f| f.members.is_empty()) {
            return Err(Error::InvalidOperator(
                "inf-sup needs at least one family and every family needs a member".into(),
            ));
        }
        let dim = self.families[0].members[0].dim();
        for m in self.members() {
            m.validate()?;
            if m.dim() != dim {
                return Err(Error::InvalidOperator("inf-sup members of mixed dimension".into()));
            }
        }
        Ok(())
    }

    pub fn members(&self) -> impl Iterator<Item = &LinearCoeffs> {
        self.families.iter().flat_map(|f| f.members.iter())
    }

    pub fn is_pure_sup(&self) -> bool {
        self.families.len() == 1
    }

    pub fn is_pure_inf(&self) -> bool {
        self.families.iter().all(|f| f.members.len() == 1)
    }

    pub fn eval(&self, jet: &Jet) -> Result<f64> {
        let mut best = f64::INFINITY;
        for fam in &self.families {
            let mut inner = f64::NEG_INFINITY;
            for m in &fam.members {
                inner = inner.max(m.eval(jet)?);
            }
            best = best.min(inner);
        }
        Ok(best)
    }

    pub fn band(&self) -> Result<Band> {
        let mut it = self.members();
        let mut band = it.next().expect("validated non-empty").resolved_band()?;
        for m in it {
            band = band.hull(&m.resolved_band()?);
        }
        Ok(band)
    }

    pub fn infer_bands(&mut self, points: &[[f64; 2]]) -> Result<()> {
        for fam in &mut self.families {
            for m in &mut fam.members {
                m.infer_band(points.iter().copied())?;
            }
        }
        Ok(())
    }
}

/// Which side of the flattened envelope pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeSide {
    Upper,
    Lower,
}

/// Symbolic description of a homogeneous elliptic operator `F(M, p, z, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorSpec {
    PucciPlus(Band),
    PucciMinus(Band),
    Linear(LinearCoeffs),
    InfSup(InfSup),
    /// `F - lambda z`.
    Shift { inner: Box<OperatorSpec>, lambda: f64 },
    /// `-s Gamma tr(M) + (1 - s) F`.
    Homotopy {
        inner: Box<OperatorSpec>,
        s: f64,
        #[serde(rename = "Gamma")]
        big_gamma: f64,
    },
    /// Sup over all members of an inf-sup family.
    UpperEnvelope(InfSup),
    /// Inf over all members of an inf-sup family.
    LowerEnvelope(InfSup),
    /// `-F(-M, -p, -z, x)`.
    Reflect { inner: Box<OperatorSpec> },
}

impl OperatorSpec {
    pub fn pucci_plus(gamma: f64, big_gamma: f64) -> Result<Self> {
        Ok(OperatorSpec::PucciPlus(Band::ellipticity(gamma, big_gamma)?))
    }

    pub fn pucci_minus(gamma: f64, big_gamma: f64) -> Result<Self> {
        Ok(OperatorSpec::PucciMinus(Band::ellipticity(gamma, big_gamma)?))
    }

    /// `-Δ` in 1D or 2D.
    pub fn laplacian(dim: usize) -> Result<Self> {
        Ok(OperatorSpec::Linear(LinearCoeffs::scaled_laplacian(dim, 1.0)?))
    }

    pub fn linear(coeffs: LinearCoeffs) -> Result<Self> {
        coeffs.validate()?;
        Ok(OperatorSpec::Linear(coeffs))
    }

    pub fn inf_sup(op: InfSup) -> Result<Self> {
        op.validate()?;
        Ok(OperatorSpec::InfSup(op))
    }

    pub fn shift(inner: OperatorSpec, lambda: f64) -> Self {
        OperatorSpec::Shift {
            inner: Box::new(inner),
            lambda,
        }
    }

    pub fn homotopy(inner: OperatorSpec, s: f64, big_gamma: f64) -> Result<Self> {
        let op = OperatorSpec::Homotopy {
            inner: Box::new(inner),
            s,
            big_gamma,
        };
        op.validate()?;
        Ok(op)
    }

    /// Recursively checks the variant invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::PucciPlus(b) | OperatorSpec::PucciMinus(b) => {
                Band::new(b.gamma, b.big_gamma, b.delta1, b.delta0).map(|_| ())
            }
            OperatorSpec::Linear(c) => c.validate(),
            OperatorSpec::InfSup(i)
            | OperatorSpec::UpperEnvelope(i)
            | OperatorSpec::LowerEnvelope(i) => i.validate(),
            OperatorSpec::Shift { inner, lambda } => {
                if !lambda.is_finite() {
                    return Err(Error::InvalidOperator("shift must be finite".into()));
                }
                inner.validate()
            }
            OperatorSpec::Homotopy {
                inner,
                s,
                big_gamma,
            } => {
                if !(0.0..=1.0).contains(s) {
                    return Err(Error::InvalidOperator(format!("homotopy s={s} outside [0, 1]")));
                }
                if !(big_gamma.is_finite() && *big_gamma > 0.0) {
                    return Err(Error::InvalidOperator("homotopy Gamma must be positive".into()));
                }
                inner.validate()
            }
            OperatorSpec::Reflect { inner } => inner.validate(),
        }
    }

    /// Spatial dimension fixed by linear coefficients, or `None` for
    /// dimension-free operators such as Pucci.
    pub fn dim(&self) -> Option<usize> {
        match self {
            OperatorSpec::PucciPlus(_) | OperatorSpec::PucciMinus(_) => None,
            OperatorSpec::Linear(c) => Some(c.dim()),
            OperatorSpec::InfSup(i)
            | OperatorSpec::UpperEnvelope(i)
            | OperatorSpec::LowerEnvelope(i) => i.members().next().map(|m| m.dim()),
            OperatorSpec::Shift { inner, .. }
            | OperatorSpec::Homotopy { inner, .. }
            | OperatorSpec::Reflect { inner } => inner.dim(),
        }
    }

    pub fn eval(&self, jet: &Jet) -> Result<f64> {
        if let Some(d) = self.dim() {
            if d != jet.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: jet.dim(),
                });
            }
        }
        match self {
            OperatorSpec::PucciPlus(b) => Ok(pucci_plus(&jet.m, b)),
            OperatorSpec::PucciMinus(b) => Ok(pucci_minus(&jet.m, b)),
            OperatorSpec::Linear(c) => c.eval(jet),
            OperatorSpec::InfSup(i) => i.eval(jet),
            OperatorSpec::Shift { inner, lambda } => Ok(inner.eval(jet)? - lambda * jet.z),
            OperatorSpec::Homotopy {
                inner,
                s,
                big_gamma,
            } => Ok(-s * big_gamma * jet.m.trace() + (1.0 - s) * inner.eval(jet)?),
            OperatorSpec::UpperEnvelope(i) => {
                let mut best = f64::NEG_INFINITY;
                for m in i.members() {
                    best = best.max(m.eval(jet)?);
                }
                Ok(best)
            }
            OperatorSpec::LowerEnvelope(i) => {
                let mut best = f64::INFINITY;
                for m in i.members() {
                    best = best.min(m.eval(jet)?);
                }
                Ok(best)
            }
            OperatorSpec::Reflect { inner } => Ok(-inner.eval(&jet.scale(-1.0))?),
        }
    }

    /// Structure band: componentwise hull over members, widened by shifts
    /// and interpolated by homotopies.
    pub fn band(&self) -> Result<Band> {
        match self {
            OperatorSpec::PucciPlus(b) | OperatorSpec::PucciMinus(b) => Ok(*b),
            OperatorSpec::Linear(c) => c.resolved_band(),
            OperatorSpec::InfSup(i)
            | OperatorSpec::UpperEnvelope(i)
            | OperatorSpec::LowerEnvelope(i) => i.band(),
            OperatorSpec::Shift { inner, lambda } => {
                let b = inner.band()?;
                Ok(Band {
                    delta0: b.delta0 + lambda.abs(),
                    ..b
                })
            }
            OperatorSpec::Homotopy {
                inner,
                s,
                big_gamma,
            } => {
                let b = inner.band()?;
                let lo = s * big_gamma + (1.0 - s) * b.gamma;
                let hi = s * big_gamma + (1.0 - s) * b.big_gamma;
                Band::new(lo.min(hi), lo.max(hi), (1.0 - s) * b.delta1, (1.0 - s) * b.delta0)
            }
            OperatorSpec::Reflect { inner } => inner.band(),
        }
    }

    /// Infers missing bands of variable-coefficient linear members by
    /// sampling at the given points.
    pub fn infer_bands(&mut self, points: &[[f64; 2]]) -> Result<()> {
        match self {
            OperatorSpec::Linear(c) => c.infer_band(points.iter().copied()),
            OperatorSpec::InfSup(i)
            | OperatorSpec::UpperEnvelope(i)
            | OperatorSpec::LowerEnvelope(i) => i.infer_bands(points),
            OperatorSpec::Shift { inner, .. }
            | OperatorSpec::Homotopy { inner, .. }
            | OperatorSpec::Reflect { inner } => inner.infer_bands(points),
            OperatorSpec::PucciPlus(_) | OperatorSpec::PucciMinus(_) => Ok(()),
        }
    }

    /// The operator `G(j) = -F(-j)`, simplified where a closed form exists.
    ///
    /// Half-eigenvalues swap under reflection: `λ₁⁺(G) = λ₁⁻(F)`.
    pub fn reflected(&self) -> OperatorSpec {
        match self {
            OperatorSpec::PucciPlus(b) => OperatorSpec::PucciMinus(*b),
            OperatorSpec::PucciMinus(b) => OperatorSpec::PucciPlus(*b),
            OperatorSpec::Linear(c) => OperatorSpec::Linear(c.clone()),
            OperatorSpec::Shift { inner, lambda } => OperatorSpec::Shift {
                inner: Box::new(inner.reflected()),
                lambda: *lambda,
            },
            OperatorSpec::Homotopy {
                inner,
                s,
                big_gamma,
            } => OperatorSpec::Homotopy {
                inner: Box::new(inner.reflected()),
                s: *s,
                big_gamma: *big_gamma,
            },
            OperatorSpec::UpperEnvelope(i) => OperatorSpec::LowerEnvelope(i.clone()),
            OperatorSpec::LowerEnvelope(i) => OperatorSpec::UpperEnvelope(i.clone()),
            OperatorSpec::Reflect { inner } => (**inner).clone(),
            OperatorSpec::InfSup(_) => OperatorSpec::Reflect {
                inner: Box::new(self.clone()),
            },
        }
    }

    /// Operator bounding differences from above: `F(j1) - F(j2) <= U(j1 - j2)`.
    ///
    /// Convex for every variant. For inf-sup families this is the flattened
    /// sup over all members; Pucci operators are bounded by `P⁺`.
    pub fn difference_bound(&self, side: EnvelopeSide) -> OperatorSpec {
        use EnvelopeSide::*;
        match (self, side) {
            (OperatorSpec::PucciPlus(b) | OperatorSpec::PucciMinus(b), Upper) => {
                OperatorSpec::PucciPlus(*b)
            }
            (OperatorSpec::PucciPlus(b) | OperatorSpec::PucciMinus(b), Lower) => {
                OperatorSpec::PucciMinus(*b)
            }
            (OperatorSpec::Linear(c), _) => OperatorSpec::Linear(c.clone()),
            (
                OperatorSpec::InfSup(i)
                | OperatorSpec::UpperEnvelope(i)
                | OperatorSpec::LowerEnvelope(i),
                Upper,
            ) => OperatorSpec::UpperEnvelope(i.clone()),
            (
                OperatorSpec::InfSup(i)
                | OperatorSpec::UpperEnvelope(i)
                | OperatorSpec::LowerEnvelope(i),
                Lower,
            ) => OperatorSpec::LowerEnvelope(i.clone()),
            (OperatorSpec::Shift { inner, lambda }, s) => OperatorSpec::Shift {
                inner: Box::new(inner.difference_bound(s)),
                lambda: *lambda,
            },
            (
                OperatorSpec::Homotopy {
                    inner,
                    s,
                    big_gamma,
                },
                side,
            ) => OperatorSpec::Homotopy {
                inner: Box::new(inner.difference_bound(side)),
                s: *s,
                big_gamma: *big_gamma,
            },
            (OperatorSpec::Reflect { inner }, side) => {
                let flipped = match side {
                    Upper => Lower,
                    Lower => Upper,
                };
                OperatorSpec::Reflect {
                    inner: Box::new(inner.difference_bound(flipped)),
                }
            }
        }
    }

    /// True if the operator is a pure sup of linear operators.
    pub fn as_pure_sup(&self) -> Option<&InfSup> {
        match self {
            OperatorSpec::InfSup(i) if i.is_pure_sup() => Some(i),
            OperatorSpec::UpperEnvelope(i) => Some(i),
            _ => None,
        }
    }

    /// All linear operators appearing directly in the description.
    pub fn linear_members(&self) -> Vec<LinearCoeffs> {
        match self {
            OperatorSpec::Linear(c) => vec![c.clone()],
            OperatorSpec::InfSup(i)
            | OperatorSpec::UpperEnvelope(i)
            | OperatorSpec::LowerEnvelope(i) => i.members().cloned().collect(),
            // -L(-u) = L u for linear L
            OperatorSpec::Reflect { inner } => inner.linear_members(),
            _ => Vec::new(),
        }
    }
}

/// Envelope of an inf-sup operator: the sup (upper) or inf (lower) over the
/// flattened member set.
///
/// Satisfies `lower(j1 - j2) <= F(j1) - F(j2) <= upper(j1 - j2)`, the upper
/// side is convex, the lower concave, and `upper(j) = -lower(-j)`. For pure
/// sup or pure inf families the matching side coincides with the operator.
pub fn star_envelope(op: &OperatorSpec, side: EnvelopeSide) -> Result<OperatorSpec> {
    match op {
        OperatorSpec::InfSup(i) => {
            i.validate()?;
            Ok(match side {
                EnvelopeSide::Upper => OperatorSpec::UpperEnvelope(i.clone()),
                EnvelopeSide::Lower => OperatorSpec::LowerEnvelope(i.clone()),
            })
        }
        other => Err(Error::InvalidOperator(format!(
            "envelopes are defined for inf-sup operators, got {}",
            other.kind_name()
        ))),
    }
}

impl OperatorSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            OperatorSpec::PucciPlus(_) => "pucci-plus",
            OperatorSpec::PucciMinus(_) => "pucci-minus",
            OperatorSpec::Linear(_) => "linear",
            OperatorSpec::InfSup(_) => "inf-sup",
            OperatorSpec::Shift { .. } => "shift",
            OperatorSpec::Homotopy { .. } => "homotopy",
            OperatorSpec::UpperEnvelope(_) => "upper-envelope",
            OperatorSpec::LowerEnvelope(_) => "lower-envelope",
            OperatorSpec::Reflect { .. } => "reflect",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min_example(dim: usize) -> OperatorSpec {
        OperatorSpec::inf_sup(
            InfSup::inf_of(vec![
                LinearCoeffs::scaled_laplacian(dim, 1.0).unwrap(),
                LinearCoeffs::scaled_laplacian(dim, 2.0).unwrap(),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn linear_eval() {
        let op = OperatorSpec::laplacian(1).unwrap();
        assert_eq!(op.eval(&Jet::scalar(2.0, 0.0, 0.0, 0.5)).unwrap(), -2.0);
    }

    #[test]
    fn min_of_laplacians() {
        let jet = Jet::new(SymMatrix::new2(-1.0, 0.0, -1.0), [0.0; 2], 0.0, [0.0; 2]);
        assert_eq!(min_example(2).eval(&jet).unwrap(), 2.0);
    }

    #[test]
    fn homotopy_endpoint_is_scaled_laplacian() {
        let op = OperatorSpec::homotopy(OperatorSpec::pucci_minus(1.0, 2.0).unwrap(), 1.0, 2.0).unwrap();
        let m = SymMatrix::new2(0.3, -0.7, 1.9);
        let jet = Jet::new(m, [0.0; 2], 0.0, [0.0; 2]);
        assert_eq!(op.eval(&jet).unwrap(), -2.0 * m.trace());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let op = OperatorSpec::laplacian(2).unwrap();
        assert!(matches!(
            op.eval(&Jet::scalar(1.0, 0.0, 0.0, 0.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn homotopy_rejects_s_out_of_range() {
        assert!(OperatorSpec::homotopy(OperatorSpec::laplacian(1).unwrap(), 1.5, 1.0).is_err());
    }

    #[test]
    fn envelope_of_min_example() {
        let op = min_example(2);
        let upper = star_envelope(&op, EnvelopeSide::Upper).unwrap();
        let m = SymMatrix::new2(0.5, 0.0, -2.0);
        let jet = Jet::new(m, [0.0; 2], 0.0, [0.0; 2]);
        let expected = (-m.trace()).max(-2.0 * m.trace());
        assert_eq!(upper.eval(&jet).unwrap(), expected);
        assert_eq!(upper.eval(&Jet::zero(2, [0.0; 2]).unwrap()).unwrap(), 0.0);
        assert!(star_envelope(&OperatorSpec::laplacian(1).unwrap(), EnvelopeSide::Upper).is_err());
    }

    #[test]
    fn pure_sup_envelope_is_itself() {
        let sup = OperatorSpec::inf_sup(
            InfSup::sup_of(vec![
                LinearCoeffs::constant(&[1.0], &[2.0], 0.0).unwrap(),
                LinearCoeffs::constant(&[1.0], &[-2.0], 0.0).unwrap(),
            ])
            .unwrap(),
        )
        .unwrap();
        let upper = star_envelope(&sup, EnvelopeSide::Upper).unwrap();
        for (m, p) in [(1.0, 0.5), (-2.0, -3.0), (0.1, 7.0)] {
            let j = Jet::scalar(m, p, 0.3, 0.2);
            assert_eq!(upper.eval(&j).unwrap(), sup.eval(&j).unwrap());
        }
    }

    #[test]
    fn reflection_swaps_pucci() {
        let op = OperatorSpec::pucci_minus(1.0, 2.0).unwrap();
        assert_eq!(op.reflected(), OperatorSpec::pucci_plus(1.0, 2.0).unwrap());
        let general = min_example(1).reflected();
        let j = Jet::scalar(1.5, 0.0, 0.0, 0.0);
        assert_eq!(general.eval(&j).unwrap(), -min_example(1).eval(&j.scale(-1.0)).unwrap());
    }

    #[test]
    fn composite_bands() {
        let op = min_example(1);
        let b = op.band().unwrap();
        assert_eq!((b.gamma, b.big_gamma), (1.0, 2.0));
        let h = OperatorSpec::homotopy(OperatorSpec::pucci_minus(1.0, 2.0).unwrap(), 0.5, 2.0).unwrap();
        let hb = h.band().unwrap();
        assert_eq!((hb.gamma, hb.big_gamma), (1.5, 2.0));
        let s = OperatorSpec::shift(op, -3.0).band().unwrap();
        assert_eq!(s.delta0, 3.0);
    }

    #[test]
    fn toml_round_trip() {
        let op = OperatorSpec::homotopy(min_example(1), 0.25, 2.0).unwrap();
        let text = toml::to_string(&op).unwrap();
        let back: OperatorSpec = toml::from_str(&text).unwrap();
        assert_eq!(op, back);
    }

    #[test]
    fn toml_rejects_unknown_keys_and_bad_bands() {
        let bad = "kind = \"pucci-minus\"\ngamma = 1.0\nGamma = 2.0\nfoo = 1\n";
        assert!(toml::from_str::<OperatorSpec>(bad).is_err());
        let inverted = "kind = \"pucci-minus\"\ngamma = 2.0\nGamma = 1.0\n";
        assert!(toml::from_str::<OperatorSpec>(inverted).is_err());
        let ok = "kind = \"pucci-minus\"\ngamma = 1.0\nGamma = 2.0\n";
        assert_eq!(toml::from_str::<OperatorSpec>(ok).unwrap(), OperatorSpec::pucci_minus(1.0, 2.0).unwrap());
    }
}
