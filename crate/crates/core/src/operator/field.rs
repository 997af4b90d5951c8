//! Closed-form scalar fields used for coefficient maps and right-hand sides.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := factor ('*' factor)*
//! factor := '-' factor | number | 'pi' | '(' expr ')'
//!         | 'const(' expr ')'
//!         | 'sin(' expr ')'                 -- prod_i sin(k x_i)
//!         | 'bump(' expr {',' expr} ')'     -- centers..., half-width
//!         | 'affine(' expr {',' expr} ')'   -- a0 + a1 x + a2 y
//! ```
//!
//! Arguments of `sin`, `bump`, `affine` and `const` must be constant
//! expressions such as `2*pi`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "String")]
pub enum ScalarField {
    Const(f64),
    /// `prod_i sin(k x_i)`.
    Sin(f64),
    /// Tent of height 1: `prod_i max(0, 1 - |x_i - c_i| / width)`. If fewer
    /// centers than axes are given, the last one is reused.
    Bump { center: Vec<f64>, width: f64 },
    /// `a[0] + a[1] x + a[2] y`.
    Affine(Vec<f64>),
    Product(Vec<ScalarField>),
}

impl ScalarField {
    pub fn eval(&self, x: &[f64; 2], dim: usize) -> f64 {
        match self {
            ScalarField::Const(c) => *c,
            ScalarField::Sin(k) => x[..dim].iter().map(|xi| (k * xi).sin()).product(),
            ScalarField::Bump { center, width } => (0..dim)
                .map(|i| {
                    let c = center[i.min(center.len() - 1)];
                    (1.0 - (x[i] - c).abs() / width).max(0.0)
                })
                .product(),
            ScalarField::Affine(a) => {
                a[0] + a.iter().skip(1).zip(&x[..dim]).map(|(ai, xi)| ai * xi).sum::<f64>()
            }
            ScalarField::Product(fs) => fs.iter().map(|f| f.eval(x, dim)).product(),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            ScalarField::Const(c) => Some(*c),
            ScalarField::Affine(a) if a.iter().skip(1).all(|&v| v == 0.0) => Some(a[0]),
            ScalarField::Product(fs) => fs.iter().map(|f| f.constant_value()).product(),
            _ => None,
        }
    }

    pub fn scaled(self, t: f64) -> ScalarField {
        match self {
            ScalarField::Const(c) => ScalarField::Const(t * c),
            ScalarField::Product(mut fs) => {
                fs.insert(0, ScalarField::Const(t));
                ScalarField::Product(fs)
            }
            other => ScalarField::Product(vec![ScalarField::Const(t), other]),
        }
    }
}

impl From<f64> for ScalarField {
    fn from(c: f64) -> Self {
        ScalarField::Const(c)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, vals: &[f64]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v:?}")?;
    }
    write!(f, ")")
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Const(c) => write!(f, "{c:?}"),
            ScalarField::Sin(k) => write!(f, "sin({k:?})"),
            ScalarField::Bump { center, width } => {
                let mut args = center.clone();
                args.push(*width);
                write_list(f, "bump", &args)
            }
            ScalarField::Affine(a) => write_list(f, "affine", a),
            ScalarField::Product(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<ScalarField> for String {
    fn from(f: ScalarField) -> String {
        f.to_string()
    }
}

/// Accepts either a bare number or an expression string.
#[derive(Deserialize)]
#[serde(untagged)]
enum FieldRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<FieldRepr> for ScalarField {
    type Error = Error;
    fn try_from(r: FieldRepr) -> Result<Self> {
        match r {
            FieldRepr::Number(v) if v.is_finite() => Ok(ScalarField::Const(v)),
            FieldRepr::Number(v) => Err(Error::InvalidInput(format!("non-finite coefficient {v}"))),
            FieldRepr::Text(s) => s.parse(),
        }
    }
}

impl FromStr for ScalarField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s,
            chars: s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }
}

/// Parses a constant expression such as `"pi"` or `"2*pi"`.
pub fn parse_constant(s: &str) -> Result<f64> {
    let f: ScalarField = s.parse()?;
    f.constant_value()
        .ok_or_else(|| Error::Parse(format!("'{s}' is not a constant expression")))
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        let at = self.chars.get(self.pos).map_or(self.src.len(), |c| c.0);
        Error::Parse(format!("{what} at byte {at} in field expression '{}'", self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<ScalarField> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(simplify(factors))
    }

    fn constant_arg(&mut self) -> Result<f64> {
        let e = self.expr()?;
        e.constant_value()
            .ok_or_else(|| self.error("argument must be a constant expression"))
    }

    fn args(&mut self) -> Result<Vec<f64>> {
        self.expect('(')?;
        let mut out = vec![self.constant_arg()?];
        while self.eat(',') {
            out.push(self.constant_arg()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphabetic() {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let mut prev = ' ';
        while let Some(c) = self.peek() {
            let sign_in_exponent = (c == '-' || c == '+') && (prev == 'e' || prev == 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || sign_in_exponent {
                prev = c;
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        text.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number '{text}' in '{}'", self.src)))
    }

    fn factor(&mut self) -> Result<ScalarField> {
        match self.peek() {
            None => Err(self.error("unexpected end")),
            Some('-') => {
                self.pos += 1;
                Ok(self.factor()?.scaled(-1.0))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(ScalarField::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "pi" => Ok(ScalarField::Const(std::f64::consts::PI)),
                    "const" => {
                        let a = self.args()?;
                        one_arg(&a, "const").map(ScalarField::Const)
                    }
                    "sin" => {
                        let a = self.args()?;
                        one_arg(&a, "sin").map(ScalarField::Sin)
                    }
                    "bump" => {
                        let mut a = self.args()?;
                        if a.len() < 2 || a.len() > 3 {
                            return Err(Error::Parse(
                                "bump takes 1 or 2 centers and a width".into(),
                            ));
                        }
                        let width = a.pop().unwrap();
                        if width <= 0.0 {
                            return Err(Error::Parse("bump width must be positive".into()));
                        }
                        Ok(ScalarField::Bump { center: a, width })
                    }
                    "affine" => {
                        let a = self.args()?;
                        if a.len() > 3 {
                            return Err(Error::Parse("affine takes at most 3 coefficients".into()));
                        }
                        Ok(ScalarField::Affine(a))
                    }
                    other => Err(Error::Parse(format!("unknown function '{other}'"))),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }
}

fn one_arg(a: &[f64], name: &str) -> Result<f64> {
    match a {
        [v] => Ok(*v),
        _ => Err(Error::Parse(format!("{name} takes exactly one argument"))),
    }
}

fn simplify(mut factors: Vec<ScalarField>) -> ScalarField {
    if factors.len() == 1 {
        return factors.pop().unwrap();
    }
    // fold constants into one leading factor and flatten nested products
    let mut constant = 1.0;
    let mut rest = Vec::new();
    for f in factors {
        match f {
            ScalarField::Const(c) => constant *= c,
            ScalarField::Product(inner) => {
                for g in inner {
                    match g {
                        ScalarField::Const(c) => constant *= c,
                        g => rest.push(g),
                    }
                }
            }
            g => rest.push(g),
        }
    }
    match (rest.len(), constant) {
        (0, c) => ScalarField::Const(c),
        (1, c) if c == 1.0 => rest.pop().unwrap(),
        (_, c) if c == 1.0 => ScalarField::Product(rest),
        (_, c) => {
            rest.insert(0, ScalarField::Const(c));
            ScalarField::Product(rest)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_vocabulary() {
        assert_eq!("2".parse::<ScalarField>().unwrap(), ScalarField::Const(2.0));
        assert_eq!("sin(pi)".parse::<ScalarField>().unwrap(), ScalarField::Sin(PI));
        assert_eq!("-sin(1)".parse::<ScalarField>().unwrap().eval(&[0.5, 0.0], 1), -(0.5f64).sin());
        let b: ScalarField = "bump(0.5, 0.25)".parse().unwrap();
        assert_eq!(b.eval(&[0.5, 0.0], 1), 1.0);
        assert_eq!(b.eval(&[0.75, 0.0], 1), 0.0);
        let a: ScalarField = "affine(1, 2, 3)".parse().unwrap();
        assert_eq!(a.eval(&[1.0, 1.0], 2), 6.0);
        assert_eq!(parse_constant("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_constant("1e-3").unwrap(), 1e-3);
    }

    #[test]
    fn sin_is_a_tensor_product_in_2d() {
        let f: ScalarField = "sin(1)".parse().unwrap();
        let x = [0.3, 1.1];
        assert!((f.eval(&x, 2) - 0.3f64.sin() * 1.1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn display_round_trips() {
        for s in ["sin(3.14)*bump(0.5, 0.25)", "-2*sin(1)", "affine(1.5, -0.25)", "bump(1, 2, 0.5)"] {
            let f: ScalarField = s.parse().unwrap();
            let again: ScalarField = f.to_string().parse().unwrap();
            assert_eq!(f, again, "{s}");
        }
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "sin(x)", "foo(1)", "2 +", "bump(1)", "sin(1", "bump(0.5, -1)"] {
            assert!(s.parse::<ScalarField>().is_err(), "{s}");
        }
    }
}
