use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric `n x n` matrix with `n` in `{1, 2}`.
///
/// Only the upper triangle `(m11, m12, m22)` is stored, so symmetry holds
/// exactly. For `n == 1` the `m12` and `m22` slots are zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    upper: [f64; 3],
}

impl SymMatrix {
    pub fn scalar(m: f64) -> Self {
        SymMatrix {
            n: 1,
            upper: [m, 0.0, 0.0],
        }
    }

    pub fn new2(m11: f64, m12: f64, m22: f64) -> Self {
        SymMatrix {
            n: 2,
            upper: [m11, m12, m22],
        }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Self::scalar(0.0)),
            2 => Ok(Self::new2(0.0, 0.0, 0.0)),
            _ => Err(Error::Unsupported(format!("matrix dimension {n}"))),
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Self::scalar(1.0)),
            2 => Ok(Self::new2(1.0, 0.0, 1.0)),
            _ => Err(Error::Unsupported(format!("matrix dimension {n}"))),
        }
    }

    /// Diagonal matrix from the given entries (length 1 or 2).
    pub fn diag(d: &[f64]) -> Result<Self> {
        match *d {
            [a] => Ok(Self::scalar(a)),
            [a, b] => Ok(Self::new2(a, 0.0, b)),
            _ => Err(Error::Unsupported(format!("matrix dimension {}", d.len()))),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.upper[0],
            (0, 1) => self.upper[1],
            (1, 1) => self.upper[2],
            _ => panic!("index ({i}, {j}) out of range for {}x{} matrix", self.n, self.n),
        }
    }

    pub fn trace(&self) -> f64 {
        self.upper[0] + self.upper[2]
    }

    /// `tr(self * other)` for two symmetric matrices of the same size.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        let [a11, a12, a22] = self.upper;
        let [b11, b12, b22] = other.upper;
        a11 * b11 + 2.0 * a12 * b12 + a22 * b22
    }

    pub fn scale(&self, t: f64) -> Self {
        let [a, b, c] = self.upper;
        SymMatrix {
            n: self.n,
            upper: [t * a, t * b, t * c],
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        debug_assert_eq!(self.n, other.n);
        let [a, b, c] = self.upper;
        let [d, e, f] = other.upper;
        SymMatrix {
            n: self.n,
            upper: [a + d, b + e, c + f],
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Eigenvalues in ascending order. For `n == 1` the second slot is padded
    /// with `0.0`, which contributes nothing to trace-like sums.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [a, b, c] = self.upper;
        if self.n == 1 {
            return [a, 0.0];
        }
        let mean = 0.5 * (a + c);
        let radius = (0.5 * (a - c)).hypot(b);
        [mean - radius, mean + radius]
    }

    /// Entries `(m11, m12, m22)`.
    pub fn upper(&self) -> [f64; 3] {
        self.upper
    }
}

/// Second-order pointwise argument `(D²u, Du, u, x)` of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub m: SymMatrix,
    pub p: [f64; 2],
    pub z: f64,
    pub x: [f64; 2],
}

impl Jet {
    pub fn new(m: SymMatrix, p: [f64; 2], z: f64, x: [f64; 2]) -> Self {
        Jet { m, p, z, x }
    }

    /// 1D jet `(u'', u', u, x)`.
    pub fn scalar(m: f64, p: f64, z: f64, x: f64) -> Self {
        Jet {
            m: SymMatrix::scalar(m),
            p: [p, 0.0],
            z,
            x: [x, 0.0],
        }
    }

    pub fn zero(n: usize, x: [f64; 2]) -> Result<Self> {
        Ok(Jet {
            m: SymMatrix::zeros(n)?,
            p: [0.0; 2],
            z: 0.0,
            x,
        })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// `(t M, t p, t z)` at the same point.
    pub fn scale(&self, t: f64) -> Self {
        Jet {
            m: self.m.scale(t),
            p: [t * self.p[0], t * self.p[1]],
            z: t * self.z,
            x: self.x,
        }
    }

    /// Componentwise difference, keeping `self.x`.
    pub fn sub(&self, other: &Jet) -> Self {
        Jet {
            m: self.m.sub(&other.m),
            p: [self.p[0] - other.p[0], self.p[1] - other.p[1]],
            z: self.z - other.z,
            x: self.x,
        }
    }

    pub fn add(&self, other: &Jet) -> Self {
        self.sub(&other.scale(-1.0))
    }

    pub fn gradient_norm(&self) -> f64 {
        self.p[0].hypot(self.p[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diagonal_and_rotated() {
        let m = SymMatrix::new2(3.0, 0.0, -1.0);
        assert_eq!(m.eigenvalues(), [-1.0, 3.0]);
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3
        let r = SymMatrix::new2(2.0, 1.0, 2.0).eigenvalues();
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn trace_product_counts_off_diagonal_twice() {
        let a = SymMatrix::new2(1.0, 2.0, 3.0);
        let b = SymMatrix::new2(4.0, 5.0, 6.0);
        assert_eq!(a.trace_product(&b), 4.0 + 20.0 + 18.0);
    }

    #[test]
    fn symmetric_access() {
        let a = SymMatrix::new2(1.0, 2.0, 3.0);
        assert_eq!(a.get(0, 1), a.get(1, 0));
    }
}
