//! Uniform tensor grids on intervals and rectangles, and nodal fields on them.
//!
//! Nodes are numbered interior first (lexicographic, x fastest), then the
//! boundary ring in lexicographic order of the full lattice. Interior node
//! `k` is therefore also unknown `k` of every linear system.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::ScalarField;

/// Offsets of the 8 stencil neighbours: E, W, N, S, NE, SW, SE, NW.
pub const DIRECTIONS: [[i64; 2]; 8] = [
    [1, 0],
    [-1, 0],
    [0, 1],
    [0, -1],
    [1, 1],
    [-1, -1],
    [1, -1],
    [-1, 1],
];

pub const NO_NODE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "GridRepr", try_from = "GridRepr")]
pub struct Grid {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    n: usize,
    h: [f64; 2],
    lattice: Vec<[usize; 2]>,
    node_of: Vec<usize>,
    neighbors: Vec<[usize; 8]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GridRepr {
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    n_interior: usize,
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr {
            dim: g.dim,
            lo: g.lo[..g.dim].to_vec(),
            hi: g.hi[..g.dim].to_vec(),
            n_interior: g.n,
        }
    }
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Grid> {
        Grid::new(r.dim, &r.lo, &r.hi, r.n_interior)
    }
}

impl Grid {
    /// Uniform grid on `[lo, hi]` (1D) or `[lo0, hi0] x [lo1, hi1]` (2D) with
    /// `n_interior` interior points per axis.
    pub fn new(dim: usize, lo: &[f64], hi: &[f64], n_interior: usize) -> Result<Grid> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if lo.len() != dim || hi.len() != dim {
            return Err(Error::InvalidGrid("corner length does not match dimension".into()));
        }
        if n_interior < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 interior points, got {n_interior}")));
        }
        let mut lo2 = [0.0; 2];
        let mut hi2 = [0.0; 2];
        let mut h = [0.0; 2];
        for i in 0..dim {
            if !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i]) {
                return Err(Error::InvalidGrid(format!(
                    "degenerate box on axis {i}: [{}, {}]",
                    lo[i], hi[i]
                )));
            }
            lo2[i] = lo[i];
            hi2[i] = hi[i];
            h[i] = (hi[i] - lo[i]) / (n_interior + 1) as f64;
        }

        let side = n_interior + 2;
        let ny = if dim == 2 { side } else { 1 };
        let total = side * ny;
        let interior = |i: usize, j: usize| {
            (1..=n_interior).contains(&i) && (dim == 1 || (1..=n_interior).contains(&j))
        };
        let mut lattice = Vec::with_capacity(total);
        for j in 0..ny {
            for i in 0..side {
                if interior(i, j) {
                    lattice.push([i, j]);
                }
            }
        }
        for j in 0..ny {
            for i in 0..side {
                if !interior(i, j) {
                    lattice.push([i, j]);
                }
            }
        }
        let mut node_of = vec![NO_NODE; total];
        for (k, &[i, j]) in lattice.iter().enumerate() {
            node_of[j * side + i] = k;
        }
        let n_int = if dim == 1 { n_interior } else { n_interior * n_interior };
        let mut neighbors = Vec::with_capacity(n_int);
        for &[i, j] in &lattice[..n_int] {
            let mut nb = [NO_NODE; 8];
            for (d, off) in DIRECTIONS.iter().enumerate() {
                if dim == 1 && off[1] != 0 {
                    continue;
                }
                let ii = (i as i64 + off[0]) as usize;
                let jj = (j as i64 + off[1]) as usize;
                nb[d] = node_of[jj * side + ii];
            }
            neighbors.push(nb);
        }
        Ok(Grid {
            dim,
            lo: lo2,
            hi: hi2,
            n: n_interior,
            h,
            lattice,
            node_of,
            neighbors,
        })
    }

    /// Interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64, n_interior: usize) -> Result<Grid> {
        Grid::new(1, &[lo], &[hi], n_interior)
    }

    /// Square `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64, n_interior: usize) -> Result<Grid> {
        Grid::new(2, &[lo, lo], &[hi, hi], n_interior)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo[..self.dim]
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi[..self.dim]
    }

    pub fn n_interior_per_axis(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h[..self.dim]
    }

    pub fn num_nodes(&self) -> usize {
        self.lattice.len()
    }

    pub fn num_interior(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_interior(&self, node: usize) -> bool {
        node < self.num_interior()
    }

    pub fn lattice_index(&self, node: usize) -> [usize; 2] {
        self.lattice[node]
    }

    pub fn node_at(&self, lattice: [usize; 2]) -> Option<usize> {
        let side = self.n + 2;
        if lattice[0] >= side || lattice[1] >= if self.dim == 2 { side } else { 1 } {
            return None;
        }
        Some(self.node_of[lattice[1] * side + lattice[0]])
    }

    pub fn coords(&self, node: usize) -> [f64; 2] {
        let [i, j] = self.lattice[node];
        let mut x = [0.0; 2];
        x[0] = self.lo[0] + i as f64 * self.h[0];
        if self.dim == 2 {
            x[1] = self.lo[1] + j as f64 * self.h[1];
        }
        x
    }

    /// Neighbour table of an interior node, indexed like [`DIRECTIONS`].
    /// Entries unused in 1D are [`NO_NODE`].
    pub fn neighbors(&self, node: usize) -> &[usize; 8] {
        &self.neighbors[node]
    }

    pub fn interior_nodes(&self) -> std::ops::Range<usize> {
        0..self.num_interior()
    }

    pub fn boundary_nodes(&self) -> std::ops::Range<usize> {
        self.num_interior()..self.num_nodes()
    }

    pub fn diameter(&self) -> f64 {
        let dx = self.hi[0] - self.lo[0];
        let dy = self.hi[1] - self.lo[1];
        dx.hypot(dy)
    }

    /// Cell volume `prod h_i`, used for discrete `L^p` norms.
    pub fn cell_volume(&self) -> f64 {
        self.h().iter().product()
    }

    /// Same box shape scaled about `lo` by `factor`, with the same resolution.
    pub fn scaled(&self, factor: f64) -> Result<Grid> {
        let hi: Vec<f64> = (0..self.dim)
            .map(|i| self.lo[i] + factor * (self.hi[i] - self.lo[i]))
            .collect();
        Grid::new(self.dim, self.lo(), &hi, self.n)
    }

    /// Boundary nodes with an inward unit lattice direction, skipping the
    /// corners of a rectangle.
    pub fn boundary_with_inward(&self) -> Vec<(usize, [i64; 2])> {
        let last = self.n + 1;
        let mut out = Vec::new();
        for node in self.boundary_nodes() {
            let [i, j] = self.lattice[node];
            let on_x = i == 0 || i == last;
            let on_y = self.dim == 2 && (j == 0 || j == last);
            if on_x && on_y {
                continue;
            }
            let dir = if on_x {
                [if i == 0 { 1 } else { -1 }, 0]
            } else {
                [0, if j == 0 { 1 } else { -1 }]
            };
            out.push((node, dir));
        }
        out
    }

    pub fn shift_node(&self, node: usize, dir: [i64; 2]) -> Option<usize> {
        let [i, j] = self.lattice[node];
        let ii = i as i64 + dir[0];
        let jj = j as i64 + dir[1];
        if ii < 0 || jj < 0 {
            return None;
        }
        self.node_at([ii as usize, jj as usize])
    }
}

/// Nodal scalar field on a grid, boundary nodes included.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at node {k}")));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.num_nodes();
        GridFunction {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.num_nodes()).map(|k| f(grid.coords(k))).collect();
        Self::new(grid, values)
    }

    pub fn from_field(grid: Arc<Grid>, field: &ScalarField) -> Result<Self> {
        let dim = grid.dim();
        Self::from_fn(grid, |x| field.eval(&x, dim))
    }

    /// Tent of height 1 supported on the middle half of the box, zero on the
    /// boundary.
    pub fn tent(grid: Arc<Grid>) -> Self {
        let (lo, hi, dim) = (grid.lo, grid.hi, grid.dim);
        let mut out = Self::from_fn(grid, |x| {
            (0..dim)
                .map(|i| {
                    let c = 0.5 * (lo[i] + hi[i]);
                    let w = 0.25 * (hi[i] - lo[i]);
                    (1.0 - (x[i] - c).abs() / w).max(0.0)
                })
                .product()
        })
        .expect("tent values are finite");
        out.zero_boundary();
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[..self.grid.num_interior()]
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        let n = self.grid.num_interior();
        &mut self.values[..n]
    }

    pub fn zero_boundary(&mut self) {
        let n = self.grid.num_interior();
        self.values[n..].iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn with_zero_boundary(mut self) -> Self {
        self.zero_boundary();
        self
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn interior_sup_norm(&self) -> f64 {
        self.interior().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn interior_min(&self) -> f64 {
        self.interior().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn interior_max(&self) -> f64 {
        self.interior().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete `L^p` norm over interior nodes.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let vol = self.grid.cell_volume();
        (self.interior().iter().map(|v| v.abs().powf(p)).sum::<f64>() * vol).powf(1.0 / p)
    }

    pub fn scaled(&self, t: f64) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| t * v).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// CSV with header `node_index,x[,y],value`, LF line endings and 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        if self.grid.dim() == 1 {
            s.push_str("node_index,x,value\n");
        } else {
            s.push_str("node_index,x,y,value\n");
        }
        for (k, v) in self.values.iter().enumerate() {
            let x = self.grid.coords(k);
            if self.grid.dim() == 1 {
                let _ = writeln!(s, "{k},{:.16e},{:.16e}", x[0], v);
            } else {
                let _ = writeln!(s, "{k},{:.16e},{:.16e},{:.16e}", x[0], x[1], v);
            }
        }
        s
    }

    /// Parses the output of [`GridFunction::to_csv`] on the given grid.
    pub fn from_csv(grid: Arc<Grid>, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let expected = if grid.dim() == 1 {
            "node_index,x,value"
        } else {
            "node_index,x,y,value"
        };
        match lines.next() {
            Some(h) if h.trim() == expected => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header '{expected}', found {other:?}"
                )))
            }
        }
        let mut values = vec![f64::NAN; grid.num_nodes()];
        let mut seen = 0;
        for (ln, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != grid.dim() + 2 {
                return Err(Error::Parse(format!("line {}: wrong column count", ln + 2)));
            }
            let k: usize = cols[0]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad node index", ln + 2)))?;
            let v: f64 = cols[cols.len() - 1]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad value", ln + 2)))?;
            if k >= values.len() {
                return Err(Error::Parse(format!("line {}: node {k} out of range", ln + 2)));
            }
            values[k] = v;
            seen += 1;
        }
        if seen != grid.num_nodes() {
            return Err(Error::Parse(format!(
                "{seen} rows for a grid with {} nodes",
                grid.num_nodes()
            )));
        }
        Self::new(grid, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn build_grid_examples() {
        let g = Grid::interval(0.0, PI, 3).unwrap();
        assert_eq!(g.h()[0], PI / 4.0);
        assert_eq!((g.num_interior(), g.num_nodes()), (3, 5));

        let g = Grid::square(0.0, 1.0, 9).unwrap();
        assert_eq!(g.num_interior(), 81);
        assert_eq!(g.num_nodes() - g.num_interior(), 40);

        let g = Grid::interval(0.0, 1.0, 401).unwrap();
        assert_eq!(g.h()[0], 1.0 / 402.0);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Grid::interval(1.0, 1.0, 5).is_err());
        assert!(Grid::interval(0.0, 1.0, 2).is_err());
        assert!(Grid::new(3, &[0.0; 3], &[1.0; 3], 5).is_err());
    }

    #[test]
    fn interior_first_ordering() {
        let g = Grid::square(0.0, 1.0, 4).unwrap();
        for k in g.interior_nodes() {
            let [i, j] = g.lattice_index(k);
            assert!((1..=4).contains(&i) && (1..=4).contains(&j));
            for &nb in g.neighbors(k) {
                assert_ne!(nb, NO_NODE);
            }
        }
        for k in g.boundary_nodes() {
            let [i, j] = g.lattice_index(k);
            assert!(i == 0 || j == 0 || i == 5 || j == 5);
        }
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let g = Arc::new(Grid::square(0.0, PI, 5).unwrap());
        let f = GridFunction::from_fn(g.clone(), |x| (x[0] * 1.234567).sin() / 3.0 + x[1].exp()).unwrap();
        let back = GridFunction::from_csv(g, &f.to_csv()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn tent_is_positive_inside_middle_half() {
        let g = Arc::new(Grid::interval(0.0, 1.0, 9).unwrap());
        let t = GridFunction::tent(g);
        assert_eq!(t.interior_max(), 1.0);
        assert_eq!(t.values()[t.grid().num_interior()], 0.0);
    }
}
