//! Monotone finite differences for [`OperatorSpec`] on uniform grids.
//!
//! Every operator variant reduces, at a node, to a max/min over linear
//! 9-point stencils. A linear member `-tr(A D²u) + b·Du + c u` becomes
//!
//! * centered second differences along the axes,
//! * the cross term through one diagonal second difference, chosen by the
//!   sign of `a12` (wide-stencil form, monotone while
//!   `a11 >= |a12| hx/hy` and `a22 >= |a12| hy/hx`),
//! * upwind first differences per axis: forward if `b_i <= 0`, backward
//!   otherwise.
//!
//! Pucci operators are the max (P⁺) or min (P⁻) over the corner diffusion
//! matrices of their band, so the discrete operator is again an inf-sup of
//! monotone linear schemes. The selected stencil per node is the policy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, NO_NODE};
use crate::operator::{corner_matrices, Jet, LinearCoeffs, OperatorSpec, SymMatrix};

/// Treatment of first-order terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Upwind,
    /// Centered differences for the drift. Not monotone when `|b| h > 2a`.
    Centered,
}

/// Linear 9-point stencil at one node: `value = center u_C + sum coef[d] u_d`,
/// with `d` indexing [`crate::grid::DIRECTIONS`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stencil {
    pub center: f64,
    pub coef: [f64; 8],
}

impl Stencil {
    pub fn scaled(&self, t: f64) -> Stencil {
        let mut coef = self.coef;
        coef.iter_mut().for_each(|c| *c *= t);
        Stencil {
            center: t * self.center,
            coef,
        }
    }

    pub fn plus(&self, other: &Stencil) -> Stencil {
        let mut coef = self.coef;
        for (c, o) in coef.iter_mut().zip(&other.coef) {
            *c += o;
        }
        Stencil {
            center: self.center + other.center,
            coef,
        }
    }

    pub fn apply(&self, values: &[f64], node: usize, neighbors: &[usize; 8]) -> f64 {
        let mut s = self.center * values[node];
        for (c, &nb) in self.coef.iter().zip(neighbors) {
            if *c != 0.0 {
                s += c * values[nb];
            }
        }
        s
    }

    /// Nonpositive neighbour weights.
    pub fn is_monotone(&self) -> bool {
        self.coef.iter().all(|&c| c <= 0.0)
    }
}

/// Path of max/min decisions taken while descending the operator tree.
/// For an inf-sup family this is `[family, member]`; for a Pucci operator
/// `[corner]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Choice {
    len: u8,
    path: [u8; 6],
}

impl Choice {
    fn push(&mut self, idx: usize) {
        if (self.len as usize) < self.path.len() {
            self.path[self.len as usize] = idx.min(255) as u8;
        }
        self.len = self.len.saturating_add(1);
    }

    pub fn indices(&self) -> &[u8] {
        &self.path[..(self.len as usize).min(self.path.len())]
    }
}

impl std::fmt::Display for Choice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Frozen-policy linear system on interior nodes.
#[derive(Clone, Debug)]
pub struct DiscreteLinearization {
    pub rows: Vec<Stencil>,
    /// Contribution of boundary values to each row, to be moved to the
    /// right-hand side.
    pub rhs_shift: Vec<f64>,
    pub policy: Vec<Choice>,
}

/// Monotone stencil of `-tr(A D²u) + b·Du + c u` with constant coefficients.
pub fn linear_stencil(a: &SymMatrix, b: [f64; 2], c: f64, h: &[f64], scheme: Scheme) -> Stencil {
    let mut st = Stencil::default();
    let hx = h[0];
    if a.dim() == 1 {
        let w = a.get(0, 0) / (hx * hx);
        st.coef[0] = -w;
        st.coef[1] = -w;
        st.center = 2.0 * w;
    } else {
        let hy = h[1];
        let (a11, a12, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
        let ax = a11 - a12.abs() * hx / hy;
        let ay = a22 - a12.abs() * hy / hx;
        let wd = a12.abs() / (hx * hy);
        st.coef[0] = -ax / (hx * hx);
        st.coef[1] = -ax / (hx * hx);
        st.coef[2] = -ay / (hy * hy);
        st.coef[3] = -ay / (hy * hy);
        let (p, q) = if a12 >= 0.0 { (4, 5) } else { (6, 7) };
        st.coef[p] = -wd;
        st.coef[q] = -wd;
        st.center = 2.0 * ax / (hx * hx) + 2.0 * ay / (hy * hy) + 2.0 * wd;
    }
    for axis in 0..a.dim() {
        let bi = b[axis];
        if bi == 0.0 {
            continue;
        }
        let (fwd, bwd) = (2 * axis, 2 * axis + 1);
        let hi = h[axis];
        match scheme {
            Scheme::Upwind if bi > 0.0 => {
                st.center += bi / hi;
                st.coef[bwd] -= bi / hi;
            }
            Scheme::Upwind => {
                st.center -= bi / hi;
                st.coef[fwd] += bi / hi;
            }
            Scheme::Centered => {
                st.coef[fwd] += bi / (2.0 * hi);
                st.coef[bwd] -= bi / (2.0 * hi);
            }
        }
    }
    st.center += c;
    st
}

fn laplacian_stencil(dim: usize, k: f64, h: &[f64]) -> Stencil {
    let a = if dim == 1 {
        SymMatrix::scalar(k)
    } else {
        SymMatrix::new2(k, 0.0, k)
    };
    linear_stencil(&a, [0.0; 2], 0.0, h, Scheme::Upwind)
}

fn member_stencil(m: &LinearCoeffs, x: &[f64; 2], h: &[f64], scheme: Scheme) -> Stencil {
    let (a, b, c) = m.at(x);
    linear_stencil(&a, b, c, h, scheme)
}

struct Ctx<'a> {
    grid: &'a Grid,
    values: &'a [f64],
    node: usize,
    scheme: Scheme,
}

impl Ctx<'_> {
    fn value(&self, st: &Stencil) -> f64 {
        st.apply(self.values, self.node, self.grid.neighbors(self.node))
    }

    /// Picks the max (or min) stencil, lowest index on ties.
    fn extremum(
        &self,
        candidates: impl Iterator<Item = Stencil>,
        maximize: bool,
        choice: &mut Choice,
    ) -> Stencil {
        let mut best: Option<(usize, Stencil, f64)> = None;
        for (i, st) in candidates.enumerate() {
            let v = self.value(&st);
            let better = match best {
                None => true,
                Some((_, _, bv)) => {
                    if maximize {
                        v > bv
                    } else {
                        v < bv
                    }
                }
            };
            if better {
                best = Some((i, st, v));
            }
        }
        let (i, st, _) = best.expect("non-empty candidate set");
        choice.push(i);
        st
    }
}

fn select(op: &OperatorSpec, ctx: &Ctx<'_>, flip: bool, choice: &mut Choice) -> Stencil {
    let grid = ctx.grid;
    let x = grid.coords(ctx.node);
    let h = grid.h();
    match op {
        OperatorSpec::PucciPlus(b) | OperatorSpec::PucciMinus(b) => {
            let maximize = matches!(op, OperatorSpec::PucciPlus(_)) != flip;
            let corners = corner_matrices(grid.dim(), b);
            let it = corners.iter().map(|c| {
                let a = if grid.dim() == 1 {
                    SymMatrix::scalar(c[0])
                } else {
                    SymMatrix::new2(c[0], c[1], c[2])
                };
                linear_stencil(&a, [0.0; 2], 0.0, h, ctx.scheme)
            });
            ctx.extremum(it, maximize, choice)
        }
        OperatorSpec::Linear(m) => member_stencil(m, &x, h, ctx.scheme),
        OperatorSpec::InfSup(i) => {
            // inf over families of sup over members; reflection swaps roles
            let inner_max = !flip;
            let fam_stencils: Vec<(Stencil, Choice)> = i
                .families
                .iter()
                .map(|fam| {
                    let mut c = Choice::default();
                    let st = ctx.extremum(
                        fam.members.iter().map(|m| member_stencil(m, &x, h, ctx.scheme)),
                        inner_max,
                        &mut c,
                    );
                    (st, c)
                })
                .collect();
            let mut outer = Choice::default();
            let st = ctx.extremum(fam_stencils.iter().map(|(s, _)| *s), !inner_max, &mut outer);
            let f = outer.indices()[0] as usize;
            choice.push(f);
            choice.push(fam_stencils[f].1.indices()[0] as usize);
            st
        }
        OperatorSpec::UpperEnvelope(i) | OperatorSpec::LowerEnvelope(i) => {
            let maximize = matches!(op, OperatorSpec::UpperEnvelope(_)) != flip;
            ctx.extremum(
                i.members().map(|m| member_stencil(m, &x, h, ctx.scheme)),
                maximize,
                choice,
            )
        }
        OperatorSpec::Shift { inner, lambda } => {
            let mut st = select(inner, ctx, flip, choice);
            st.center -= lambda;
            st
        }
        OperatorSpec::Homotopy {
            inner,
            s,
            big_gamma,
        } => {
            let base = select(inner, ctx, flip, choice).scaled(1.0 - s);
            base.plus(&laplacian_stencil(grid.dim(), s * big_gamma, h))
        }
        OperatorSpec::Reflect { inner } => select(inner, ctx, !flip, choice),
    }
}

fn check_dims(op: &OperatorSpec, grid: &Grid) -> Result<()> {
    if let Some(d) = op.dim() {
        if d != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: grid.dim(),
            });
        }
    }
    Ok(())
}

/// Active stencil and policy of `op` at an interior node.
pub fn select_stencil(
    op: &OperatorSpec,
    u: &GridFunction,
    node: usize,
    scheme: Scheme,
) -> Result<(Stencil, Choice)> {
    let grid = u.grid();
    if !grid.is_interior(node) {
        return Err(Error::BoundaryNode(node));
    }
    check_dims(op, grid)?;
    let ctx = Ctx {
        grid,
        values: u.values(),
        node,
        scheme,
    };
    let mut choice = Choice::default();
    let st = select(op, &ctx, false, &mut choice);
    Ok((st, choice))
}

/// Discrete jet at an interior node: centered second differences, the
/// centered four-point cross difference, and per-axis one-sided first
/// differences (forward where `drift_sign <= 0`, backward otherwise).
pub fn discrete_jet(u: &GridFunction, node: usize, drift_sign: [f64; 2]) -> Result<Jet> {
    let grid = u.grid();
    if !grid.is_interior(node) {
        return Err(Error::BoundaryNode(node));
    }
    let v = u.values();
    let nb = grid.neighbors(node);
    let h = grid.h();
    let c = v[node];
    let x = grid.coords(node);
    let mut p = [0.0; 2];
    let mut d2 = [0.0; 2];
    for axis in 0..grid.dim() {
        let (e, w) = (v[nb[2 * axis]], v[nb[2 * axis + 1]]);
        d2[axis] = (e - 2.0 * c + w) / (h[axis] * h[axis]);
        p[axis] = if drift_sign[axis] <= 0.0 {
            (e - c) / h[axis]
        } else {
            (c - w) / h[axis]
        };
    }
    let m = if grid.dim() == 1 {
        SymMatrix::scalar(d2[0])
    } else {
        let cross = (v[nb[4]] + v[nb[5]] - v[nb[6]] - v[nb[7]]) / (4.0 * h[0] * h[1]);
        SymMatrix::new2(d2[0], cross, d2[1])
    };
    Ok(Jet::new(m, p, c, x))
}

/// Discrete residual field: `F_h(u)` at interior nodes, `u` on the boundary.
pub fn apply_operator(op: &OperatorSpec, u: &GridFunction) -> Result<GridFunction> {
    apply_operator_with(op, u, Scheme::Upwind)
}

pub fn apply_operator_with(op: &OperatorSpec, u: &GridFunction, scheme: Scheme) -> Result<GridFunction> {
    let grid = u.grid();
    check_dims(op, grid)?;
    let mut out = u.clone();
    let ctx_vals = u.values();
    for node in grid.interior_nodes() {
        let ctx = Ctx {
            grid,
            values: ctx_vals,
            node,
            scheme,
        };
        let mut choice = Choice::default();
        let st = select(op, &ctx, false, &mut choice);
        out.values_mut()[node] = ctx.value(&st);
    }
    Ok(out)
}

/// Policy at `u` and the matching linear stencils. Boundary values of `u`
/// are folded into `rhs_shift`.
pub fn linearize_at_policy(op: &OperatorSpec, u: &GridFunction) -> Result<DiscreteLinearization> {
    linearize_with(op, u, Scheme::Upwind)
}

pub fn linearize_with(op: &OperatorSpec, u: &GridFunction, scheme: Scheme) -> Result<DiscreteLinearization> {
    let grid = u.grid();
    check_dims(op, grid)?;
    let n = grid.num_interior();
    let mut rows = Vec::with_capacity(n);
    let mut rhs_shift = vec![0.0; n];
    let mut policy = Vec::with_capacity(n);
    for node in grid.interior_nodes() {
        let ctx = Ctx {
            grid,
            values: u.values(),
            node,
            scheme,
        };
        let mut choice = Choice::default();
        let st = select(op, &ctx, false, &mut choice);
        for (c, &nb) in st.coef.iter().zip(grid.neighbors(node)) {
            if nb != NO_NODE && !grid.is_interior(nb) {
                rhs_shift[node] += c * u.values()[nb];
            }
        }
        rows.push(st);
        policy.push(choice);
    }
    Ok(DiscreteLinearization {
        rows,
        rhs_shift,
        policy,
    })
}

/// Direct perturbation test of discrete monotonicity at one node: raising a
/// neighbour must not raise the residual, and raising the centre must not
/// lower the residual of the operator shifted by `-(δ₀ + 1)`.
pub fn check_monotone(op: &OperatorSpec, u: &GridFunction, node: usize, eps: f64) -> Result<bool> {
    check_monotone_with(op, u, node, eps, Scheme::Upwind)
}

pub fn check_monotone_with(
    op: &OperatorSpec,
    u: &GridFunction,
    node: usize,
    eps: f64,
    scheme: Scheme,
) -> Result<bool> {
    let grid = u.grid();
    if !grid.is_interior(node) {
        return Err(Error::BoundaryNode(node));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let shifted = OperatorSpec::shift(op.clone(), -(op.band()?.delta0 + 1.0));
    let at = |f: &GridFunction, o: &OperatorSpec| -> Result<f64> {
        let (st, _) = select_stencil(o, f, node, scheme)?;
        Ok(st.apply(f.values(), node, grid.neighbors(node)))
    };
    let base = at(u, op)?;
    let scale = 1.0 + base.abs();
    let slack = 1e-12 * scale;
    for &nb in grid.neighbors(node) {
        if nb == NO_NODE {
            continue;
        }
        let mut v = u.clone();
        v.values_mut()[nb] += eps;
        if at(&v, op)? > base + slack {
            return Ok(false);
        }
    }
    let mut v = u.clone();
    v.values_mut()[node] += eps;
    let before = at(u, &shifted)?;
    Ok(at(&v, &shifted)? >= before - slack)
}
