//! Principal half-eigenvalues and Dirichlet problems for positively
//! homogeneous, fully nonlinear, uniformly elliptic operators.
//!
//! The crate is organised bottom-up:
//!
//! - [`operator`]: pointwise evaluation of Pucci, linear, inf-sup, shifted,
//!   homotopy and envelope operators, plus structural checkers.
//! - [`grid`] and [`discretization`]: uniform tensor grids on intervals and
//!   rectangles and the monotone finite-difference scheme built on them.
//! - [`solvers`]: policy-iteration Dirichlet solves, normalized inverse
//!   iteration for the two principal half-eigenpairs, 1D shooting for the
//!   second eigenvalue, and the homotopy sweep.
//! - [`verification`]: discrete checks of comparison, Hopf, proportionality
//!   and nonexistence properties.
//! - [`experiments`]: TOML-driven commands behind the `halfeig` binary.
//!
//! Sign convention: `-Δ` (not `Δ`) is elliptic, so `-u''` on `(0, π)` has
//! principal eigenvalue `1` with eigenfunction `sin x`.

pub mod discretization;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod linalg;
pub mod operator;
pub mod solvers;
pub mod verification;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use operator::{Band, Jet, LinearCoeffs, OperatorSpec, ScalarField, SymMatrix};
pub use solvers::{EigenPair, EigenSign, SolveReport};
