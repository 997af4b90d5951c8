//! Dirichlet solves, principal half-eigenpairs, 1D shooting and homotopy
//! continuation.

mod continuation;
mod dirichlet;
mod eigen;
mod shooting;

pub use continuation::{continuation_sweep, ContinuationRow, ContinuationTable};
pub use dirichlet::{
    solve_dirichlet, solve_dirichlet_with_boundary, Attempt, DirichletSolver, SolveOptions,
    SolveReport, StartKind,
};
pub use eigen::{
    half_eigenpairs, principal_eigenpair, principal_eigenpair_from, rayleigh_bounds, EigenOptions,
    EigenPair, EigenSign,
};
pub use shooting::{lambda2_scan_1d, shoot_1d, ScanOutcome, ScanResult, ScanRow, ShootOptions, Shot};
