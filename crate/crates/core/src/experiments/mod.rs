//! Config-driven commands behind the `halfeig` binary. Each command writes
//! CSV (and a short text summary) into an output directory; outputs are
//! byte-identical for identical config and seed.

mod commands;
mod config;

pub use commands::{
    amp_sweep, cmd_amp_sweep, cmd_continuation, cmd_eig, cmd_scan, cmd_solve, cmd_verify, exit_code, run,
    verify_reports, AmpSweep, AmpSweepRow, Command, Outcome, SignVerdict, EXIT_NO_CONVERGENCE, EXIT_OK,
    EXIT_USAGE, EXIT_VERIFY_FAILED,
};
pub use config::{ExperimentConfig, LambdaSpec, RunSection};
