use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use halfeig::experiments::{run, Command, EXIT_USAGE};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Eig,
    Solve,
    AmpSweep,
    Scan,
    Continuation,
    Verify,
}

/// Principal half-eigenvalues and Dirichlet problems for homogeneous
/// fully nonlinear elliptic operators.
#[derive(Debug, Parser)]
#[command(name = "halfeig", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let command = match cli.command {
        Cmd::Eig => Command::Eig,
        Cmd::Solve => Command::Solve,
        Cmd::AmpSweep => Command::AmpSweep,
        Cmd::Scan => Command::Scan,
        Cmd::Continuation => Command::Continuation,
        Cmd::Verify => Command::Verify,
    };
    let outcome = run(command, &cli.config, &cli.out, cli.seed);
    if outcome.exit_code == 0 {
        println!("{}", outcome.summary);
    } else {
        eprintln!("{}", outcome.summary);
    }
    ExitCode::from(outcome.exit_code as u8)
}
