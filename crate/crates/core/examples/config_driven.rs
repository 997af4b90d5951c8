//! Runs the `eig` command on a shipped config, as the CLI would.

use std::path::Path;

use halfeig::experiments::{run, Command};

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/min_example.toml");
    let out = std::env::temp_dir().join("halfeig-config-driven");
    let outcome = run(Command::Eig, &config, &out, None);
    println!("exit {}: {}", outcome.exit_code, outcome.summary);
    println!("outputs in {}", out.display());
}
