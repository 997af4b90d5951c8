//! Solutions just above lambda1- with a positive source are negative.

use halfeig::experiments::{amp_sweep, ExperimentConfig};

const CONFIG: &str = r#"
[operator]
kind = "pucci-minus"
gamma = 1
Gamma = 2

[domain]
dim = 1
lo = 0
hi = "pi"
n_interior = 201

[run]
f = "sin(1)"
eta = [0.5, 0.1, 0.02]
"#;

fn main() -> halfeig::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let sweep = amp_sweep(&cfg, 0)?;
    println!("lambda1+ = {:.6}  lambda1- = {:.6}", sweep.lambda_plus, sweep.lambda_minus);
    for r in &sweep.rows {
        println!(
            "eta = {:<5} u in [{:10.4}, {:10.4}]  {}",
            r.eta,
            r.min_u,
            r.max_u,
            r.sign_verdict.as_str()
        );
    }
    println!("expected: {}", sweep.expected.as_str());
    Ok(())
}
