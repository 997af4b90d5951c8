use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use halfeig::{Grid, GridFunction};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_halfeig");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn halfeig(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(BIN).args(args).output().unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn run(cmd: &str, cfg: &Path, out: &Path, seed: Option<u64>) -> i32 {
    let seed = seed.map(|s| s.to_string());
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    if let Some(s) = &seed {
        args.extend(["--seed", s]);
    }
    halfeig(&args).0
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("cfg.toml");
    fs::write(&p, text).unwrap();
    p
}

const SMALL_PM: &str = r#"
[operator]
kind = "pucci-minus"
gamma = 1
Gamma = 2

[domain]
dim = 1
lo = 0
hi = "pi"
n_interior = 99
"#;

#[test]
fn eig_writes_both_half_eigenpairs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL_PM);
    let out = dir.path().join("out");
    assert_eq!(run("eig", &cfg, &out, None), 0);
    let csv = fs::read_to_string(out.join("eig.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "sign,lambda,residual,rayleigh_lo,rayleigh_hi,iterations,converged");
    let lambdas: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((lambdas[0] - 1.0).abs() < 1e-3 && (lambdas[1] - 2.0).abs() < 2e-3, "{lambdas:?}");

    let g = Arc::new(Grid::interval(0.0, std::f64::consts::PI, 99).unwrap());
    let phi = GridFunction::from_csv(g, &fs::read_to_string(out.join("phi_plus.csv")).unwrap()).unwrap();
    assert!(phi.interior_min() > 0.0);
}

#[test]
fn solve_reproduces_quadratic() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run("solve", &config("solve_laplace.toml"), dir.path(), None), 0);
    let g = Arc::new(Grid::interval(0.0, 1.0, 801).unwrap());
    let u = GridFunction::from_csv(g.clone(), &fs::read_to_string(dir.path().join("solution.csv")).unwrap()).unwrap();
    for k in g.interior_nodes() {
        let x = g.coords(k)[0];
        assert!((u.values()[k] - x * (1.0 - x)).abs() < 1e-9);
    }
}

#[test]
fn solve_inside_window_reports_no_convergence() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run("solve", &config("solve_in_window.toml"), dir.path(), None), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad");
    assert_eq!(run("verify", &config("verify_broken_band.toml"), &bad, None), 3);
    let json = fs::read_to_string(bad.join("counterexamples.json")).unwrap();
    assert!(json.contains("\"structure\""));
    let good = dir.path().join("good");
    assert_eq!(run("verify", &config("verify.toml"), &good, None), 0);
    assert!(!good.join("counterexamples.json").exists());
}

#[test]
fn malformed_input_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cases = [
        ("eig", SMALL_PM.replace("Gamma = 2", "Gamma = 0.5")),
        ("eig", SMALL_PM.replace("n_interior = 99", "n_interior = 99\ncolour = 1")),
        ("amp-sweep", format!("{SMALL_PM}\n[run]\nf = \"sin(1)\"\neta = [0.1, 0]\n")),
        (
            "amp-sweep",
            format!("{SMALL_PM}\n[run]\nf = \"sin(1)\"\neta = [0.1]\n").replace("pucci-minus", "pucci-plus"),
        ),
        ("scan", format!("{SMALL_PM}\n[run]\nlambda_range = [5, 5]\n")),
        ("continuation", format!("{SMALL_PM}\n[run]\nn_steps = 1\n")),
    ];
    for (cmd, text) in cases {
        let cfg = write_config(&dir, &text);
        assert_eq!(run(cmd, &cfg, &out, None), 1, "{cmd}: {text}");
    }
    let cfg = config("pucci_minus_2d.toml");
    assert_eq!(run("scan", &cfg, &out, None), 1);
    assert_eq!(run("eig", &dir.path().join("missing.toml"), &out, None), 1);
    assert_eq!(halfeig(&["frobnicate", "--config", "x", "--out", "y"]).0, 1);
    assert_eq!(halfeig(&["eig"]).0, 1);
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = config("verify.toml");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("verify", &cfg, &a, Some(7)), 0);
    assert_eq!(run("verify", &cfg, &b, Some(7)), 0);
    assert_eq!(fs::read(a.join("verify.csv")).unwrap(), fs::read(b.join("verify.csv")).unwrap());

    let cfg = config("amp_sweep.toml");
    let (a, b) = (dir.path().join("amp_a"), dir.path().join("amp_b"));
    assert_eq!(run("amp-sweep", &cfg, &a, Some(1)), 0);
    assert_eq!(run("amp-sweep", &cfg, &b, Some(1)), 0);
    assert_eq!(fs::read(a.join("amp.csv")).unwrap(), fs::read(b.join("amp.csv")).unwrap());
}

#[test]
fn verdicts_do_not_depend_on_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = config("verify.toml");
    let verdicts = |seed: u64| -> Vec<(String, String)> {
        let out = dir.path().join(format!("s{seed}"));
        assert_eq!(run("verify", &cfg, &out, Some(seed)), 0);
        fs::read_to_string(out.join("verify.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].to_string(), f[1].to_string())
            })
            .collect()
    };
    assert_eq!(verdicts(0), verdicts(12345));
}
