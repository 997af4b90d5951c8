use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, LambdaSpec};
use crate::error::{Error, Result};
use crate::operator::OperatorSpec;
use crate::solvers::{
    continuation_sweep, half_eigenpairs, lambda2_scan_1d, principal_eigenpair, solve_dirichlet, EigenPair,
    EigenSign, ShootOptions,
};
use crate::verification::{check_structure_against, run_suite, PropertyReport, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Eig,
    Solve,
    AmpSweep,
    Scan,
    Continuation,
    Verify,
}

/// Exit code and a human-readable summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
}

impl Outcome {
    fn new(ok: bool, failure_code: i32, summary: String) -> Self {
        Outcome {
            exit_code: if ok { EXIT_OK } else { failure_code },
            summary,
        }
    }
}

/// Solver failures map to 2, everything else to 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Eigen(_) | Error::Singular(_) | Error::SignViolation(_) | Error::Shooting(_) => EXIT_NO_CONVERGENCE,
        _ => EXIT_USAGE,
    }
}

/// Loads the config, runs the command and maps errors to exit codes.
pub fn run(command: Command, config: &Path, out: &Path, seed: Option<u64>) -> Outcome {
    let result = ExperimentConfig::load(config).and_then(|cfg| {
        fs::create_dir_all(out)?;
        let seed = cfg.seed(seed);
        match command {
            Command::Eig => cmd_eig(&cfg, out),
            Command::Solve => cmd_solve(&cfg, out, seed),
            Command::AmpSweep => cmd_amp_sweep(&cfg, out, seed),
            Command::Scan => cmd_scan(&cfg, out),
            Command::Continuation => cmd_continuation(&cfg, out),
            Command::Verify => cmd_verify(&cfg, out, seed),
        }
    });
    result.unwrap_or_else(|e| Outcome {
        exit_code: exit_code(&e),
        summary: format!("error: {e}"),
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn eigen_row(p: &EigenPair) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        p.sign.symbol(),
        num(p.lambda),
        num(p.residual),
        num(p.rayleigh_lo),
        num(p.rayleigh_hi),
        p.iterations,
        p.converged
    )
}

/// `eig.csv`, `phi_plus.csv`, `phi_minus.csv`.
pub fn cmd_eig(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let (plus, minus) = half_eigenpairs(&cfg.operator, cfg.grid.clone(), &cfg.eigen_options())?;
    let mut csv = String::from("sign,lambda,residual,rayleigh_lo,rayleigh_hi,iterations,converged\n");
    csv.push_str(&eigen_row(&plus));
    csv.push_str(&eigen_row(&minus));
    fs::write(out.join("eig.csv"), csv)?;
    plus.phi.write_csv(out.join("phi_plus.csv"))?;
    minus.phi.write_csv(out.join("phi_minus.csv"))?;
    let ok = plus.converged && minus.converged;
    let summary = format!(
        "lambda1+ = {}  lambda1- = {}  (h = {:?}){}",
        plus.lambda,
        minus.lambda,
        cfg.grid.h(),
        if ok { "" } else { "  NOT CONVERGED" }
    );
    Ok(Outcome::new(ok, EXIT_NO_CONVERGENCE, summary))
}

fn resolve_lambda(cfg: &ExperimentConfig, spec: &LambdaSpec) -> Result<f64> {
    if !spec.needs_eigen() {
        return Ok(spec.resolve(f64::NAN, f64::NAN));
    }
    let (p, m) = half_eigenpairs(&cfg.operator, cfg.grid.clone(), &cfg.eigen_options())?;
    Ok(spec.resolve(p.lambda, m.lambda))
}

/// `solution.csv`, `report.txt`; exit 0 iff converged.
pub fn cmd_solve(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<Outcome> {
    let lambda = resolve_lambda(cfg, cfg.require_lambda()?)?;
    let f = cfg.forcing()?;
    let rep = solve_dirichlet(&cfg.operator, lambda, &f, &cfg.solve_options(seed))?;
    rep.u.write_csv(out.join("solution.csv"))?;
    let mut text = format!("lambda: {}\nh: {:?}\n", num(lambda), cfg.grid.h());
    text.push_str(&rep.summary());
    fs::write(out.join("report.txt"), &text)?;
    let summary = format!(
        "lambda = {lambda}: converged = {}, residual = {:e}, u in [{}, {}]",
        rep.converged,
        rep.final_residual(),
        rep.u.interior_min(),
        rep.u.interior_max()
    );
    Ok(Outcome::new(rep.converged, EXIT_NO_CONVERGENCE, summary))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignVerdict {
    AllNegative,
    AllPositive,
    Mixed,
    Unsolved,
}

impl SignVerdict {
    pub fn of(converged: bool, min_u: f64, max_u: f64) -> Self {
        if !converged {
            SignVerdict::Unsolved
        } else if max_u < 0.0 {
            SignVerdict::AllNegative
        } else if min_u > 0.0 {
            SignVerdict::AllPositive
        } else {
            SignVerdict::Mixed
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignVerdict::AllNegative => "all_negative",
            SignVerdict::AllPositive => "all_positive",
            SignVerdict::Mixed => "mixed",
            SignVerdict::Unsolved => "unsolved",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmpSweepRow {
    pub eta: f64,
    pub lambda: f64,
    pub converged: bool,
    pub min_u: f64,
    pub max_u: f64,
    pub sign_verdict: SignVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmpSweep {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Verdict the anti-maximum principle predicts for small `η`.
    pub expected: SignVerdict,
    pub rows: Vec<AmpSweepRow>,
}

impl AmpSweep {
    /// Largest `η` with the predicted verdict.
    pub fn largest_eta(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.sign_verdict == self.expected)
            .map(|r| r.eta)
            .fold(None, |a: Option<f64>, e| Some(a.map_or(e, |a| a.max(e))))
    }

    /// First `η` of the longest suffix of the sweep in which every converged
    /// row has the predicted verdict and at least one row converged.
    pub fn one_signed_suffix(&self) -> Option<f64> {
        let mut start = None;
        let mut any = false;
        for r in self.rows.iter().rev() {
            match r.sign_verdict {
                SignVerdict::Unsolved => {}
                v if v == self.expected => any = true,
                _ => break,
            }
            if any {
                start = Some(r.eta);
            }
        }
        start
    }
}

/// Solves at `λ = λ₁⁻ + η` (for `f >= 0`) or `λ = λ₁⁺ + η` (for `f <= 0`)
/// over the configured `η` list.
pub fn amp_sweep(cfg: &ExperimentConfig, seed: u64) -> Result<AmpSweep> {
    let etas = cfg
        .run
        .eta
        .as_ref()
        .ok_or_else(|| Error::Config("run.eta is required".into()))?;
    if etas.is_empty() || etas.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Config(
            "every eta must be positive: at eta = 0 lambda is a principal eigenvalue".into(),
        ));
    }
    let f = cfg.forcing()?;
    let nonneg = f.interior().iter().all(|&v| v >= 0.0);
    let nonpos = f.interior().iter().all(|&v| v <= 0.0);
    if f.interior_sup_norm() == 0.0 || !(nonneg || nonpos) {
        return Err(Error::InvalidInput("f must be one-signed and not identically zero".into()));
    }
    let (p, m) = half_eigenpairs(&cfg.operator, cfg.grid.clone(), &cfg.eigen_options())?;
    let tol = 1e-6 * (1.0 + p.lambda.abs().max(m.lambda.abs()));
    let (base, expected) = if nonneg {
        if p.lambda > m.lambda + tol {
            return Err(Error::InvalidInput(format!(
                "f >= 0 needs lambda1+ <= lambda1-, computed {} > {}",
                p.lambda, m.lambda
            )));
        }
        (m.lambda, SignVerdict::AllNegative)
    } else {
        if m.lambda > p.lambda + tol {
            return Err(Error::InvalidInput(format!(
                "f <= 0 needs lambda1- <= lambda1+, computed {} > {}",
                m.lambda, p.lambda
            )));
        }
        (p.lambda, SignVerdict::AllPositive)
    };
    let opts = cfg.solve_options(seed);
    let mut rows = Vec::with_capacity(etas.len());
    for &eta in etas {
        let lambda = base + eta;
        let rep = solve_dirichlet(&cfg.operator, lambda, &f, &opts)?;
        let (min_u, max_u) = (rep.u.interior_min(), rep.u.interior_max());
        rows.push(AmpSweepRow {
            eta,
            lambda,
            converged: rep.converged,
            min_u,
            max_u,
            sign_verdict: SignVerdict::of(rep.converged, min_u, max_u),
        });
    }
    Ok(AmpSweep {
        lambda_plus: p.lambda,
        lambda_minus: m.lambda,
        expected,
        rows,
    })
}

/// `amp.csv` and `amp.txt`.
pub fn cmd_amp_sweep(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<Outcome> {
    let sweep = amp_sweep(cfg, seed)?;
    let mut csv = String::from("eta,lambda,converged,min_u,max_u,sign_verdict\n");
    for r in &sweep.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            num(r.eta),
            num(r.lambda),
            r.converged,
            num(r.min_u),
            num(r.max_u),
            r.sign_verdict.as_str()
        );
    }
    fs::write(out.join("amp.csv"), csv)?;
    let fmt = |v: Option<f64>| v.map_or("none".to_string(), num);
    let text = format!(
        "lambda1_plus: {}\nlambda1_minus: {}\nexpected_verdict: {}\nlargest_eta_with_expected_verdict: {}\none_signed_suffix_from_eta: {}\n",
        num(sweep.lambda_plus),
        num(sweep.lambda_minus),
        sweep.expected.as_str(),
        fmt(sweep.largest_eta()),
        fmt(sweep.one_signed_suffix())
    );
    fs::write(out.join("amp.txt"), &text)?;
    Ok(Outcome::new(true, EXIT_OK, text))
}

/// `scan.csv` and `lambda2.txt`; 1D only.
pub fn cmd_scan(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    if cfg.grid.dim() != 1 {
        return Err(Error::Unsupported("spectrum scans are 1D only".into()));
    }
    let range = cfg
        .run
        .lambda_range
        .ok_or_else(|| Error::Config("run.lambda_range is required".into()))?;
    let domain = (cfg.grid.lo()[0], cfg.grid.hi()[0]);
    let resolution = cfg.run.resolution.unwrap_or(200);
    let scan = lambda2_scan_1d(&cfg.operator, domain, (range[0], range[1]), resolution, &ShootOptions::default())?;
    let mut csv = String::from("lambda,end_plus,end_minus,zeros_plus,zeros_minus,outcome\n");
    for r in &scan.rows {
        let outcome = serde_json::to_value(r.outcome).expect("enum serializes");
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            num(r.lambda),
            num(r.end_plus),
            num(r.end_minus),
            r.zeros_plus,
            r.zeros_minus,
            outcome.as_str().unwrap_or_default()
        );
    }
    fs::write(out.join("scan.csv"), csv)?;
    let mut text = format!(
        "lambda2_estimate: {}\ngap_from_range_start: {}\neigenvalues:\n",
        scan.lambda2_estimate.map_or("none".into(), num),
        num(scan.gap)
    );
    for (l, slope, zc) in &scan.eigenvalues {
        let _ = writeln!(text, "  {} slope {slope:+} zeros {zc}", num(*l));
    }
    fs::write(out.join("lambda2.txt"), &text)?;
    Ok(Outcome::new(true, EXIT_OK, text))
}

/// `continuation.csv` and `continuation.txt`.
pub fn cmd_continuation(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let n = cfg.run.n_steps.unwrap_or(11);
    let eig = cfg.eigen_options();
    let table = continuation_sweep(&cfg.operator, n, cfg.grid.clone(), &eig)?;
    let mut csv = String::from("s,lambda_plus,lambda_minus,ok,error\n");
    for r in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            num(r.s),
            num(r.lambda_plus),
            num(r.lambda_minus),
            r.ok,
            quote(r.error.as_deref().unwrap_or(""))
        );
    }
    fs::write(out.join("continuation.csv"), csv)?;
    let lap = OperatorSpec::laplacian(cfg.grid.dim())?;
    let reference = table.big_gamma * principal_eigenpair(&lap, cfg.grid.clone(), EigenSign::Positive, &eig)?.lambda;
    let last = table.rows.last().expect("at least two rows");
    let text = format!(
        "Gamma: {}\nGamma * lambda1(laplacian): {}\nend_deviation: {}\nmax_step_jump: {}\ncomplete: {}\n",
        num(table.big_gamma),
        num(reference),
        num((last.lambda_plus - reference).abs().max((last.lambda_minus - reference).abs())),
        num(table.max_jump()),
        table.complete()
    );
    fs::write(out.join("continuation.txt"), &text)?;
    Ok(Outcome::new(table.complete(), EXIT_NO_CONVERGENCE, text))
}

/// The property suite with the config's overrides applied.
pub fn verify_reports(cfg: &ExperimentConfig, seed: u64) -> Vec<PropertyReport> {
    let mut suite = SuiteConfig::new(cfg.operator.clone(), cfg.grid.clone(), seed);
    if let Some(s) = cfg.run.samples {
        suite.samples = s;
    }
    if let Some(t) = cfg.run.trials {
        suite.trials = t;
    }
    suite.solve = cfg.solve_options(seed);
    let mut reports = run_suite(&suite);
    if let Some(band) = &cfg.run.band {
        if let Some(r) = reports.iter_mut().find(|r| r.name == "structure") {
            *r = check_structure_against(&cfg.operator, band, &cfg.grid, suite.samples, seed).unwrap_or_else(|e| {
                let mut r = r.clone();
                r.passed = false;
                r.detail = format!("error: {e}");
                r
            });
        }
    }
    reports
}

/// `verify.csv` and, on failure, `counterexamples.json`; exit 3 on any
/// failed property.
pub fn cmd_verify(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<Outcome> {
    let reports = verify_reports(cfg, seed);
    let mut csv = String::from("name,passed,skipped,margin,detail\n");
    let mut table = String::new();
    for r in &reports {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.name,
            r.passed,
            r.skipped.is_some(),
            num(r.margin),
            quote(r.skipped.as_deref().unwrap_or(&r.detail))
        );
        let status = match (r.passed, &r.skipped) {
            (_, Some(_)) => "SKIP",
            (true, None) => "PASS",
            (false, None) => "FAIL",
        };
        let _ = writeln!(table, "{status}  {:<24} margin {:>12.4e}  {}", r.name, r.margin, r.skipped.as_deref().unwrap_or(&r.detail));
    }
    fs::write(out.join("verify.csv"), csv)?;
    let failed: Vec<&PropertyReport> = reports.iter().filter(|r| !r.passed).collect();
    if !failed.is_empty() {
        let json = serde_json::to_string_pretty(&failed).map_err(|e| Error::InvalidInput(e.to_string()))?;
        fs::write(out.join("counterexamples.json"), json)?;
    }
    Ok(Outcome::new(failed.is_empty(), EXIT_VERIFY_FAILED, table))
}
