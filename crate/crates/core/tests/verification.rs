use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use halfeig::experiments::{verify_reports, ExperimentConfig};
use halfeig::operator::{EnvelopeSide, InfSup};
use halfeig::solvers::{
    half_eigenpairs, principal_eigenpair, solve_dirichlet, EigenOptions, EigenSign, SolveOptions,
};
use halfeig::verification::*;
use halfeig::{Grid, GridFunction, LinearCoeffs, OperatorSpec};

fn interval(lo: f64, hi: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::interval(lo, hi, n).unwrap())
}

fn pm() -> OperatorSpec {
    OperatorSpec::pucci_minus(1.0, 2.0).unwrap()
}

fn lin(a: f64, b: f64) -> LinearCoeffs {
    LinearCoeffs::constant(&[a], &[b], 0.0).unwrap()
}

fn min_example() -> OperatorSpec {
    OperatorSpec::inf_sup(InfSup::inf_of(vec![lin(1.0, 0.0), lin(2.0, 0.0)]).unwrap()).unwrap()
}

fn config(name: &str) -> ExperimentConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    ExperimentConfig::load(&path).unwrap()
}

fn sine(g: &Arc<Grid>) -> GridFunction {
    GridFunction::from_fn(g.clone(), |x| x[0].sin()).unwrap().with_zero_boundary()
}

#[test]
fn comparison_small_laplacian_and_pucci() {
    let g = Grid::interval(0.0, 1.0, 5).unwrap();
    let r = check_comparison_small(&OperatorSpec::laplacian(1).unwrap(), &g, 5, 50, 0).unwrap();
    assert!(r.passed, "{r:?}");
    let r = check_comparison_small(&pm(), &g, 7, 100, 1).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.detail.starts_with("100/100"));
    let g2 = Grid::square(0.0, 1.0, 3).unwrap();
    let r = check_comparison_small(&pm(), &g2, 9, 30, 2).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn comparison_with_equal_data_gives_equal_solutions() {
    let g = interval(0.0, 1.0, 7);
    let f = GridFunction::from_fn(g.clone(), |x| (3.0 * x[0]).cos()).unwrap().with_zero_boundary();
    let a = solve_dirichlet(&pm(), 0.0, &f, &SolveOptions::default()).unwrap();
    let b = solve_dirichlet(&pm(), 0.0, &f, &SolveOptions { seed: 9, ..SolveOptions::default() }).unwrap();
    assert_eq!(a.u.values(), b.u.values());
}

#[test]
fn hopf_quotients_of_computed_eigenfunctions() {
    let g = interval(0.0, PI, 201);
    let (p, m) = half_eigenpairs(&pm(), g.clone(), &EigenOptions::default()).unwrap();
    assert!(check_hopf(&p.phi, EigenSign::Positive).passed);
    let r = check_hopf(&m.phi, EigenSign::Negative);
    assert!(r.passed && r.margin > 0.0);
    let h = g.h()[0];
    let n = g.n_interior_per_axis();
    let first = g.node_at([1, 0]).unwrap();
    let last = g.node_at([n, 0]).unwrap();
    assert!(m.phi.values()[first] / h < 0.0 && m.phi.values()[last] / h < 0.0);
    assert!(!check_hopf(&p.phi, EigenSign::Negative).passed);
}

#[test]
fn sine_has_unit_boundary_slope() {
    let g = interval(0.0, PI, 401);
    let r = check_hopf(&sine(&g), EigenSign::Positive);
    assert!(r.passed);
    assert!((r.margin + 0.01 / PI - 1.0).abs() < 1e-4);
}

#[test]
fn bnv_laplacian_passes() {
    let r = check_bnv_proportionality(&OperatorSpec::laplacian(1).unwrap(), interval(0.0, 1.0, 201), &EigenOptions::default())
        .unwrap();
    assert!(r.passed && r.skipped.is_none(), "{r:?}");
}

#[test]
fn bnv_min_example_skipped_but_eigenfunctions_coincide() {
    let r = check_bnv_proportionality(&min_example(), interval(0.0, 1.0, 201), &EigenOptions::default()).unwrap();
    assert!(r.skipped.is_some());
    assert!(r.margin <= 1e-4, "separation {}", r.margin);
}

#[test]
fn bnv_pucci_minus_2d_eigenfunctions_are_not_proportional() {
    let g = Arc::new(Grid::square(0.0, PI, 33).unwrap());
    let r = check_bnv_proportionality(&pm(), g, &EigenOptions::default()).unwrap();
    assert!(r.skipped.is_some());
    assert!(r.margin > 1e-2, "separation {}", r.margin);
}

#[test]
fn envelope_comparison_pucci_and_linear() {
    let e = EigenOptions::default();
    let r = check_envelope_comparison(&pm(), interval(0.0, PI, 41), 50, 3, &e).unwrap();
    assert!(r.passed && r.skipped.is_none(), "{r:?}");
    let op = OperatorSpec::linear(lin(1.0, 2.0)).unwrap();
    let r = check_envelope_comparison(&op, interval(0.0, 1.0, 41), 50, 4, &e).unwrap();
    assert!(r.passed && r.skipped.is_none(), "{r:?}");
}

#[test]
fn envelope_comparison_shrinks_domain_until_positive() {
    // c = -30 makes lambda1 of the unit interval negative; half the interval is fine.
    let op = OperatorSpec::linear(LinearCoeffs::constant(&[1.0], &[], -30.0).unwrap()).unwrap();
    let r = check_envelope_comparison(&op, interval(0.0, 1.0, 41), 20, 5, &EigenOptions::default()).unwrap();
    assert!(r.passed && r.skipped.is_none(), "{r:?}");
    assert!(r.detail.contains("diameter 0.5"), "{}", r.detail);
}

#[test]
fn nonexistence_window_pucci_minus() {
    let g = interval(0.0, PI, 801);
    let (r, rows) =
        check_nonexistence_window(&pm(), &sine(&g), &[1.0, 1.5, 2.0], &SolveOptions::default(), &EigenOptions::default())
            .unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.detail.contains("evidence only"));
    assert!(rows.iter().all(|w| w.in_window && !w.converged));
}

#[test]
fn nonexistence_window_distinguishes_solvable_lambda() {
    let g = interval(0.0, PI, 201);
    let (r, rows) =
        check_nonexistence_window(&pm(), &sine(&g), &[0.5, 1.5], &SolveOptions::default(), &EigenOptions::default())
            .unwrap();
    assert!(r.passed);
    assert!(!rows[0].in_window && rows[0].converged);
    assert!(rows[1].in_window && !rows[1].converged);
}

#[test]
fn nonexistence_window_for_nonpositive_forcing() {
    // f <= 0: window [lambda1-, lambda1+]; for P+ that is [1, 2]
    let g = interval(0.0, PI, 201);
    let f = sine(&g).scaled(-1.0);
    let op = OperatorSpec::pucci_plus(1.0, 2.0).unwrap();
    let (r, _) = check_nonexistence_window(&op, &f, &[1.2, 1.8], &SolveOptions::default(), &EigenOptions::default()).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn nonexistence_window_rejects_sign_changing_forcing() {
    let g = interval(0.0, PI, 51);
    let f = GridFunction::from_fn(g.clone(), |x| (2.0 * x[0]).sin()).unwrap().with_zero_boundary();
    assert!(check_nonexistence_window(&pm(), &f, &[1.5], &SolveOptions::default(), &EigenOptions::default()).is_err());
}

#[test]
fn envelope_ordering_on_inf_sup_examples() {
    let e = EigenOptions::default();
    let isaacs = OperatorSpec::inf_sup(
        InfSup::new(vec![vec![lin(1.0, 0.0), lin(2.0, 0.5)], vec![lin(1.5, 0.0), lin(1.2, -0.5)]]).unwrap(),
    )
    .unwrap();
    for op in [min_example(), config("bellman.toml").operator, isaacs] {
        let r = check_envelope_ordering(&op, interval(0.0, 1.0, 201), &e).unwrap();
        assert!(r.passed && r.skipped.is_none(), "{r:?}");
    }
    let r = check_envelope_ordering(&pm(), interval(0.0, PI, 51), &e).unwrap();
    assert!(r.skipped.is_some());
}

/// The lower envelope of min{-u'', -2u''} is the operator itself; its
/// negative half-eigenvalue is the top of the bracket, not the bottom.
#[test]
fn lower_envelope_negative_eigenvalue_bounds_from_above() {
    let g = interval(0.0, 1.0, 201);
    let e = EigenOptions::default();
    let op = min_example();
    let lower = op.difference_bound(EnvelopeSide::Lower);
    let l_minus = principal_eigenpair(&lower, g.clone(), EigenSign::Negative, &e).unwrap().lambda;
    let (p, m) = half_eigenpairs(&op, g, &e).unwrap();
    assert!(l_minus > p.lambda.min(m.lambda) + 1.0);
    assert!((l_minus - p.lambda.max(m.lambda)).abs() < 1e-6 * l_minus);
}

#[test]
fn bellman_chain_pure_sup_and_pure_inf() {
    let e = EigenOptions::default();
    let r = check_bellman_chain(&config("bellman.toml").operator, interval(0.0, 1.0, 201), &e).unwrap();
    assert!(r.passed && r.skipped.is_none(), "{r:?}");
    let r = check_bellman_chain(&min_example(), interval(0.0, 1.0, 201), &e).unwrap();
    assert!(r.passed && r.skipped.is_none(), "{r:?}");
}

#[test]
fn simplicity_and_domain_monotonicity() {
    let e = EigenOptions::default();
    let g = interval(0.0, 1.0, 101);
    for sign in [EigenSign::Positive, EigenSign::Negative] {
        assert!(check_simplicity(&pm(), g.clone(), sign, 7, &e).unwrap().passed);
    }
    assert!(check_domain_monotonicity(&pm(), g, &e).unwrap().passed);
}

#[test]
fn broken_band_counterexample_replays_after_serialization() {
    let reports = verify_reports(&config("verify_broken_band.toml"), 0);
    let bad: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    assert!(!bad.is_empty());
    for r in bad {
        let cex = r.counterexample.as_ref().expect("failed report carries a counterexample");
        let json = serde_json::to_string(cex).unwrap();
        let back: Counterexample = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, cex);
        assert!(replay(&back).unwrap(), "{} does not replay", r.name);
    }
}

#[test]
fn hopf_counterexample_replays() {
    let g = interval(0.0, 1.0, 11);
    let r = check_hopf(&GridFunction::zeros(g), EigenSign::Negative);
    assert!(!r.passed);
    assert!(replay(r.counterexample.as_ref().unwrap()).unwrap());
}

#[test]
fn comparison_counterexample_replays_when_data_are_misordered() {
    let g = interval(0.0, 1.0, 5);
    let f_v = GridFunction::zeros(g.clone());
    let f_u = GridFunction::from_fn(g.clone(), |_| 1.0).unwrap().with_zero_boundary();
    let cex = Counterexample::Comparison {
        op: OperatorSpec::laplacian(1).unwrap(),
        f_u: FieldData { grid: (*g).clone(), values: f_u.values().to_vec() },
        f_v: FieldData { grid: (*g).clone(), values: f_v.values().to_vec() },
        g_u: FieldData { grid: (*g).clone(), values: vec![0.0; g.num_nodes()] },
        g_v: FieldData { grid: (*g).clone(), values: vec![0.0; g.num_nodes()] },
        opts: SolveOptions::default(),
        tol: 1e-10,
    };
    assert!(replay(&cex).unwrap());
}

#[test]
fn shipped_verify_config_passes_all_properties() {
    let reports = verify_reports(&config("verify.toml"), 0);
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    for expected in [
        "homogeneity",
        "structure",
        "envelope_sandwich",
        "envelope_convexity",
        "envelope_reflection",
        "monotone_stencil",
        "eigen_sign_residual+",
        "simplicity-",
        "domain_monotonicity",
        "envelope_ordering",
        "bellman_chain",
        "comparison_small",
        "hopf+",
        "bnv_proportionality",
        "envelope_comparison",
        "nonexistence_window",
    ] {
        assert!(names.contains(&expected), "missing {expected}");
    }
    assert!(reports.iter().all(|r| r.passed), "{reports:#?}");
}
