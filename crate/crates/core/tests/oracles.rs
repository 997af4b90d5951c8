//! Closed-form oracles for the discrete scheme.
//!
//! On a uniform grid of spacing `h`, `sin(k x)` restricted to the nodes is an
//! eigenvector of the three-point second difference with eigenvalue
//! `mu_h = (4 / h^2) sin^2(k h / 2)`. A one-signed multiple of it has
//! one-signed second differences, so each piecewise-linear operator below
//! acts on it as a fixed linear operator and every value is exact up to
//! rounding.

use std::f64::consts::PI;
use std::sync::Arc;

use halfeig::operator::InfSup;
use halfeig::solvers::{
    continuation_sweep, half_eigenpairs, lambda2_scan_1d, principal_eigenpair, solve_dirichlet, EigenOptions,
    EigenSign, ShootOptions, SolveOptions,
};
use halfeig::{Grid, GridFunction, LinearCoeffs, OperatorSpec};

fn mu_h(h: f64, k: f64) -> f64 {
    4.0 / (h * h) * (0.5 * k * h).sin().powi(2)
}

fn interval(lo: f64, hi: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::interval(lo, hi, n).unwrap())
}

fn pm() -> OperatorSpec {
    OperatorSpec::pucci_minus(1.0, 2.0).unwrap()
}

fn sine(g: &Arc<Grid>, k: f64) -> GridFunction {
    GridFunction::from_fn(g.clone(), |x| (k * x[0]).sin()).unwrap().with_zero_boundary()
}

#[test]
fn laplacian_1d_eigenvalue_is_discrete_sine_mode() {
    let g = interval(0.0, 1.0, 801);
    let (p, m) = half_eigenpairs(&OperatorSpec::laplacian(1).unwrap(), g.clone(), &EigenOptions::default()).unwrap();
    let exact = mu_h(g.h()[0], PI);
    assert!((p.lambda - exact).abs() < 1e-8, "{} vs {exact}", p.lambda);
    assert!((m.lambda - exact).abs() < 1e-8);
    let s = sine(&g, PI);
    assert!(p.phi.sub(&s).sup_norm() < 1e-7);
}

#[test]
fn pucci_minus_half_eigenvalues_are_gamma_and_big_gamma_multiples() {
    let g = interval(0.0, PI, 801);
    let (p, m) = half_eigenpairs(&pm(), g.clone(), &EigenOptions::default()).unwrap();
    let mu = mu_h(g.h()[0], 1.0);
    assert!((p.lambda - mu).abs() < 1e-8, "{} vs {mu}", p.lambda);
    assert!((m.lambda - 2.0 * mu).abs() < 1e-8, "{} vs {}", m.lambda, 2.0 * mu);
    // same shape, opposite sign
    assert!(p.phi.add(&m.phi).sup_norm() < 1e-7);
}

#[test]
fn min_example_half_eigenvalues() {
    let lin = |a: f64| LinearCoeffs::constant(&[a], &[], 0.0).unwrap();
    let op = OperatorSpec::inf_sup(InfSup::inf_of(vec![lin(1.0), lin(2.0)]).unwrap()).unwrap();
    let g = interval(0.0, 1.0, 401);
    let (p, m) = half_eigenpairs(&op, g.clone(), &EigenOptions::default()).unwrap();
    let mu = mu_h(g.h()[0], PI);
    assert!((p.lambda - mu).abs() < 1e-8);
    assert!((m.lambda - 2.0 * mu).abs() < 1e-7);
}

#[test]
fn laplacian_2d_eigenvalue_is_sum_of_axis_modes() {
    let g = Arc::new(Grid::square(0.0, PI, 33).unwrap());
    let p = principal_eigenpair(&OperatorSpec::laplacian(2).unwrap(), g.clone(), EigenSign::Positive, &EigenOptions::default())
        .unwrap();
    let exact = 2.0 * mu_h(g.h()[0], 1.0);
    assert!((p.lambda - exact).abs() < 1e-8, "{} vs {exact}", p.lambda);
}

#[test]
fn poisson_with_constant_source_is_exact_on_quadratics() {
    let g = interval(0.0, 1.0, 99);
    let f = GridFunction::from_fn(g.clone(), |_| 2.0).unwrap().with_zero_boundary();
    let r = solve_dirichlet(&OperatorSpec::laplacian(1).unwrap(), 0.0, &f, &SolveOptions::default()).unwrap();
    assert!(r.converged);
    for k in g.interior_nodes() {
        let x = g.coords(k)[0];
        assert!((r.u.values()[k] - x * (1.0 - x)).abs() < 1e-10);
    }
}

#[test]
fn pucci_minus_solutions_with_sine_source() {
    let g = interval(0.0, PI, 201);
    let mu = mu_h(g.h()[0], 1.0);
    let f = sine(&g, 1.0);
    let opts = SolveOptions::default();
    // below lambda1+: positive, concave, gamma acts
    let r = solve_dirichlet(&pm(), 0.5, &f, &opts).unwrap();
    let c = 1.0 / (mu - 0.5);
    assert!(r.converged && r.u.sub(&f.scaled(c)).sup_norm() < 1e-8 * c);
    // above lambda1-: negative, convex, Gamma acts
    for eta in [0.5, 0.05, 0.01] {
        let lambda = 2.0 * mu + eta;
        let r = solve_dirichlet(&pm(), lambda, &f, &opts).unwrap();
        let c = 1.0 / (2.0 * mu - lambda);
        assert!(r.converged, "eta {eta}");
        assert!(r.u.sub(&f.scaled(c)).sup_norm() < 1e-7 * c.abs(), "eta {eta}");
    }
}

#[test]
fn second_eigenvalues_by_shooting() {
    let o = ShootOptions::default();
    let r = lambda2_scan_1d(&pm(), (0.0, PI), (2.01, 12.0), 100, &o).unwrap();
    let exact = (1.0 + 2f64.sqrt()).powi(2);
    let l2 = r.lambda2_estimate.unwrap();
    assert!((l2 - exact).abs() < 1e-6, "{l2} vs {exact}");
    let r = lambda2_scan_1d(&OperatorSpec::laplacian(1).unwrap(), (0.0, 1.0), (10.0, 50.0), 100, &o).unwrap();
    assert!((r.lambda2_estimate.unwrap() - 4.0 * PI * PI).abs() < 1e-6);
}

#[test]
fn continuation_rows_follow_interpolated_constants() {
    let g = interval(0.0, PI, 201);
    let mu = mu_h(g.h()[0], 1.0);
    let t = continuation_sweep(&pm(), 6, g, &EigenOptions::default()).unwrap();
    for r in &t.rows {
        // positive mode sees s*Gamma + (1 - s)*gamma, negative mode Gamma
        let plus = (2.0 * r.s + (1.0 - r.s)) * mu;
        assert!((r.lambda_plus - plus).abs() < 1e-8, "s={} {} vs {plus}", r.s, r.lambda_plus);
        assert!((r.lambda_minus - 2.0 * mu).abs() < 1e-8);
    }
}
