//! Discrete checks of the structural theorems: comparison, Hopf boundary
//! behaviour, proportionality of eigenfunctions, envelope comparison and
//! nonexistence windows, plus the suite that drives them.
//!
//! Every failing check carries a serializable [`Counterexample`];
//! [`replay`] re-runs it and reports whether the failure reproduces.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretization::check_monotone;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operator::{
    check_homogeneity, check_structure, Band, EnvelopeSide, Jet, OperatorSpec, SymMatrix,
};
use crate::solvers::{
    principal_eigenpair, principal_eigenpair_from, solve_dirichlet, solve_dirichlet_with_boundary,
    EigenOptions, EigenPair, EigenSign, SolveOptions,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub passed: bool,
    /// Reason the property was not applicable; a skipped report counts as
    /// passed.
    pub skipped: Option<String>,
    pub counterexample: Option<Counterexample>,
    /// Worst slack observed; negative on failure.
    pub margin: f64,
    pub detail: String,
}

impl PropertyReport {
    fn pass(name: &str, margin: f64, detail: impl Into<String>) -> Self {
        PropertyReport {
            name: name.into(),
            passed: true,
            skipped: None,
            counterexample: None,
            margin,
            detail: detail.into(),
        }
    }

    fn fail(name: &str, margin: f64, detail: impl Into<String>, cex: Counterexample) -> Self {
        PropertyReport {
            name: name.into(),
            passed: false,
            skipped: None,
            counterexample: Some(cex),
            margin,
            detail: detail.into(),
        }
    }

    fn skip(name: &str, reason: impl Into<String>) -> Self {
        PropertyReport {
            name: name.into(),
            passed: true,
            skipped: Some(reason.into()),
            counterexample: None,
            margin: f64::NAN,
            detail: String::new(),
        }
    }

    fn verdict(name: &str, ok: bool, margin: f64, detail: String, cex: impl FnOnce() -> Counterexample) -> Self {
        if ok {
            Self::pass(name, margin, detail)
        } else {
            Self::fail(name, margin, detail, cex())
        }
    }
}

/// Serialized nodal field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldData {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl FieldData {
    fn of(u: &GridFunction) -> Self {
        FieldData {
            grid: u.grid().as_ref().clone(),
            values: u.values().to_vec(),
        }
    }

    fn field(&self) -> Result<GridFunction> {
        GridFunction::new(Arc::new(self.grid.clone()), self.values.clone())
    }
}

/// Inputs that reproduce a failed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Counterexample {
    Homogeneity { op: OperatorSpec, jet: Jet, t: f64, rel_tol: f64 },
    Structure { op: OperatorSpec, band: Band, j1: Jet, j2: Jet, tol: f64 },
    EnvelopeSandwich { op: OperatorSpec, j1: Jet, j2: Jet, tol: f64 },
    EnvelopeConvexity { op: OperatorSpec, j1: Jet, j2: Jet, tol: f64 },
    EnvelopeReflection { op: OperatorSpec, jet: Jet, tol: f64 },
    Monotone { op: OperatorSpec, u: FieldData, node: usize, eps: f64 },
    Comparison {
        op: OperatorSpec,
        f_u: FieldData,
        f_v: FieldData,
        g_u: FieldData,
        g_v: FieldData,
        opts: SolveOptions,
        tol: f64,
    },
    Hopf { phi: FieldData, sign: EigenSign },
    /// Deterministic rerun of a whole property.
    Rerun { property: String, op: OperatorSpec, grid: Grid, seed: u64 },
}

fn random_jet(rng: &mut ChaCha8Rng, grid: &Grid) -> Jet {
    let mut r = || rng.random_range(-3.0..3.0);
    let m = if grid.dim() == 1 {
        SymMatrix::scalar(r())
    } else {
        SymMatrix::new2(r(), r(), r())
    };
    let p = if grid.dim() == 1 { [r(), 0.0] } else { [r(), r()] };
    let z = r();
    let mut x = [0.0; 2];
    for (i, xi) in x.iter_mut().enumerate().take(grid.dim()) {
        *xi = rng.random_range(grid.lo()[i]..=grid.hi()[i]);
    }
    Jet::new(m, p, z, x)
}

fn random_pair(rng: &mut ChaCha8Rng, grid: &Grid) -> (Jet, Jet) {
    let a = random_jet(rng, grid);
    let mut b = random_jet(rng, grid);
    b.x = a.x;
    (a, b)
}

/// Positive homogeneity of `op` on random jets for `t ∈ {0, 0.5, 1, 2, 10}`.
pub fn check_homogeneity_property(op: &OperatorSpec, grid: &Grid, samples: usize, seed: u64) -> Result<PropertyReport> {
    let name = "homogeneity";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jets: Vec<Jet> = (0..samples).map(|_| random_jet(&mut rng, grid)).collect();
    let ts = [0.0, 0.5, 1.0, 2.0, 10.0];
    let rel_tol = 1e-12;
    let r = check_homogeneity(op, &jets, &ts, rel_tol)?;
    Ok(match r.failures.first() {
        None => PropertyReport::pass(name, r.worst_margin, format!("{} evaluations", r.checked)),
        Some(f) => {
            let t = ts[0];
            PropertyReport::fail(
                name,
                -f.excess,
                f.detail.clone(),
                Counterexample::Homogeneity {
                    op: op.clone(),
                    jet: jets[f.index],
                    t: f.detail.split_once(':').and_then(|(a, _)| a.trim_start_matches("t=").parse().ok()).unwrap_or(t),
                    rel_tol,
                },
            )
        }
    })
}

/// Structure sandwich against the operator's own band.
pub fn check_structure_property(op: &OperatorSpec, grid: &Grid, samples: usize, seed: u64) -> Result<PropertyReport> {
    check_structure_against(op, &op.band()?, grid, samples, seed)
}

/// Structure sandwich against a declared band.
pub fn check_structure_against(
    op: &OperatorSpec,
    band: &Band,
    grid: &Grid,
    samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let name = "structure";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Jet, Jet)> = (0..samples).map(|_| random_pair(&mut rng, grid)).collect();
    let tol = 1e-10;
    let r = check_structure(op, band, &pairs, tol)?;
    Ok(match r.failures.first() {
        None => PropertyReport::pass(name, r.worst_margin, format!("{} pairs", r.checked)),
        Some(f) => PropertyReport::fail(
            name,
            -f.excess,
            f.detail.clone(),
            Counterexample::Structure {
                op: op.clone(),
                band: *band,
                j1: pairs[f.index].0,
                j2: pairs[f.index].1,
                tol,
            },
        ),
    })
}

fn sandwich_margin(op: &OperatorSpec, j1: &Jet, j2: &Jet) -> Result<f64> {
    let upper = op.difference_bound(EnvelopeSide::Upper);
    let lower = op.difference_bound(EnvelopeSide::Lower);
    let d = j1.sub(j2);
    let diff = op.eval(j1)? - op.eval(j2)?;
    Ok((upper.eval(&d)? - diff).min(diff - lower.eval(&d)?))
}

fn convexity_margin(op: &OperatorSpec, j1: &Jet, j2: &Jet) -> Result<f64> {
    let upper = op.difference_bound(EnvelopeSide::Upper);
    let lower = op.difference_bound(EnvelopeSide::Lower);
    let mid = j1.add(j2).scale(0.5);
    let up = 0.5 * upper.eval(j1)? + 0.5 * upper.eval(j2)? - upper.eval(&mid)?;
    let lo = lower.eval(&mid)? - 0.5 * lower.eval(j1)? - 0.5 * lower.eval(j2)?;
    Ok(up.min(lo))
}

fn reflection_margin(op: &OperatorSpec, j: &Jet) -> Result<f64> {
    let upper = op.difference_bound(EnvelopeSide::Upper);
    let lower = op.difference_bound(EnvelopeSide::Lower);
    Ok(-(upper.eval(j)? + lower.eval(&j.scale(-1.0))?).abs())
}

/// Envelope sandwich, convexity/concavity and reflection on random jets.
/// For inf-sup operators the envelopes are the flattened sup/inf; Pucci
/// operators use `P⁺`/`P⁻`.
pub fn check_envelope_properties(op: &OperatorSpec, grid: &Grid, samples: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    let tol = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Jet, Jet)> = (0..samples).map(|_| random_pair(&mut rng, grid)).collect();
    let mut out = Vec::new();

    let mut worst = (f64::INFINITY, 0usize);
    for (i, (a, b)) in pairs.iter().enumerate() {
        let scale = 1.0 + op.eval(a)?.abs() + op.eval(b)?.abs();
        let m = sandwich_margin(op, a, b)? + tol * scale;
        if m < worst.0 {
            worst = (m, i);
        }
    }
    let (a, b) = pairs[worst.1];
    out.push(PropertyReport::verdict(
        "envelope_sandwich",
        worst.0 >= 0.0,
        worst.0,
        format!("{} pairs", pairs.len()),
        || Counterexample::EnvelopeSandwich { op: op.clone(), j1: a, j2: b, tol },
    ));

    let mut worst = (f64::INFINITY, 0usize);
    for (i, (a, b)) in pairs.iter().enumerate() {
        let m = convexity_margin(op, a, b)? + tol * (1.0 + op.eval(a)?.abs() + op.eval(b)?.abs());
        if m < worst.0 {
            worst = (m, i);
        }
    }
    let (a, b) = pairs[worst.1];
    out.push(PropertyReport::verdict(
        "envelope_convexity",
        worst.0 >= 0.0,
        worst.0,
        format!("{} midpoints", pairs.len()),
        || Counterexample::EnvelopeConvexity { op: op.clone(), j1: a, j2: b, tol },
    ));

    let mut worst = (f64::INFINITY, 0usize);
    for (i, (a, _)) in pairs.iter().enumerate() {
        let m = reflection_margin(op, a)? + 1e-12 * (1.0 + op.eval(a)?.abs());
        if m < worst.0 {
            worst = (m, i);
        }
    }
    let a = pairs[worst.1].0;
    out.push(PropertyReport::verdict(
        "envelope_reflection",
        worst.0 >= 0.0,
        worst.0,
        format!("{} jets", pairs.len()),
        || Counterexample::EnvelopeReflection { op: op.clone(), jet: a, tol: 1e-12 },
    ));
    Ok(out)
}

/// `eval(Shift(op, λ), j) == eval(op, j) - λ z` exactly on random jets.
pub fn check_shift_consistency(op: &OperatorSpec, grid: &Grid, samples: usize, seed: u64) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = rng.random_range(-5.0..5.0);
    let shifted = OperatorSpec::shift(op.clone(), lambda);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let j = random_jet(&mut rng, grid);
        worst = worst.max((shifted.eval(&j)? - (op.eval(&j)? - lambda * j.z)).abs());
    }
    Ok(PropertyReport::verdict(
        "shift_consistency",
        worst == 0.0,
        -worst,
        format!("lambda={lambda}"),
        || Counterexample::Rerun {
            property: "shift_consistency".into(),
            op: op.clone(),
            grid: grid.clone(),
            seed: 0,
        },
    ))
}

/// Direct perturbation test of the scheme at random nodes of random fields.
pub fn check_monotone_property(op: &OperatorSpec, grid: &Grid, trials: usize, seed: u64) -> Result<PropertyReport> {
    let name = "monotone_stencil";
    let n = if grid.dim() == 1 { 9 } else { 7 };
    let g = Arc::new(Grid::new(grid.dim(), grid.lo(), grid.hi(), n)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = 1e-3;
    for _ in 0..trials {
        let mut u = GridFunction::zeros(g.clone());
        for v in u.values_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let node = rng.random_range(0..g.num_interior());
        if !check_monotone(op, &u, node, eps)? {
            return Ok(PropertyReport::fail(
                name,
                -1.0,
                format!("node {node}"),
                Counterexample::Monotone {
                    op: op.clone(),
                    u: FieldData::of(&u),
                    node,
                    eps,
                },
            ));
        }
    }
    Ok(PropertyReport::pass(name, 0.0, format!("{trials} random fields")))
}

fn comparison_trial(
    op: &OperatorSpec,
    f_u: &GridFunction,
    f_v: &GridFunction,
    g_u: &GridFunction,
    g_v: &GridFunction,
    opts: &SolveOptions,
) -> Result<Option<f64>> {
    let u = solve_dirichlet_with_boundary(op, 0.0, f_u, g_u, opts)?;
    let v = solve_dirichlet_with_boundary(op, 0.0, f_v, g_v, opts)?;
    if !(u.converged && v.converged) {
        return Ok(None);
    }
    Ok(Some(
        u.u.values()
            .iter()
            .zip(v.u.values())
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min),
    ))
}

fn ordered_data(
    rng: &mut ChaCha8Rng,
    grid: &Arc<Grid>,
    boundary: bool,
) -> (GridFunction, GridFunction, GridFunction, GridFunction) {
    let mut f_v = GridFunction::zeros(grid.clone());
    let mut f_u = GridFunction::zeros(grid.clone());
    let mut g_v = GridFunction::zeros(grid.clone());
    let mut g_u = GridFunction::zeros(grid.clone());
    for k in grid.interior_nodes() {
        let v = rng.random_range(-1.0..1.0);
        f_v.values_mut()[k] = v;
        f_u.values_mut()[k] = v - rng.random_range(0.0..0.5);
    }
    if boundary {
        for k in grid.boundary_nodes() {
            let v = rng.random_range(-1.0..1.0);
            g_v.values_mut()[k] = v;
            g_u.values_mut()[k] = v - rng.random_range(0.0..0.5);
        }
    }
    (f_u, f_v, g_u, g_v)
}

/// Discrete comparison on tiny grids (at most `max_nodes` interior nodes)
/// over the box of `template`, for the operator shifted by `-δ₀`.
pub fn check_comparison_small(
    op: &OperatorSpec,
    template: &Grid,
    max_nodes: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let name = "comparison_small";
    let n = if template.dim() == 1 {
        max_nodes
    } else {
        (max_nodes as f64).sqrt().floor() as usize
    };
    if n < 3 {
        return Err(Error::InvalidInput(format!("max_nodes {max_nodes} leaves fewer than 3 points per axis")));
    }
    let grid = Arc::new(Grid::new(template.dim(), template.lo(), template.hi(), n)?);
    let g = OperatorSpec::shift(op.clone(), -op.band()?.delta0);
    let opts = SolveOptions {
        tol: 1e-12,
        seed,
        ..SolveOptions::default()
    };
    let tol = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut solved = 0;
    for _ in 0..trials {
        let (f_u, f_v, g_u, g_v) = ordered_data(&mut rng, &grid, false);
        if let Some(m) = comparison_trial(&g, &f_u, &f_v, &g_u, &g_v, &opts)? {
            solved += 1;
            worst = worst.min(m + tol);
            if m + tol < 0.0 {
                return Ok(PropertyReport::fail(
                    name,
                    m + tol,
                    format!("u exceeds v by {:e}", -m),
                    Counterexample::Comparison {
                        op: g,
                        f_u: FieldData::of(&f_u),
                        f_v: FieldData::of(&f_v),
                        g_u: FieldData::of(&g_u),
                        g_v: FieldData::of(&g_v),
                        opts,
                        tol,
                    },
                ));
            }
        }
    }
    if solved == 0 {
        return Ok(PropertyReport::fail(
            name,
            f64::NEG_INFINITY,
            "no trial converged",
            Counterexample::Rerun {
                property: name.into(),
                op: op.clone(),
                grid: template.clone(),
                seed,
            },
        ));
    }
    Ok(PropertyReport::pass(name, worst, format!("{solved}/{trials} trials on {n} points per axis")))
}

/// Inward difference quotients at boundary nodes (rectangle corners
/// excluded) must have the eigenfunction's sign and magnitude at least
/// `0.01 ‖φ‖∞ / diam`.
pub fn check_hopf(phi: &GridFunction, sign: EigenSign) -> PropertyReport {
    let name = "hopf";
    let grid = phi.grid();
    let c = 0.01 * phi.sup_norm() / grid.diameter();
    let s = sign.factor();
    let mut worst = f64::INFINITY;
    for (node, dir) in grid.boundary_with_inward() {
        let inner = grid.shift_node(node, dir).expect("inward neighbour exists");
        let axis = if dir[0] != 0 { 0 } else { 1 };
        let q = (phi.values()[inner] - phi.values()[node]) / grid.h()[axis];
        worst = worst.min(s * q - c);
    }
    if !(c > 0.0) {
        worst = f64::NEG_INFINITY;
    }
    PropertyReport::verdict(name, worst > 0.0, worst, format!("threshold {c:e}"), || Counterexample::Hopf {
        phi: FieldData::of(phi),
        sign,
    })
}

/// `‖φ₁⁺ + φ₁⁻‖∞` for the computed pair.
pub fn eigenfunction_separation(plus: &EigenPair, minus: &EigenPair) -> f64 {
    plus.phi.add(&minus.phi).sup_norm()
}

/// Proportionality of the half-eigenfunctions when the half-eigenvalues
/// coincide; skipped otherwise, with the separation reported in `detail`.
pub fn check_bnv_proportionality(op: &OperatorSpec, grid: Arc<Grid>, opts: &EigenOptions) -> Result<PropertyReport> {
    let name = "bnv_proportionality";
    let plus = principal_eigenpair(op, grid.clone(), EigenSign::Positive, opts)?;
    let minus = principal_eigenpair(op, grid.clone(), EigenSign::Negative, opts)?;
    let sep = eigenfunction_separation(&plus, &minus);
    let gap = (plus.lambda - minus.lambda).abs();
    if gap > 1e-6 * (1.0 + plus.lambda.abs()) {
        let mut r = PropertyReport::skip(
            name,
            format!("lambda+ = {} != lambda- = {}", plus.lambda, minus.lambda),
        );
        r.detail = format!("separation {sep:e}");
        r.margin = sep;
        return Ok(r);
    }
    Ok(PropertyReport::verdict(
        name,
        sep <= 1e-4,
        1e-4 - sep,
        format!("separation {sep:e}"),
        || Counterexample::Rerun {
            property: name.into(),
            op: op.clone(),
            grid: grid.as_ref().clone(),
            seed: 0,
        },
    ))
}

/// Comparison for `op` with random ordered data, on the largest domain
/// (halving the box up to six times) where `λ₁⁻` of the upper envelope is
/// positive.
pub fn check_envelope_comparison(
    op: &OperatorSpec,
    grid: Arc<Grid>,
    trials: usize,
    seed: u64,
    eig: &EigenOptions,
) -> Result<PropertyReport> {
    let name = "envelope_comparison";
    let upper = op.difference_bound(EnvelopeSide::Upper);
    let mut g = grid.clone();
    let mut lambda = f64::NAN;
    for _ in 0..=6 {
        let p = principal_eigenpair(&upper, g.clone(), EigenSign::Negative, eig)?;
        lambda = p.lambda;
        if lambda > 0.0 {
            break;
        }
        g = Arc::new(g.scaled(0.5)?);
    }
    if !(lambda > 0.0) {
        return Ok(PropertyReport::skip(name, format!("lambda1- of upper envelope stays {lambda}")));
    }
    let opts = SolveOptions {
        tol: 1e-10,
        seed,
        ..SolveOptions::default()
    };
    let tol = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut solved = 0;
    for _ in 0..trials {
        let (f_u, f_v, g_u, g_v) = ordered_data(&mut rng, &g, true);
        if let Some(m) = comparison_trial(op, &f_u, &f_v, &g_u, &g_v, &opts)? {
            solved += 1;
            worst = worst.min(m + tol);
            if m + tol < 0.0 {
                return Ok(PropertyReport::fail(
                    name,
                    m + tol,
                    format!("u exceeds v by {:e}", -m),
                    Counterexample::Comparison {
                        op: op.clone(),
                        f_u: FieldData::of(&f_u),
                        f_v: FieldData::of(&f_v),
                        g_u: FieldData::of(&g_u),
                        g_v: FieldData::of(&g_v),
                        opts,
                        tol,
                    },
                ));
            }
        }
    }
    if solved == 0 {
        return Ok(PropertyReport::fail(
            name,
            f64::NEG_INFINITY,
            "no trial converged",
            Counterexample::Rerun {
                property: name.into(),
                op: op.clone(),
                grid: grid.as_ref().clone(),
                seed,
            },
        ));
    }
    Ok(PropertyReport::pass(
        name,
        worst,
        format!("{solved}/{trials} trials, lambda1-(upper) = {lambda} on box scaled to diameter {}", g.diameter()),
    ))
}

/// Outcome of one λ in a nonexistence scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub lambda: f64,
    pub in_window: bool,
    pub converged: bool,
    pub residual_floor: f64,
}

/// Robust non-convergence for every λ in the window `[λ₁⁺, λ₁⁻]` (for
/// `f >= 0`) or `[λ₁⁻, λ₁⁺]` (for `f <= 0`). Window membership allows a
/// relative slack of `2e-3` around the computed endpoints. This is
/// evidence, not proof: a solver cannot certify nonexistence.
pub fn check_nonexistence_window(
    op: &OperatorSpec,
    f: &GridFunction,
    lambdas: &[f64],
    solve: &SolveOptions,
    eig: &EigenOptions,
) -> Result<(PropertyReport, Vec<WindowRow>)> {
    let name = "nonexistence_window";
    let vals = f.interior();
    let nonneg = vals.iter().all(|&v| v >= 0.0);
    let nonpos = vals.iter().all(|&v| v <= 0.0);
    if f.interior_sup_norm() == 0.0 || !(nonneg || nonpos) {
        return Err(Error::InvalidInput("f must be one-signed and not identically zero".into()));
    }
    let grid = f.grid().clone();
    let lp = principal_eigenpair(op, grid.clone(), EigenSign::Positive, eig)?.lambda;
    let lm = principal_eigenpair(op, grid.clone(), EigenSign::Negative, eig)?.lambda;
    let (a, b) = if nonneg { (lp, lm) } else { (lm, lp) };
    let slack = 2e-3;
    let mut rows = Vec::new();
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for &lambda in lambdas {
        let in_window = lambda >= a - slack * a.abs() && lambda <= b + slack * b.abs();
        let rep = solve_dirichlet(op, lambda, f, solve)?;
        let floor = rep.residual_floor();
        if in_window {
            let m = floor - 100.0 * solve.tol;
            worst = worst.min(m);
            ok &= !rep.converged && m > 0.0;
        }
        rows.push(WindowRow {
            lambda,
            in_window,
            converged: rep.converged,
            residual_floor: floor,
        });
    }
    let detail = format!(
        "window [{a}, {b}]; evidence only; rows: {}",
        rows.iter()
            .map(|r| format!("{}:{}:{:e}", r.lambda, if r.converged { "solved" } else { "unsolved" }, r.residual_floor))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let report = PropertyReport::verdict(name, ok, worst, detail, || Counterexample::Rerun {
        property: name.into(),
        op: op.clone(),
        grid: grid.as_ref().clone(),
        seed: solve.seed,
    });
    Ok((report, rows))
}

fn eigen_rel_tol(l: f64) -> f64 {
    1e-7 * (1.0 + l.abs())
}

/// Converged pairs are strictly signed, sup-normalized, have small
/// residual and a Rayleigh bracket containing λ.
pub fn check_eigen_sign_residual(pair: &EigenPair, tol: f64) -> PropertyReport {
    let name = format!("eigen_sign_residual{}", pair.sign.symbol());
    let s = pair.sign.factor();
    let min_signed = pair.phi.interior().iter().map(|v| s * v).fold(f64::INFINITY, f64::min);
    let norm_err = (pair.phi.interior_sup_norm() - 1.0).abs();
    let slack = 1e-9 * (1.0 + pair.lambda.abs());
    let in_bracket = pair.rayleigh_lo - slack <= pair.lambda && pair.lambda <= pair.rayleigh_hi + slack;
    let ok = pair.converged && min_signed > 0.0 && norm_err <= 1e-12 && pair.residual <= tol && in_bracket;
    let detail = format!(
        "lambda {} residual {:e} bracket [{}, {}] min signed value {:e}",
        pair.lambda, pair.residual, pair.rayleigh_lo, pair.rayleigh_hi, min_signed
    );
    PropertyReport::verdict(&name, ok, (tol - pair.residual).min(min_signed), detail, || Counterexample::Hopf {
        phi: FieldData::of(&pair.phi),
        sign: pair.sign,
    })
}

/// Five random positive (or negative) starts give the same eigenpair.
pub fn check_simplicity(op: &OperatorSpec, grid: Arc<Grid>, sign: EigenSign, seed: u64, eig: &EigenOptions) -> Result<PropertyReport> {
    let name = format!("simplicity{}", sign.symbol());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for _ in 0..5 {
        let mut init = GridFunction::zeros(grid.clone());
        for v in init.interior_mut() {
            *v = sign.factor() * rng.random_range(0.05..1.0);
        }
        pairs.push(principal_eigenpair_from(op, grid.clone(), sign, eig, Some(&init))?);
    }
    let mut dl = 0.0f64;
    let mut dphi = 0.0f64;
    for p in &pairs[1..] {
        dl = dl.max((p.lambda - pairs[0].lambda).abs());
        dphi = dphi.max(p.phi.sub(&pairs[0].phi).sup_norm());
    }
    let all_conv = pairs.iter().all(|p| p.converged);
    let ok = all_conv && dl <= 1e-8 && dphi <= 1e-6;
    Ok(PropertyReport::verdict(
        &name,
        ok,
        (1e-8 - dl).min(1e-6 - dphi),
        format!("lambda spread {dl:e}, phi spread {dphi:e}"),
        || Counterexample::Rerun {
            property: name.clone(),
            op: op.clone(),
            grid: grid.as_ref().clone(),
            seed,
        },
    ))
}

/// `λ₁±` strictly decrease when the box is enlarged by 20 %.
pub fn check_domain_monotonicity(op: &OperatorSpec, grid: Arc<Grid>, eig: &EigenOptions) -> Result<PropertyReport> {
    let name = "domain_monotonicity";
    let big = Arc::new(grid.scaled(1.2)?);
    let mut margin = f64::INFINITY;
    let mut detail = Vec::new();
    for sign in [EigenSign::Positive, EigenSign::Negative] {
        let small = principal_eigenpair(op, grid.clone(), sign, eig)?.lambda;
        let large = principal_eigenpair(op, big.clone(), sign, eig)?.lambda;
        margin = margin.min(small - large);
        detail.push(format!("{}: {small} > {large}", sign.symbol()));
    }
    Ok(PropertyReport::verdict(name, margin > 0.0, margin, detail.join("; "), || Counterexample::Rerun {
        property: name.into(),
        op: op.clone(),
        grid: grid.as_ref().clone(),
        seed: 0,
    }))
}

/// For inf-sup operators with flattened envelopes `U`, `L`:
/// `λ₁⁻(U) = λ₁⁺(L) <= λ₁±(F) <= λ₁⁺(U) = λ₁⁻(L)`.
pub fn check_envelope_ordering(op: &OperatorSpec, grid: Arc<Grid>, eig: &EigenOptions) -> Result<PropertyReport> {
    let name = "envelope_ordering";
    if !matches!(op, OperatorSpec::InfSup(_)) {
        return Ok(PropertyReport::skip(name, format!("{} is not an inf-sup operator", op.kind_name())));
    }
    let upper = op.difference_bound(EnvelopeSide::Upper);
    let lower = op.difference_bound(EnvelopeSide::Lower);
    let lam = |o: &OperatorSpec, s: EigenSign| principal_eigenpair(o, grid.clone(), s, eig).map(|p| p.lambda);
    let um = lam(&upper, EigenSign::Negative)?;
    let lp = lam(&lower, EigenSign::Positive)?;
    let up = lam(&upper, EigenSign::Positive)?;
    let lm = lam(&lower, EigenSign::Negative)?;
    let fp = lam(op, EigenSign::Positive)?;
    let fm = lam(op, EigenSign::Negative)?;
    let t = eigen_rel_tol(up.max(lm));
    let margins = [
        t - (um - lp).abs(),
        t - (up - lm).abs(),
        fp.min(fm) - um + t,
        up - fp.max(fm) + t,
    ];
    let margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PropertyReport::verdict(
        name,
        margin >= 0.0,
        margin,
        format!("lambda1-(U)={um} lambda1+(L)={lp} lambda1+(F)={fp} lambda1-(F)={fm} lambda1+(U)={up} lambda1-(L)={lm}"),
        || Counterexample::Rerun {
            property: name.into(),
            op: op.clone(),
            grid: grid.as_ref().clone(),
            seed: 0,
        },
    ))
}

/// Pure-sup families: `λ₁⁻(H) <= min λ₁(L) <= max λ₁(L) <= λ₁⁺(H)`.
/// Pure-inf families satisfy the reflected chain with `±` swapped.
pub fn check_bellman_chain(op: &OperatorSpec, grid: Arc<Grid>, eig: &EigenOptions) -> Result<PropertyReport> {
    let name = "bellman_chain";
    let (members, convex) = match op {
        OperatorSpec::InfSup(i) if i.is_pure_sup() => (i.families[0].members.clone(), true),
        OperatorSpec::InfSup(i) if i.is_pure_inf() => (op.linear_members(), false),
        _ => return Ok(PropertyReport::skip(name, "not a pure sup or pure inf family")),
    };
    let mut lmin = f64::INFINITY;
    let mut lmax = f64::NEG_INFINITY;
    for m in members {
        let l = principal_eigenpair(&OperatorSpec::Linear(m), grid.clone(), EigenSign::Positive, eig)?.lambda;
        lmin = lmin.min(l);
        lmax = lmax.max(l);
    }
    let hp = principal_eigenpair(op, grid.clone(), EigenSign::Positive, eig)?.lambda;
    let hm = principal_eigenpair(op, grid.clone(), EigenSign::Negative, eig)?.lambda;
    let (low, high) = if convex { (hm, hp) } else { (hp, hm) };
    let t = eigen_rel_tol(high);
    let margin = (lmin - low + t).min(high - lmax + t);
    Ok(PropertyReport::verdict(
        name,
        margin >= 0.0,
        margin,
        format!("{low} <= [{lmin}, {lmax}] <= {high}"),
        || Counterexample::Rerun {
            property: name.into(),
            op: op.clone(),
            grid: grid.as_ref().clone(),
            seed: 0,
        },
    ))
}

/// Inputs for [`run_suite`].
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub op: OperatorSpec,
    pub grid: Arc<Grid>,
    pub seed: u64,
    pub samples: usize,
    pub trials: usize,
    pub eigen: EigenOptions,
    pub solve: SolveOptions,
}

impl SuiteConfig {
    pub fn new(op: OperatorSpec, grid: Arc<Grid>, seed: u64) -> Self {
        SuiteConfig {
            op,
            grid,
            seed,
            samples: 1000,
            trials: 50,
            eigen: EigenOptions::default(),
            solve: SolveOptions::default(),
        }
    }
}

/// Runs every property. Errors inside a property become failed reports.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<PropertyReport> {
    let SuiteConfig {
        op,
        grid,
        seed,
        samples,
        trials,
        eigen,
        solve,
    } = cfg;
    let (seed, samples, trials) = (*seed, *samples, *trials);
    let mut out = Vec::new();
    let mut push = |name: &str, r: Result<Vec<PropertyReport>>| match r {
        Ok(v) => out.extend(v),
        Err(e) => out.push(PropertyReport::fail(
            name,
            f64::NEG_INFINITY,
            format!("error: {e}"),
            Counterexample::Rerun {
                property: name.into(),
                op: op.clone(),
                grid: grid.as_ref().clone(),
                seed,
            },
        )),
    };
    push("homogeneity", check_homogeneity_property(op, grid, samples, seed).map(|r| vec![r]));
    push("structure", check_structure_property(op, grid, samples, seed).map(|r| vec![r]));
    push("envelope", check_envelope_properties(op, grid, samples, seed));
    push("shift_consistency", check_shift_consistency(op, grid, samples.min(200), seed).map(|r| vec![r]));
    push("monotone_stencil", check_monotone_property(op, grid, 200, seed).map(|r| vec![r]));
    let pairs = (|| -> Result<(EigenPair, EigenPair)> {
        Ok((
            principal_eigenpair(op, grid.clone(), EigenSign::Positive, eigen)?,
            principal_eigenpair(op, grid.clone(), EigenSign::Negative, eigen)?,
        ))
    })();
    push(
        "eigen_sign_residual",
        pairs.as_ref().map_err(|e| Error::Eigen(e.to_string())).map(|(p, m)| {
            vec![
                check_eigen_sign_residual(p, eigen.tol_residual),
                check_eigen_sign_residual(m, eigen.tol_residual),
            ]
        }),
    );
    push(
        "hopf",
        pairs
            .as_ref()
            .map_err(|e| Error::Eigen(e.to_string()))
            .map(|(p, m)| vec![rename(check_hopf(&p.phi, p.sign), "hopf+"), rename(check_hopf(&m.phi, m.sign), "hopf-")]),
    );
    push(
        "simplicity",
        (|| {
            Ok(vec![
                check_simplicity(op, grid.clone(), EigenSign::Positive, seed, eigen)?,
                check_simplicity(op, grid.clone(), EigenSign::Negative, seed, eigen)?,
            ])
        })(),
    );
    push("domain_monotonicity", check_domain_monotonicity(op, grid.clone(), eigen).map(|r| vec![r]));
    push("envelope_ordering", check_envelope_ordering(op, grid.clone(), eigen).map(|r| vec![r]));
    push("bellman_chain", check_bellman_chain(op, grid.clone(), eigen).map(|r| vec![r]));
    push("comparison_small", check_comparison_small(op, grid, 9, trials, seed).map(|r| vec![r]));
    push("bnv_proportionality", check_bnv_proportionality(op, grid.clone(), eigen).map(|r| vec![r]));
    push(
        "envelope_comparison",
        check_envelope_comparison(op, grid.clone(), trials, seed, eigen).map(|r| vec![r]),
    );
    push(
        "nonexistence_window",
        (|| {
            let (lp, lm) = match &pairs {
                Ok((p, m)) => (p.lambda, m.lambda),
                Err(e) => return Err(Error::Eigen(e.to_string())),
            };
            let (a, b) = (lp.min(lm), lp.max(lm));
            if b - a <= 1e-3 * (1.0 + b.abs()) {
                return Ok(vec![PropertyReport::skip("nonexistence_window", "lambda1+ and lambda1- coincide")]);
            }
            let tent = GridFunction::tent(grid.clone());
            let f = if lp <= lm { tent } else { tent.scaled(-1.0) };
            let lambdas: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|t| a + t * (b - a)).collect();
            let opts = SolveOptions { seed, ..solve.clone() };
            Ok(vec![check_nonexistence_window(op, &f, &lambdas, &opts, eigen)?.0])
        })(),
    );
    out
}

fn rename(mut r: PropertyReport, name: &str) -> PropertyReport {
    r.name = name.into();
    r
}

/// Re-runs a counterexample. Returns `true` if the failure reproduces.
pub fn replay(cex: &Counterexample) -> Result<bool> {
    Ok(match cex {
        Counterexample::Homogeneity { op, jet, t, rel_tol } => {
            !check_homogeneity(op, std::slice::from_ref(jet), &[*t], *rel_tol)?.passed()
        }
        Counterexample::Structure { op, band, j1, j2, tol } => {
            !check_structure(op, band, &[(*j1, *j2)], *tol)?.passed()
        }
        Counterexample::EnvelopeSandwich { op, j1, j2, tol } => {
            let scale = 1.0 + op.eval(j1)?.abs() + op.eval(j2)?.abs();
            sandwich_margin(op, j1, j2)? + tol * scale < 0.0
        }
        Counterexample::EnvelopeConvexity { op, j1, j2, tol } => {
            let scale = 1.0 + op.eval(j1)?.abs() + op.eval(j2)?.abs();
            convexity_margin(op, j1, j2)? + tol * scale < 0.0
        }
        Counterexample::EnvelopeReflection { op, jet, tol } => {
            reflection_margin(op, jet)? + tol * (1.0 + op.eval(jet)?.abs()) < 0.0
        }
        Counterexample::Monotone { op, u, node, eps } => !check_monotone(op, &u.field()?, *node, *eps)?,
        Counterexample::Comparison {
            op,
            f_u,
            f_v,
            g_u,
            g_v,
            opts,
            tol,
        } => {
            let m = comparison_trial(op, &f_u.field()?, &f_v.field()?, &g_u.field()?, &g_v.field()?, opts)?;
            m.is_some_and(|m| m + tol < 0.0)
        }
        Counterexample::Hopf { phi, sign } => !check_hopf(&phi.field()?, *sign).passed,
        Counterexample::Rerun { property, op, grid, seed } => {
            let cfg = SuiteConfig::new(op.clone(), Arc::new(grid.clone()), *seed);
            run_suite(&cfg)
                .iter()
                .any(|r| r.name == *property && !r.passed)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hopf_on_sine_and_zero() {
        let g = Arc::new(Grid::interval(0.0, PI, 101).unwrap());
        let phi = GridFunction::from_fn(g.clone(), |x| x[0].sin()).unwrap().with_zero_boundary();
        let r = check_hopf(&phi, EigenSign::Positive);
        assert!(r.passed, "{r:?}");
        assert!(!check_hopf(&phi, EigenSign::Negative).passed);
        let zero = GridFunction::zeros(g);
        let r = check_hopf(&zero, EigenSign::Positive);
        assert!(!r.passed);
        assert!(replay(r.counterexample.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn broken_band_fails_structure_and_replays() {
        let op = OperatorSpec::pucci_minus(1.0, 2.0).unwrap();
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        let narrow = Band::ellipticity(1.0, 1.5).unwrap();
        let r = check_structure_against(&op, &narrow, &g, 200, 3).unwrap();
        assert!(!r.passed);
        assert!(replay(r.counterexample.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn laplacian_comparison_small() {
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        let r = check_comparison_small(&OperatorSpec::laplacian(1).unwrap(), &g, 5, 20, 1).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn zero_forcing_is_rejected() {
        let g = Arc::new(Grid::interval(0.0, PI, 21).unwrap());
        let f = GridFunction::zeros(g);
        let op = OperatorSpec::pucci_minus(1.0, 2.0).unwrap();
        assert!(check_nonexistence_window(&op, &f, &[1.5], &SolveOptions::default(), &EigenOptions::default()).is_err());
    }
}
