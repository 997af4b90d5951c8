use std::sync::Arc;

use halfeig::discretization::{apply_operator, check_monotone};
use halfeig::experiments::{LambdaSpec, SignVerdict};
use halfeig::linalg::BandMatrix;
use halfeig::operator::{pucci_minus, pucci_plus, EnvelopeSide, InfSup};
use halfeig::{Band, Grid, GridFunction, Jet, LinearCoeffs, OperatorSpec, ScalarField, SymMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coef() -> impl Strategy<Value = f64> {
    -5.0..5.0f64
}

fn jet2() -> impl Strategy<Value = Jet> {
    (coef(), coef(), coef(), coef(), coef(), coef(), 0.0..1.0f64, 0.0..1.0f64)
        .prop_map(|(a, b, c, p, q, z, x, y)| Jet::new(SymMatrix::new2(a, b, c), [p, q], z, [x, y]))
}

fn band() -> impl Strategy<Value = (f64, f64)> {
    (0.1..2.0f64, 0.0..3.0f64).prop_map(|(g, d)| (g, g + d))
}

fn operators() -> Vec<OperatorSpec> {
    let lin = |a11: f64, a12: f64, a22: f64, b: f64| LinearCoeffs::constant(&[a11, a12, a22], &[b, -b], 0.0).unwrap();
    vec![
        OperatorSpec::pucci_minus(1.0, 2.0).unwrap(),
        OperatorSpec::pucci_plus(0.5, 3.0).unwrap(),
        OperatorSpec::laplacian(2).unwrap(),
        OperatorSpec::inf_sup(InfSup::inf_of(vec![lin(1.0, 0.0, 1.0, 0.0), lin(2.0, 0.5, 2.0, 1.0)]).unwrap()).unwrap(),
        OperatorSpec::inf_sup(InfSup::sup_of(vec![lin(1.0, 0.2, 1.5, 0.5), lin(2.0, -0.5, 1.0, 0.0)]).unwrap()).unwrap(),
        OperatorSpec::inf_sup(
            InfSup::new(vec![vec![lin(1.0, 0.0, 1.0, 0.0), lin(3.0, 1.0, 2.0, -1.0)], vec![lin(1.5, -0.3, 1.5, 0.3)]])
                .unwrap(),
        )
        .unwrap(),
    ]
}

proptest! {
    #[test]
    fn positive_homogeneity(j in jet2(), t in 0.0..20.0f64) {
        for op in operators() {
            let lhs = op.eval(&j.scale(t)).unwrap();
            let rhs = t * op.eval(&j).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), "{}: {lhs} vs {rhs}", op.kind_name());
        }
    }

    #[test]
    fn pucci_duality_is_exact(a in coef(), b in coef(), c in coef(), (g, big) in band()) {
        let band = Band::ellipticity(g, big).unwrap();
        let m = SymMatrix::new2(a, b, c);
        prop_assert_eq!(pucci_minus(&m, &band), -pucci_plus(&m.scale(-1.0), &band));
        prop_assert!(pucci_minus(&m, &band) <= pucci_plus(&m, &band));
    }

    #[test]
    fn structure_sandwich(j1 in jet2(), j2 in jet2()) {
        let mut j2 = j2;
        j2.x = j1.x;
        for op in operators() {
            let b = op.band().unwrap();
            let d = j1.sub(&j2);
            let diff = op.eval(&j1).unwrap() - op.eval(&j2).unwrap();
            let hi = pucci_plus(&d.m, &b) + b.delta1 * d.gradient_norm() + b.delta0 * d.z.abs();
            let lo = pucci_minus(&d.m, &b) - b.delta1 * d.gradient_norm() - b.delta0 * d.z.abs();
            prop_assert!(diff <= hi + 1e-10 && diff >= lo - 1e-10, "{}", op.kind_name());
        }
    }

    #[test]
    fn envelopes_sandwich_differences(j1 in jet2(), j2 in jet2()) {
        let mut j2 = j2;
        j2.x = j1.x;
        for op in operators() {
            let up = op.difference_bound(EnvelopeSide::Upper);
            let lo = op.difference_bound(EnvelopeSide::Lower);
            let d = j1.sub(&j2);
            let diff = op.eval(&j1).unwrap() - op.eval(&j2).unwrap();
            prop_assert!(diff <= up.eval(&d).unwrap() + 1e-10);
            prop_assert!(diff >= lo.eval(&d).unwrap() - 1e-10);
            prop_assert!((up.eval(&d).unwrap() + lo.eval(&d.scale(-1.0)).unwrap()).abs() <= 1e-12 * (1.0 + diff.abs()));
        }
    }

    #[test]
    fn reflection_is_an_involution(j in jet2()) {
        for op in operators() {
            let r = op.reflected();
            let expected = -op.eval(&j.scale(-1.0)).unwrap();
            prop_assert!((r.eval(&j).unwrap() - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
            prop_assert!((r.reflected().eval(&j).unwrap() - op.eval(&j).unwrap()).abs() <= 1e-12 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn scheme_is_monotone(values in prop::collection::vec(-1.0..1.0f64, 81), node in 0usize..49) {
        let g = Arc::new(Grid::square(0.0, 1.0, 7).unwrap());
        let u = GridFunction::new(g, values).unwrap();
        for op in operators() {
            prop_assert!(check_monotone(&op, &u, node, 1e-3).unwrap(), "{}", op.kind_name());
        }
    }

    #[test]
    fn discrete_operator_is_homogeneous(values in prop::collection::vec(-1.0..1.0f64, 13), t in 0.0..10.0f64) {
        let g = Arc::new(Grid::interval(0.0, 1.0, 11).unwrap());
        let u = GridFunction::new(g, values).unwrap();
        let op = OperatorSpec::pucci_minus(1.0, 2.0).unwrap();
        let a = apply_operator(&op, &u.scaled(t)).unwrap();
        let b = apply_operator(&op, &u).unwrap().scaled(t);
        prop_assert!(a.sub(&b).sup_norm() <= 1e-10 * (1.0 + b.sup_norm()));
    }

    #[test]
    fn csv_round_trip_is_lossless(values in prop::collection::vec(prop::num::f64::NORMAL, 36)) {
        let g = Arc::new(Grid::square(-1.0, 2.0, 4).unwrap());
        let u = GridFunction::new(g.clone(), values).unwrap();
        let back = GridFunction::from_csv(g, &u.to_csv()).unwrap();
        prop_assert_eq!(back.values(), u.values());
    }

    #[test]
    fn lattice_indexing_round_trips(n in 3usize..12, dim in 1usize..3) {
        let g = Grid::new(dim, &vec![0.0; dim], &vec![1.0; dim], n).unwrap();
        for k in 0..g.num_nodes() {
            prop_assert_eq!(g.node_at(g.lattice_index(k)), Some(k));
        }
    }

    #[test]
    fn scalar_field_display_round_trips(k in 0.1..5.0f64, c in -3.0..3.0f64, w in 0.1..2.0f64) {
        for f in [
            ScalarField::Const(c),
            ScalarField::Sin(k),
            ScalarField::Bump { center: vec![c, k], width: w },
            ScalarField::Product(vec![ScalarField::Sin(k), ScalarField::Const(c)]),
        ] {
            let back: ScalarField = f.to_string().parse().unwrap();
            for x in [[0.0, 0.0], [0.3, 0.7], [1.1, -0.4]] {
                prop_assert_eq!(back.eval(&x, 2), f.eval(&x, 2));
            }
            let again: ScalarField = back.to_string().parse().unwrap();
            prop_assert_eq!(again, back);
        }
    }

    #[test]
    fn lambda_offsets_parse(eta in 0.0..10.0f64) {
        prop_assert_eq!(LambdaSpec::parse(&format!("lambda1_minus + {eta:?}")).unwrap(), LambdaSpec::Minus(eta));
        prop_assert_eq!(LambdaSpec::parse(&format!("lambda1_plus - {eta:?}")).unwrap(), LambdaSpec::Plus(-eta));
    }

    #[test]
    fn sign_verdict_matches_extremes(min_u in -5.0..5.0f64, d in 0.0..5.0f64, converged: bool) {
        let max_u = min_u + d;
        let v = SignVerdict::of(converged, min_u, max_u);
        match v {
            SignVerdict::Unsolved => prop_assert!(!converged),
            SignVerdict::AllNegative => prop_assert!(max_u < 0.0),
            SignVerdict::AllPositive => prop_assert!(min_u > 0.0),
            SignVerdict::Mixed => prop_assert!(min_u <= 0.0 && max_u >= 0.0),
        }
    }

    #[test]
    fn banded_lu_solves_m_matrices(n in 3usize..40, k in 1usize..4, seed in any::<u64>()) {
        let mut m = BandMatrix::zeros(n, k, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut next = || rng.random::<f64>();
        for i in 0..n {
            let mut off = 0.0;
            for j in i.saturating_sub(k)..(i + k + 1).min(n) {
                if j != i {
                    let v = -next();
                    m.add(i, j, v);
                    off -= v;
                }
            }
            m.add(i, i, off + 0.1 + next());
        }
        let x: Vec<f64> = (0..n).map(|_| next() - 0.5).collect();
        let b = m.mul_vec(&x);
        let y = m.clone().factor().unwrap().solve(&b);
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
