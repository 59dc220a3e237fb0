//! Invariants checked on random inputs.

use std::f64::consts::PI;

use ergolab::asymptotics::{partial_power_sum, SeqPrefix};
use ergolab::cli::{parse_config, Experiment, ExperimentConfig, Table};
use ergolab::farey::{all_orderings, check_partition, farey_sequence};
use ergolab::hyperbolic::{geodesic_flow, hyp_dist, mobius_act, DiskPoint, LineElement, MobiusMap};
use ergolab::markov::{multi_correlation, Cylinder, FiberedSet};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = DiskPoint> {
    (0.0..3.0f64, 0.0..2.0 * PI).prop_map(|(r, th)| DiskPoint::polar(r, th).unwrap())
}

fn isometry() -> impl Strategy<Value = MobiusMap> {
    (point(), 0.0..2.0 * PI).prop_map(|(z, a)| MobiusMap::to_point(z).compose(&MobiusMap::rotation(a)))
}

proptest! {
    #[test]
    fn mobius_maps_are_isometries(g in isometry(), x in point(), y in point()) {
        let d = hyp_dist(x, y);
        prop_assert!((hyp_dist(g.apply(x), g.apply(y)) - d).abs() < 1e-8 * d.max(1.0));
        let back = g.inverse().apply(g.apply(x));
        prop_assert!(hyp_dist(back, x) < 1e-8);
        prop_assert!((g.det() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flow_is_additive_and_equivariant(
        x in point(), th in 0.0..2.0 * PI, s in -3.0..3.0f64, t in -3.0..3.0f64, g in isometry()
    ) {
        let w = LineElement::new(x, th);
        let two = geodesic_flow(&geodesic_flow(&w, s), t);
        prop_assert!(two.gap(&geodesic_flow(&w, s + t)) < 1e-7);
        let a = mobius_act(&g, &geodesic_flow(&w, s));
        let b = geodesic_flow(&mobius_act(&g, &w), s);
        prop_assert!(a.gap(&b) < 1e-7);
    }

    #[test]
    fn farey_neighbours_are_unimodular(d in 1u64..80) {
        let f = farey_sequence(d).unwrap();
        for w in f.fractions.windows(2) {
            prop_assert_eq!(w[1].0 * w[0].1 - w[0].0 * w[1].1, 1);
        }
    }

    #[test]
    fn orderings_partition_slopes(d in 1u64..9) {
        prop_assert_eq!(check_partition(&all_orderings(d).unwrap(), 60), None);
    }

    #[test]
    fn power_sums_are_nondecreasing(u in prop::collection::vec(0.0..1.0f64, 1..200), d in 1u32..5) {
        let a = partial_power_sum(&SeqPrefix::nonneg(1, u).unwrap(), d).unwrap();
        let v: Vec<f64> = (1..=a.len()).map(|n| a.get(n).unwrap()).collect();
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn correlation_is_at_most_each_measure(
        words in prop::collection::vec(prop::collection::vec(0usize..3, 1..3), 2..4),
        k in 1i64..6,
        z in -1i64..2,
    ) {
        let m = ergolab::builtin::lazy_walk();
        let sets: Vec<FiberedSet> = words
            .into_iter()
            .map(|w| FiberedSet::single(Cylinder::new(0, w, Some(vec![z]))))
            .collect();
        let shifts = vec![0; sets.len()];
        let c = multi_correlation::<f64>(&m, &sets, k, &shifts).unwrap();
        prop_assert!(c >= 0.0);
        for s in &sets {
            prop_assert!(c <= s.measure::<f64>(&m).unwrap() + 1e-15);
        }
    }

    #[test]
    fn config_round_trips(
        exp in prop::sample::select(Experiment::ALL.to_vec()),
        seed in any::<u64>(),
        tol in prop::option::of(1e-9..1.0f64),
        n_max in prop::option::of(1usize..100_000),
        ms in prop::option::of(prop::collection::vec(0.1..10.0f64, 1..4)),
    ) {
        let mut cfg = ExperimentConfig::new(exp);
        cfg.seed = seed;
        cfg.tolerance = tol;
        cfg.params.n_max = n_max;
        cfg.params.ms = ms;
        prop_assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn csv_tables_round_trip(
        rows in prop::collection::vec(prop::collection::vec(
            prop_oneof![any::<f64>().prop_filter("nan", |v| !v.is_nan()), Just(f64::INFINITY), Just(0.0)], 3), 0..20)
    ) {
        let mut t = Table::new("t", &[("n", ""), ("value", "ratio"), ("bound", "1/sqrt(n)")]);
        for r in rows {
            t.push(r);
        }
        prop_assert_eq!(Table::from_csv("t", &t.to_csv().unwrap()).unwrap(), t);
    }
}
