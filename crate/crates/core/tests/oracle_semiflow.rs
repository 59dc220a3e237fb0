//! Semiflow DPs against explicit path sums.

mod common;

use std::collections::BTreeMap;

use common::*;
use ergolab::scalar::ratio;
use ergolab::semiflow::{
    bell_tail_sum, flow_terms, joint_distribution, lll_sweep, FiberInterval, SemiflowModel,
};
use num::{BigRational, ToPrimitive, Zero};

fn models() -> Vec<SemiflowModel> {
    vec![
        SemiflowModel::roof_shift(),
        SemiflowModel::roof_walk(),
        SemiflowModel::skew_roof_walk(),
        SemiflowModel::unit_roof(ergolab::builtin::simple_walk()),
    ]
}

/// Q h_n along a path.
fn q_sum(m: &SemiflowModel, path: &[usize], n: usize) -> i64 {
    path[..n].iter().map(|&s| m.roof.scaled(s)).sum()
}

#[test]
fn joint_distribution_matches_enumeration() {
    for m in models() {
        for n in [1, 2, 5] {
            let mut want: BTreeMap<(usize, Vec<i64>), BigRational> = BTreeMap::new();
            for (p, w) in paths(&m.base, n) {
                let mut z = phi_sum(&m.base, &p, n);
                z.push(q_sum(&m, &p, n));
                *want.entry((p[n], z)).or_insert_with(BigRational::zero) += w;
            }
            let got = joint_distribution::<BigRational>(&m, n).unwrap();
            let mut have: BTreeMap<(usize, Vec<i64>), BigRational> = BTreeMap::new();
            for (s, z, v) in got.atoms() {
                if !v.is_zero() {
                    have.insert((s, z), v);
                }
            }
            assert_eq!(have, want, "{} n = {n}", m.name);
        }
    }
}

/// mu(A and [phi_n = 0, h_n in [lo + t - y, hi + t - y)]), A the word at time 0.
fn term_oracle(m: &SemiflowModel, word: &[usize], iv: &FiberInterval, shift: &BigRational, n: usize) -> f64 {
    let len = n.max(word.len() - 1);
    let q = BigRational::from_integer(m.roof.denominator().into());
    let zero = vec![0; m.kappa()];
    let mut total = BigRational::zero();
    for (p, w) in paths(&m.base, len) {
        if p[..word.len()] != word[..] || phi_sum(&m.base, &p, n) != zero {
            continue;
        }
        let h = BigRational::from_integer(q_sum(m, &p, n).into()) / &q;
        if h >= &iv.lo + shift && h < &iv.hi + shift {
            total += w;
        }
    }
    total.to_f64().unwrap()
}

#[test]
fn flow_terms_match_enumeration() {
    let iv = FiberInterval::new(ratio(0, 1), ratio(1, 2)).unwrap();
    let cases = [(ratio(5, 1), ratio(0, 1)), (ratio(7, 2), ratio(1, 4)), (ratio(6, 1), ratio(1, 2))];
    for m in models() {
        for word in [vec![0], vec![1], vec![0, 1], vec![1, 1]] {
            if word.iter().any(|&s| s >= m.base.n_states()) {
                continue;
            }
            for (t, y) in &cases {
                let n_max = 8;
                let got = flow_terms(&m, &word, &iv, t, y, n_max).unwrap();
                let shift = t - y;
                for n in word.len() - 1..=n_max {
                    let want = term_oracle(&m, &word, &iv, &shift, n);
                    assert!((got[n] - want).abs() < 1e-12, "{} {word:?} t = {t} n = {n}: {} vs {want}", m.name, got[n]);
                }
            }
        }
    }
}

#[test]
fn window_and_tail_sums_are_sums_of_terms() {
    let m = SemiflowModel::roof_walk();
    let iv = FiberInterval::new(ratio(0, 1), ratio(1, 2)).unwrap();
    let (t, y) = (ratio(9, 1), ratio(0, 1));
    let shift = &t - &y;
    let n_max = 9;
    let terms: Vec<f64> = (0..=n_max).map(|n| term_oracle(&m, &[1], &iv, &shift, n)).collect();
    let tf = t.to_f64().unwrap();

    for r in lll_sweep(&m, &[1], &iv, &t, &[0.5, 1.0], &y).unwrap() {
        let want: f64 = terms[r.n_lo..=r.n_hi].iter().sum::<f64>() * tf.sqrt();
        assert!((r.sum - want).abs() < 1e-12, "M = {}: {} vs {want}", r.m, r.sum);
    }
    let tails = bell_tail_sum(&m, &[1], &iv, &t, &[1.0], &y).unwrap();
    // h_n >= n, so nothing past n = 9 can land in [9, 9.5).
    assert!(tails[0].n_max >= n_max);
    let kap = 1.25;
    let want: f64 = (1..=n_max)
        .filter(|&n| (n as f64 - tf / kap).abs() >= tf.sqrt())
        .map(|n| terms[n])
        .sum::<f64>()
        * tf.sqrt();
    assert!((tails[0].tail - want).abs() < 1e-12, "{} vs {want}", tails[0].tail);
    let total: f64 = terms[1..].iter().sum::<f64>() * tf.sqrt();
    assert!((tails[0].total - total).abs() < 1e-12);
}
