//! Exact DP results against path enumeration on every builtin model with at
//! most three states.

mod common;

use common::*;
use ergolab::markov::{
    induced_return_distribution, multi_correlation, return_sequence, state_return_probability, transfer_apply,
    transfer_nested, Cylinder, FiberedSet, StepFunction,
};
use ergolab::farey::psi_moments;
use num::BigRational;

const N: usize = 8;

#[test]
fn return_sequence_matches_enumeration() {
    for m in small_models() {
        let u = return_sequence::<BigRational>(&m, N).unwrap();
        for n in 1..=N {
            assert_eq!(u[n - 1], return_oracle(&m, n), "{} n = {n}", m.name);
        }
    }
}

#[test]
fn state_return_matches_enumeration() {
    for m in small_models() {
        for s in 0..m.n_states() {
            for n in [1, 3, 6] {
                let zero = vec![0; m.kappa];
                let hit: BigRational = paths(&m, n)
                    .into_iter()
                    .filter(|(p, _)| p[0] == s && p[n] == s && phi_sum(&m, p, n) == zero)
                    .map(|(_, w)| w)
                    .sum();
                // p^(n)_{ss} is conditional on the start, so mu_s enters twice.
                let want = hit / m.mu_exact(s) / m.mu_exact(s);
                assert_eq!(state_return_probability::<BigRational>(&m, s, n).unwrap(), want, "{} s = {s} n = {n}", m.name);
            }
        }
    }
}

#[test]
fn first_return_matches_enumeration() {
    for m in small_models().into_iter().filter(|m| m.kappa >= 1) {
        let f = induced_return_distribution::<BigRational>(&m, N).unwrap();
        for n in 1..=N {
            assert_eq!(f[n - 1], first_return_oracle(&m, n), "{} n = {n}", m.name);
        }
    }
}

fn test_sets(m: &ergolab::markov::MarkovModel) -> Vec<FiberedSet> {
    let z = vec![0; m.kappa];
    let mut one_off = z.clone();
    if let Some(c) = one_off.first_mut() {
        *c = 1;
    }
    vec![
        FiberedSet::zero_fiber(m),
        FiberedSet::single(Cylinder::new(0, vec![0, m.n_states() - 1], Some(z.clone()))),
        FiberedSet::new(vec![Cylinder::at(0, z.clone()), Cylinder::new(1, vec![m.n_states() - 1], Some(one_off))]),
    ]
}

#[test]
fn multiple_correlations_match_enumeration() {
    for m in small_models() {
        let sets = test_sets(&m);
        for a in &sets {
            for b in &sets {
                for (k, shifts) in [(1, vec![0, 0]), (2, vec![0, 0]), (3, vec![0, 1])] {
                    let got = multi_correlation::<BigRational>(&m, &[a.clone(), b.clone()], k, &shifts).unwrap();
                    let want = event_oracle(&m, &[(shifts[0], a), (k + shifts[1], b)]);
                    assert_eq!(got, want, "{} k = {k}", m.name);
                }
                // Three sets at 0, k, 2k.
                for k in [1, 2] {
                    let got = multi_correlation::<BigRational>(&m, &[a.clone(), b.clone(), a.clone()], k, &[0, 0, 0]).unwrap();
                    let want = event_oracle(&m, &[(0, a), (k, b), (2 * k, a)]);
                    assert_eq!(got, want, "{} triple k = {k}", m.name);
                }
            }
        }
    }
}

#[test]
fn transfer_operator_matches_enumeration() {
    for m in small_models() {
        let sets = test_sets(&m);
        for a in &sets[..2] {
            for b in &sets[..2] {
                for n in 1..=3 {
                    let ta = transfer_apply::<BigRational>(&m, &StepFunction::indicator(&m, a).unwrap(), n).unwrap();
                    let lhs = ta.mul(&m, &StepFunction::indicator(&m, b).unwrap()).integral(&m).unwrap();
                    // <T^n 1_A, 1_B> = m(A and T^{-n} B)
                    assert_eq!(lhs, event_oracle(&m, &[(0, a), (n as i64, b)]), "{} n = {n}", m.name);
                }
                let nested = transfer_nested::<BigRational>(&m, &[a.clone(), b.clone()], &[1, 2]).unwrap();
                // T(1_A T^2 1_B) integrates to <1_A, T^2 1_B> = m(B and T^{-2} A).
                assert_eq!(nested.integral(&m).unwrap(), event_oracle(&m, &[(0, b), (2, a)]), "{} nested", m.name);
            }
        }
    }
}

#[test]
fn psi_moments_match_enumeration() {
    // Times {j k : -nu <= j <= d - nu} shifted by nu k to be nonnegative;
    // m is T-invariant, so the shift does not change the measure.
    for m in small_models() {
        let omega = FiberedSet::zero_fiber(&m);
        let d = 2;
        for nu in 0..=d {
            let got = psi_moments::<BigRational>(&m, &omega, d, nu, &[1, 2, 3]).unwrap();
            let times = |k: i64| -> Vec<i64> { (0..=d as i64).map(|j| j * k).collect() };
            for row in &got {
                let mut first = BigRational::from_integer(0.into());
                let mut second = BigRational::from_integer(0.into());
                for k in 1..=row.n as i64 {
                    let ev: Vec<(i64, &FiberedSet)> = times(k).into_iter().map(|t| (t, &omega)).collect();
                    first += event_oracle(&m, &ev);
                    for l in 1..=row.n as i64 {
                        let shift = nu as i64 * (k.max(l) - k.min(l));
                        let mut ts: Vec<i64> = times(k).into_iter().map(|t| t + nu as i64 * (l.max(k) - k)).collect();
                        ts.extend(times(l).into_iter().map(|t| t + nu as i64 * (l.max(k) - l)));
                        let _ = shift;
                        ts.sort();
                        ts.dedup();
                        let ev: Vec<(i64, &FiberedSet)> = ts.into_iter().map(|t| (t, &omega)).collect();
                        second += event_oracle(&m, &ev);
                    }
                }
                assert_eq!(row.first, first, "{} nu = {nu} n = {}", m.name, row.n);
                assert_eq!(row.second, second, "{} nu = {nu} n = {} second", m.name, row.n);
            }
        }
    }
}

#[test]
fn cylinder_measures_sum_to_one() {
    for m in small_models() {
        for len in 1..=4 {
            let total: BigRational = paths(&m, len - 1).into_iter().map(|(_, w)| w).sum();
            assert_eq!(total, one(), "{}", m.name);
        }
    }
}
