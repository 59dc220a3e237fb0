//! Brute-force oracles shared by the integration tests. Everything here
//! enumerates paths explicitly and never calls the library's DPs.
#![allow(dead_code)]

use ergolab::markov::{FiberedSet, MarkovModel};
use num::{BigRational, One, Zero};

/// Every path s_0..s_len of positive probability, with weight
/// mu(s_0) p(s_0, s_1) ... p(s_{len-1}, s_len).
pub fn paths(model: &MarkovModel, len: usize) -> Vec<(Vec<usize>, BigRational)> {
    let n = model.n_states();
    let mut out: Vec<(Vec<usize>, BigRational)> =
        (0..n).map(|s| (vec![s], model.mu_exact(s).clone())).filter(|(_, w)| !w.is_zero()).collect();
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n);
        for (p, w) in &out {
            let last = *p.last().unwrap();
            for t in 0..n {
                let q = model.p_exact(last, t);
                if !q.is_zero() {
                    let mut p2 = p.clone();
                    p2.push(t);
                    next.push((p2, w * q));
                }
            }
        }
        out = next;
    }
    out
}

/// phi_n(path) = sum_{i < n} phi(s_i, s_{i+1}).
pub fn phi_sum(model: &MarkovModel, path: &[usize], n: usize) -> Vec<i64> {
    let mut z = vec![0; model.kappa];
    for i in 0..n {
        for (a, b) in z.iter_mut().zip(model.phi(path[i], path[i + 1])) {
            *a += b;
        }
    }
    z
}

fn last_time(events: &[(i64, &FiberedSet)]) -> i64 {
    events
        .iter()
        .flat_map(|(t, b)| b.cylinders.iter().map(move |c| t + c.position + c.word.len() as i64 - 1))
        .max()
        .unwrap()
}

/// m(intersection of T^{-t} B over the events), with m = mu x counting
/// measure on the fiber. Times and positions must be >= 0 and some
/// cylinder must pin the fiber.
pub fn event_oracle(model: &MarkovModel, events: &[(i64, &FiberedSet)]) -> BigRational {
    assert!(events.iter().all(|(t, b)| *t >= 0 && b.cylinders.iter().all(|c| c.position >= 0)));
    let len = last_time(events) as usize;
    let mut total = BigRational::zero();
    for (path, w) in paths(model, len) {
        // Candidate base fibers z0 from every pinned cylinder that matches.
        let mut candidates: Vec<Vec<i64>> = Vec::new();
        for (t, b) in events {
            for c in &b.cylinders {
                if let Some(f) = &c.fiber {
                    let phi = phi_sum(model, &path, *t as usize);
                    let z0: Vec<i64> = f.iter().zip(&phi).map(|(a, b)| a - b).collect();
                    if !candidates.contains(&z0) {
                        candidates.push(z0);
                    }
                }
            }
        }
        assert!(!candidates.is_empty() || model.kappa == 0, "oracle needs a pinned fiber");
        if model.kappa == 0 {
            candidates = vec![vec![]];
        }
        for z0 in candidates {
            let hit = events.iter().all(|(t, b)| {
                let t = *t as usize;
                let phi = phi_sum(model, &path, t);
                b.cylinders.iter().any(|c| {
                    let start = t + c.position as usize;
                    let word_ok = path[start..start + c.word.len()] == c.word[..];
                    let fiber_ok = c.fiber.as_ref().map_or(true, |f| {
                        z0.iter().zip(&phi).map(|(a, b)| a + b).collect::<Vec<_>>() == *f
                    });
                    word_ok && fiber_ok
                })
            });
            if hit {
                total += &w;
            }
        }
    }
    total
}

/// mu[phi_n = 0].
pub fn return_oracle(model: &MarkovModel, n: usize) -> BigRational {
    let zero = vec![0; model.kappa];
    paths(model, n).into_iter().filter(|(p, _)| phi_sum(model, p, n) == zero).map(|(_, w)| w).sum()
}

/// mu[phi_n = 0 and phi_k != 0 for 0 < k < n].
pub fn first_return_oracle(model: &MarkovModel, n: usize) -> BigRational {
    let zero = vec![0; model.kappa];
    paths(model, n)
        .into_iter()
        .filter(|(p, _)| phi_sum(model, p, n) == zero && (1..n).all(|k| phi_sum(model, p, k) != zero))
        .map(|(_, w)| w)
        .sum()
}

/// Builtin models small enough for enumeration.
pub fn small_models() -> Vec<MarkovModel> {
    ergolab::builtin::MODEL_NAMES
        .iter()
        .map(|n| ergolab::builtin::model(n).unwrap())
        .filter(|m| m.n_states() <= 3)
        .collect()
}

pub fn one() -> BigRational {
    BigRational::one()
}
