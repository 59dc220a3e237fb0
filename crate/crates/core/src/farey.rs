//! Farey sequences, ordering bijections of {ik, jl : 1 <= i, j <= d}, step
//! vectors, and the psi moments built on them.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::markov::events::{boundary_fibers, chain_from, Anchor, Atoms, BridgeTable, FiberedSet};
use crate::markov::model::word_measure;
use crate::markov::{event_measure, MarkovModel};
use crate::scalar::{Acc, Scalar};

/// Reduced fraction p/q.
pub type Frac = (u64, u64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FareySeq {
    pub d: u64,
    pub fractions: Vec<Frac>,
}

impl FareySeq {
    /// Number of intervals N_d.
    pub fn intervals(&self) -> usize {
        self.fractions.len() - 1
    }
}

/// All reduced p/q in [0, 1] with q <= d, increasing (next-term recurrence).
pub fn farey_sequence(d: u64) -> Result<FareySeq> {
    if d == 0 {
        return domain("Farey order must be positive");
    }
    let (mut a, mut b, mut c, mut e) = (0u64, 1u64, 1u64, d);
    let mut fractions = vec![(a, b)];
    while c <= d {
        let k = (d + b) / e;
        let (na, nb) = (c, e);
        c = k * c - a;
        e = k * e - b;
        a = na;
        b = nb;
        fractions.push((a, b));
    }
    Ok(FareySeq { d, fractions })
}

/// (kappa, epsilon) with kappa in 1..=d and epsilon in {0, 1}.
pub type Slot = (u64, u8);

/// N_{(k,l)}(kappa, eps) = (1 - eps) kappa k + eps kappa l.
pub fn slot_value(k: u64, l: u64, (kappa, eps): Slot) -> u64 {
    if eps == 0 {
        kappa * k
    } else {
        kappa * l
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingBijection {
    pub d: u64,
    pub j: usize,
    pub pairs: Vec<Slot>,
    /// (r_j, r_{j+1}], half open on the left.
    pub slope_interval: (Frac, Frac),
}

fn tie_key((kappa, eps): Slot) -> (u8, u64) {
    (eps, kappa)
}

/// pi_j: slots sorted by value at the representative slope r_{j+1}, ties
/// broken by (eps, kappa).
pub fn build_ordering(d: u64, j: usize) -> Result<OrderingBijection> {
    let f = farey_sequence(d)?;
    if j >= f.intervals() {
        return domain(format!("interval index {j} out of range 0..{}", f.intervals()));
    }
    let (lo, hi) = (f.fractions[j], f.fractions[j + 1]);
    let (k, l) = hi;
    let mut pairs: Vec<Slot> = (1..=d).flat_map(|kappa| [(kappa, 0u8), (kappa, 1u8)]).collect();
    pairs.sort_by(|a, b| slot_value(k, l, *a).cmp(&slot_value(k, l, *b)).then(tie_key(*a).cmp(&tie_key(*b))));
    Ok(OrderingBijection { d, j, pairs, slope_interval: (lo, hi) })
}

pub fn all_orderings(d: u64) -> Result<Vec<OrderingBijection>> {
    let n = farey_sequence(d)?.intervals();
    (0..n).map(|j| build_ordering(d, j)).collect()
}

impl OrderingBijection {
    /// The defining relation: N_{(k,l)} composed with pi is non-decreasing.
    pub fn orders_weakly(&self, k: u64, l: u64) -> bool {
        self.pairs.windows(2).all(|w| slot_value(k, l, w[0]) <= slot_value(k, l, w[1]))
    }

    /// Non-decreasing, and every tie respects the (eps, kappa) order. This is
    /// the relation under which the domains are exactly the half-open slope
    /// intervals.
    pub fn orders(&self, k: u64, l: u64) -> bool {
        self.pairs.windows(2).all(|w| {
            match slot_value(k, l, w[0]).cmp(&slot_value(k, l, w[1])) {
                Ordering::Less => true,
                Ordering::Equal => tie_key(w[0]) < tie_key(w[1]),
                Ordering::Greater => false,
            }
        })
    }

    /// k/l in (r_j, r_{j+1}], exactly.
    pub fn in_interval(&self, k: u64, l: u64) -> bool {
        let ((p0, q0), (p1, q1)) = self.slope_interval;
        k * q0 > p0 * l && k * q1 <= p1 * l
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = self.pairs.clone();
        seen.sort();
        seen.dedup();
        seen.len() == 2 * self.d as usize
            && self.pairs.len() == 2 * self.d as usize
            && seen.iter().all(|&(k, e)| (1..=self.d).contains(&k) && e <= 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub k: u64,
    pub l: u64,
    pub ordered: bool,
    pub in_interval: bool,
}

/// Brute force over 1 <= k <= l <= bound: pi orders (k, l) iff k/l lies in
/// the slope interval. Returns the first counterexample in (k, l) order.
pub fn verify_ordering_domain(pi: &OrderingBijection, bound: u64) -> std::result::Result<(), Counterexample> {
    let first = (1..=bound)
        .into_par_iter()
        .filter_map(|l| {
            (1..=l).find_map(|k| {
                let (o, i) = (pi.orders(k, l), pi.in_interval(k, l));
                (o != i).then_some(Counterexample { k, l, ordered: o, in_interval: i })
            })
        })
        .min_by_key(|c| (c.l, c.k));
    match first {
        Some(c) => Err(c),
        None => Ok(()),
    }
}

/// Checks that every (k, l) with k <= l <= bound is ordered by exactly one
/// pi_j. Returns the first (k, l, count) that fails.
pub fn check_partition(orderings: &[OrderingBijection], bound: u64) -> Option<(u64, u64, usize)> {
    (1..=bound)
        .into_par_iter()
        .filter_map(|l| {
            (1..=l).find_map(|k| {
                let c = orderings.iter().filter(|pi| pi.orders(k, l)).count();
                (c != 1).then_some((k, l, c))
            })
        })
        .min_by_key(|&(k, l, _)| (l, k))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepVectors {
    pub vectors: Vec<(i64, i64)>,
    /// Index pairs into `vectors`, each with nonzero determinant.
    pub pairing: Vec<(usize, usize)>,
}

pub fn det((a, b): (i64, i64), (c, e): (i64, i64)) -> i64 {
    a * e - b * c
}

fn slot_vec((kappa, eps): Slot) -> (i64, i64) {
    let k = kappa as i64;
    if eps == 0 {
        (k, 0)
    } else {
        (0, k)
    }
}

/// a_1 = v(pi(1)), a_j = v(pi(j)) - v(pi(j-1)), plus an independent pairing.
pub fn step_vectors(pi: &OrderingBijection) -> Result<StepVectors> {
    let mut vectors = Vec::with_capacity(pi.pairs.len());
    let mut prev = (0i64, 0i64);
    for &s in &pi.pairs {
        let v = slot_vec(s);
        vectors.push((v.0 - prev.0, v.1 - prev.1));
        prev = v;
    }
    if let Some(j) = vectors.iter().position(|v| *v == (0, 0)) {
        return Err(Error::Structural(format!("step vector a_{} of {:?} is zero", j + 1, pi.pairs)));
    }
    let mut used = vec![false; vectors.len()];
    let mut pairing = Vec::new();
    if match_pairs(&vectors, &mut used, &mut pairing) {
        Ok(StepVectors { vectors, pairing })
    } else {
        Err(Error::Structural(format!("no independent pairing of step vectors for {:?}", pi.pairs)))
    }
}

fn match_pairs(v: &[(i64, i64)], used: &mut [bool], out: &mut Vec<(usize, usize)>) -> bool {
    let Some(i) = used.iter().position(|u| !u) else { return true };
    used[i] = true;
    for j in i + 1..v.len() {
        if !used[j] && det(v[i], v[j]) != 0 {
            used[j] = true;
            out.push((i, j));
            if match_pairs(v, used, out) {
                return true;
            }
            out.pop();
            used[j] = false;
        }
    }
    used[i] = false;
    false
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsiMoments<T> {
    pub n: usize,
    pub first: T,
    pub second: T,
    pub a_d: T,
}

/// Times {j k : -nu <= j <= d - nu}.
fn psi_times(k: i64, d: usize, nu: usize) -> Vec<i64> {
    (-(nu as i64)..=(d - nu) as i64).map(|j| j * k).collect()
}

/// Evaluates m(intersection over t in times of T^{-t} Omega) by splitting at
/// time 0: the future uses the chain, the past the time-reversed chain.
struct PsiEvaluator<'a, T> {
    model: &'a MarkovModel,
    atoms: Atoms,
    reflected: Atoms,
    forward: BridgeTable<T>,
    backward: BridgeTable<T>,
    reversed: MarkovModel,
}

impl<'a, T: Scalar> PsiEvaluator<'a, T> {
    fn new(model: &'a MarkovModel, omega: &FiberedSet, max_gap: usize) -> Result<Self> {
        let atoms = Atoms::of(model, omega)?;
        if model.kappa > 0 && atoms.words.values().flatten().any(|f| f.is_none()) {
            return domain("Omega must pin the fiber (finite measure)");
        }
        let reversed = model.reversed();
        let reflected = atoms.reflect();
        let offsets = |m: &MarkovModel, a: &Atoms| {
            let x = Anchor { time: 0, atoms: a.clone() };
            let y = Anchor { time: 2 * a.len() as i64 + 1, atoms: a.clone() };
            let mut out = std::collections::BTreeSet::new();
            for (e, _) in boundary_fibers(m, &x, true) {
                for (s, _) in boundary_fibers(m, &y, false) {
                    out.insert(s.iter().zip(&e).map(|(p, q)| p - q).collect::<Vec<i64>>());
                }
            }
            if out.is_empty() {
                out.insert(vec![0; m.kappa]);
            }
            out
        };
        let forward = BridgeTable::build(model, max_gap, &offsets(model, &atoms))?;
        let backward = BridgeTable::build(&reversed, max_gap, &offsets(&reversed, &reflected))?;
        Ok(PsiEvaluator { model, atoms, reflected, forward, backward, reversed })
    }

    /// Sorted distinct times; None when windows overlap (caller falls back).
    fn measure(&self, times: &[i64]) -> Result<Option<T>> {
        let mut ts = times.to_vec();
        ts.sort();
        ts.dedup();
        let len = self.atoms.len() as i64;
        if ts.windows(2).any(|w| w[1] - w[0] < len - 1) || !ts.contains(&0) {
            return Ok(None);
        }
        // Fails only if windows share more than one symbol.
        if ts.windows(2).any(|w| w[1] - w[0] < len - 1) {
            return Ok(None);
        }
        let future: Vec<Anchor> =
            ts.iter().filter(|&&t| t > 0).map(|&t| Anchor { time: t, atoms: self.atoms.clone() }).collect();
        let past: Vec<Anchor> = ts
            .iter()
            .rev()
            .filter(|&&t| t < 0)
            .map(|&t| Anchor { time: -t, atoms: self.reflected.clone() })
            .collect();
        let zero = (-self.atoms.a) as usize;
        let rzero = (-self.reflected.a) as usize;
        let mut acc = Acc::new();
        for (w, fibers) in &self.atoms.words {
            let m: T = word_measure(self.model, w)?;
            let rw: Vec<usize> = w.iter().rev().copied().collect();
            for f in fibers {
                let f = f.clone().unwrap_or_default();
                let mut ze = f.clone();
                for (x, y) in ze.iter_mut().zip(crate::markov::model::word_phi(self.model, &w[zero..])) {
                    *x += y;
                }
                let fwd = chain_from(
                    self.model,
                    &self.forward,
                    vec![(*w.last().unwrap(), ze, T::one())],
                    self.atoms.b,
                    &future,
                )?;
                if fwd.is_zero() {
                    continue;
                }
                let mut zb = f.clone();
                for (x, y) in zb.iter_mut().zip(crate::markov::model::word_phi(&self.reversed, &rw[rzero..])) {
                    *x += y;
                }
                let bwd = chain_from(
                    &self.reversed,
                    &self.backward,
                    vec![(*rw.last().unwrap(), zb, T::one())],
                    self.reflected.b,
                    &past,
                )?;
                acc.add(&(m.clone() * fwd * bwd));
            }
        }
        Ok(Some(acc.value()))
    }

    fn measure_or_dp(&self, times: &[i64]) -> Result<T> {
        if let Some(v) = self.measure(times)? {
            return Ok(v);
        }
        let mut ts = times.to_vec();
        ts.sort();
        ts.dedup();
        let anchors: Vec<Anchor> = ts.iter().map(|&t| Anchor { time: t, atoms: self.atoms.clone() }).collect();
        event_measure(self.model, &anchors)
    }
}

/// First moment sum_k m(Omega and e_k), second moment sum_{k,l} m(Omega and
/// e_k e_l), and a_d(n) = sum_k u(Omega, k)^d, for every n in `ns`.
pub fn psi_moments<T: Scalar>(
    model: &MarkovModel,
    omega: &FiberedSet,
    d: usize,
    nu: usize,
    ns: &[usize],
) -> Result<Vec<PsiMoments<T>>> {
    if nu > d || d == 0 {
        return domain(format!("need 0 <= nu <= d and d >= 1 (d = {d}, nu = {nu})"));
    }
    let n_max = *ns.iter().max().unwrap_or(&0);
    let max_gap = d * n_max + 1;
    if max_gap > 200_000 {
        return Err(Error::Resource(format!("n = {n_max} exceeds the psi window")));
    }
    let ev = PsiEvaluator::<T>::new(model, omega, max_gap)?;
    let m_omega: T = omega.measure(model)?;
    if m_omega.is_zero() {
        return domain("m(Omega) = 0");
    }
    let mut first = Acc::<T>::new();
    let mut a_d = Acc::<T>::new();
    // Second moment: S(n) = S(n-1) + 2 sum_{k<n} c(k, n) + c(n, n).
    let mut second = Acc::<T>::new();
    let two = T::from_i64(2);
    let mut out = Vec::new();
    for n in 1..=n_max {
        let tn = psi_times(n as i64, d, nu);
        first.add(&ev.measure_or_dp(&tn)?);
        let u = ev.measure_or_dp(&[0, n as i64])? / m_omega.clone();
        let mut ud = T::one();
        for _ in 0..d {
            ud = ud * u.clone();
        }
        a_d.add(&ud);
        for k in 1..n {
            let mut t = psi_times(k as i64, d, nu);
            t.extend(&tn);
            second.add(&(two.clone() * ev.measure_or_dp(&t)?));
        }
        second.add(&ev.measure_or_dp(&tn)?);
        if ns.contains(&n) {
            out.push(PsiMoments { n, first: first.value(), second: second.value(), a_d: a_d.value() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farey_examples() {
        assert_eq!(farey_sequence(1).unwrap().fractions, vec![(0, 1), (1, 1)]);
        assert_eq!(farey_sequence(3).unwrap().fractions, vec![(0, 1), (1, 3), (1, 2), (2, 3), (1, 1)]);
        assert_eq!(farey_sequence(5).unwrap().fractions.len(), 11);
        assert!(farey_sequence(0).is_err());
    }

    #[test]
    fn orderings_by_hand() {
        assert_eq!(build_ordering(1, 0).unwrap().pairs, vec![(1, 0), (1, 1)]);
        assert_eq!(build_ordering(2, 1).unwrap().pairs, vec![(1, 0), (1, 1), (2, 0), (2, 1)]);
        assert_eq!(build_ordering(2, 0).unwrap().pairs, vec![(1, 0), (2, 0), (1, 1), (2, 1)]);
    }

    #[test]
    fn d1_outside_interval() {
        let pi = build_ordering(1, 0).unwrap();
        // Slope 3/2 is outside (0, 1]: l < k so the order k, l fails.
        assert!(!pi.orders(3, 2) && !pi.in_interval(3, 2));
    }

    #[test]
    fn weak_order_spills_onto_left_endpoint() {
        let pi = build_ordering(2, 1).unwrap();
        assert!(pi.orders_weakly(1, 2) && !pi.orders(1, 2));
    }

    #[test]
    fn mutation_is_caught() {
        let mut pi = build_ordering(3, 2).unwrap();
        pi.pairs.swap(1, 2);
        let c = verify_ordering_domain(&pi, 50).unwrap_err();
        assert!(c.ordered != c.in_interval);
    }

    #[test]
    fn step_vectors_d1_and_d2() {
        let sv = step_vectors(&build_ordering(1, 0).unwrap()).unwrap();
        assert_eq!(sv.vectors, vec![(1, 0), (-1, 1)]);
        let sv = step_vectors(&build_ordering(2, 1).unwrap()).unwrap();
        assert_eq!(sv.vectors, vec![(1, 0), (-1, 1), (2, -1), (-2, 2)]);
        for &(i, j) in &sv.pairing {
            assert_ne!(det(sv.vectors[i], sv.vectors[j]), 0);
        }
    }
}
