//! Measures of intersections of time-shifted fibered cylinder sets.
//!
//! Two evaluators share one meaning:
//! - [`event_measure`] walks absolute time with a window of remembered
//!   symbols. It handles any overlap between anchors.
//! - [`chain_measure`] splits non-overlapping anchors into word atoms joined
//!   by precomputed bridge kernels. It is the fast path for long gaps.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{Acc, Scalar};

use super::lattice::LatticeDistribution;
use super::model::{word_measure, word_phi, Cylinder, MarkovModel};

/// Finite union of fibered cylinders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberedSet {
    pub cylinders: Vec<Cylinder>,
}

impl FiberedSet {
    pub fn new(cylinders: Vec<Cylinder>) -> Self {
        FiberedSet { cylinders }
    }

    /// X x {z}: every state at time 0, fiber z.
    pub fn fiber(model: &MarkovModel, z: Vec<i64>) -> Self {
        FiberedSet::new((0..model.n_states()).map(|s| Cylinder::at(s, z.clone())).collect())
    }

    /// The zero fiber X x {0}.
    pub fn zero_fiber(model: &MarkovModel) -> Self {
        Self::fiber(model, vec![0; model.kappa])
    }

    pub fn single(c: Cylinder) -> Self {
        FiberedSet::new(vec![c])
    }

    pub fn measure<T: Scalar>(&self, model: &MarkovModel) -> Result<T> {
        let atoms = Atoms::of(model, self)?;
        let mut acc = Acc::new();
        for (w, fibers) in &atoms.words {
            let m: T = word_measure(model, w)?;
            for _ in fibers {
                acc.add(&m);
            }
        }
        Ok(acc.value())
    }
}

/// A fibered set rewritten over a common window [a, b] containing 0.
/// Distinct (word, fiber) pairs are disjoint events.
#[derive(Clone, Debug)]
pub struct Atoms {
    pub a: i64,
    pub b: i64,
    pub words: BTreeMap<Vec<usize>, BTreeSet<Option<Vec<i64>>>>,
}

impl Atoms {
    pub fn of(model: &MarkovModel, set: &FiberedSet) -> Result<Self> {
        if set.cylinders.is_empty() {
            return Ok(Atoms { a: 0, b: 0, words: BTreeMap::new() });
        }
        let ns = model.n_states();
        let mut a = 0i64;
        let mut b = 0i64;
        for c in &set.cylinders {
            if c.word.is_empty() {
                return domain("cylinder word must be nonempty");
            }
            if let Some(s) = c.word.iter().find(|&&s| s >= ns) {
                return domain(format!("symbol {s} outside state space"));
            }
            if let Some(f) = &c.fiber {
                if f.len() != model.kappa {
                    return domain(format!("fiber {f:?} has wrong dimension"));
                }
            }
            a = a.min(c.position);
            b = b.max(c.position + c.word.len() as i64 - 1);
        }
        let len = (b - a + 1) as usize;
        if (ns as f64).powi(len as i32) > 1e6 {
            return Err(Error::Resource(format!("cylinder window of length {len} is too wide")));
        }
        let mut words: BTreeMap<Vec<usize>, BTreeSet<Option<Vec<i64>>>> = BTreeMap::new();
        let mut w = vec![0usize; len];
        loop {
            if word_measure::<f64>(model, &w)? > 0.0 {
                for c in &set.cylinders {
                    let off = (c.position - a) as usize;
                    if w[off..off + c.word.len()] == c.word[..] {
                        let fiber = if model.kappa == 0 { Some(vec![]) } else { c.fiber.clone() };
                        words.entry(w.clone()).or_default().insert(fiber);
                    }
                }
            }
            let mut i = len;
            loop {
                if i == 0 {
                    return Ok(Atoms { a, b, words });
                }
                i -= 1;
                w[i] += 1;
                if w[i] < ns {
                    break;
                }
                w[i] = 0;
            }
        }
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Time reflection t -> -t: window [-b, -a], words reversed.
    pub fn reflect(&self) -> Atoms {
        let words = self
            .words
            .iter()
            .map(|(w, f)| (w.iter().rev().copied().collect(), f.clone()))
            .collect();
        Atoms { a: -self.b, b: -self.a, words }
    }

    pub(crate) fn any_fiber_free(&self) -> bool {
        self.words.values().flatten().any(|f| f.is_none())
    }
}

/// One set placed at time t: its atoms occupy [t + a, t + b].
#[derive(Clone, Debug)]
pub struct Anchor {
    pub time: i64,
    pub atoms: Atoms,
}

impl Anchor {
    pub fn start(&self) -> i64 {
        self.time + self.atoms.a
    }
    pub fn end(&self) -> i64 {
        self.time + self.atoms.b
    }
}

pub(crate) fn add_vec(a: &mut [i64], b: &[i64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// m(intersection over anchors of T^{-t} B), by direct DP over absolute time.
pub fn event_measure<T: Scalar>(model: &MarkovModel, anchors: &[Anchor]) -> Result<T> {
    if anchors.is_empty() {
        return domain("need at least one set");
    }
    if anchors.iter().any(|a| a.atoms.is_empty()) {
        return Ok(T::zero());
    }
    let ns = model.n_states() as u64;
    let t0 = anchors.iter().map(Anchor::start).min().unwrap();
    let t1 = anchors.iter().map(Anchor::end).max().unwrap();
    let width = anchors.iter().map(|a| a.atoms.len()).max().unwrap();
    if (ns as f64).powi(width as i32) > 1e15 {
        return Err(Error::Resource("symbol window too wide for event DP".into()));
    }
    let modulus = ns.pow(width as u32);
    let mut by_end: BTreeMap<i64, Vec<&Anchor>> = BTreeMap::new();
    for a in anchors {
        by_end.entry(a.end()).or_default().push(a);
    }
    let edges = model.edges::<T>();
    // State: (last `width` symbols as base-|S| digits, lattice coordinate if pinned).
    type Key = (u64, Option<Vec<i64>>);
    let unpinned = if model.kappa == 0 { Some(vec![]) } else { None };
    let mut cur: BTreeMap<Key, T> = BTreeMap::new();
    for s in 0..model.n_states() {
        cur.insert((s as u64, unpinned.clone()), model.mu(s));
    }
    let mut t = t0;
    loop {
        if let Some(list) = by_end.get(&t) {
            let elapsed = (t - t0 + 1) as usize;
            let mut next: BTreeMap<Key, T> = BTreeMap::new();
            for ((hist, z), v) in cur {
                // Each surviving branch may be split by the first pinning check.
                let mut branches: Vec<Option<Vec<i64>>> = vec![z];
                for anchor in list {
                    let l = anchor.atoms.len();
                    debug_assert!(l <= elapsed);
                    let mut word = vec![0usize; l];
                    let mut h = hist;
                    for i in (0..l).rev() {
                        word[i] = (h % ns) as usize;
                        h /= ns;
                    }
                    let Some(fibers) = anchor.atoms.words.get(&word) else {
                        branches.clear();
                        break;
                    };
                    // Lattice coordinate at the anchor time, relative to the current one.
                    let zero = (-anchor.atoms.a) as usize;
                    let tail = word_phi(model, &word[zero..]);
                    let mut out = Vec::new();
                    for br in branches {
                        match br {
                            Some(zc) => {
                                let mut at = zc.clone();
                                for (x, y) in at.iter_mut().zip(&tail) {
                                    *x -= y;
                                }
                                if fibers.contains(&None) || fibers.contains(&Some(at)) {
                                    out.push(Some(zc));
                                }
                            }
                            None => {
                                for f in fibers {
                                    match f {
                                        Some(f) => {
                                            let mut zc = f.clone();
                                            add_vec(&mut zc, &tail);
                                            out.push(Some(zc));
                                        }
                                        None => out.push(None),
                                    }
                                }
                            }
                        }
                    }
                    branches = out;
                }
                for br in branches {
                    let slot = next.entry((hist, br)).or_insert_with(T::zero);
                    *slot = slot.clone() + v.clone();
                }
            }
            cur = next;
        }
        if t == t1 {
            break;
        }
        let mut next: BTreeMap<Key, T> = BTreeMap::new();
        for ((hist, z), v) in &cur {
            let s = (hist % ns) as usize;
            for e in &edges[s] {
                let h = (hist * ns + e.to as u64) % modulus;
                let z2 = z.as_ref().map(|z| {
                    let mut z = z.clone();
                    add_vec(&mut z, &e.phi);
                    z
                });
                let slot = next.entry((h, z2)).or_insert_with(T::zero);
                *slot = slot.clone() + v.clone() * e.p.clone();
            }
        }
        cur = next;
        t += 1;
    }
    let mut acc = Acc::new();
    for ((_, z), v) in &cur {
        if z.is_none() && !v.is_zero() {
            return domain("intersection has infinite measure: no set pins the fiber");
        }
        acc.add(v);
    }
    Ok(acc.value())
}

/// Q_g[s][t][o] = P(state_g = t, phi_g = offsets[o] | state_0 = s), g = 0..=max_gap.
#[derive(Clone, Debug)]
pub struct BridgeTable<T> {
    pub offsets: Vec<Vec<i64>>,
    index: BTreeMap<Vec<i64>, usize>,
    n_states: usize,
    data: Vec<Vec<T>>,
}

impl<T: Scalar> BridgeTable<T> {
    pub fn build(model: &MarkovModel, max_gap: usize, offsets: &BTreeSet<Vec<i64>>) -> Result<Self> {
        let ns = model.n_states();
        let offsets: Vec<Vec<i64>> = offsets.iter().cloned().collect();
        let index = offsets.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        let no = offsets.len();
        let mut data = vec![vec![T::zero(); ns * ns * no]; max_gap + 1];
        let edges = model.edges::<T>();
        for s in 0..ns {
            let mut d = LatticeDistribution::<T>::point(ns, s, &vec![0; model.kappa]);
            for (g, slot) in data.iter_mut().enumerate() {
                if g > 0 {
                    d = d.step(&edges)?;
                }
                for t in 0..ns {
                    for (o, z) in offsets.iter().enumerate() {
                        slot[(s * ns + t) * no + o] = d.get(t, z);
                    }
                }
            }
        }
        Ok(BridgeTable { offsets, index, n_states: ns, data })
    }

    pub fn max_gap(&self) -> usize {
        self.data.len() - 1
    }

    pub fn get(&self, g: usize, s: usize, t: usize, z: &[i64]) -> T {
        match (self.data.get(g), self.index.get(z)) {
            (Some(row), Some(&o)) => row[(s * self.n_states + t) * self.offsets.len() + o].clone(),
            _ => T::zero(),
        }
    }

    pub fn has_offset(&self, z: &[i64]) -> bool {
        self.index.contains_key(z)
    }
}

/// Anchors sorted by start; None when two windows overlap in more than one
/// shared endpoint or when a set leaves the fiber free (extension case).
pub fn chain_ready(model: &MarkovModel, anchors: &[Anchor]) -> Option<Vec<Anchor>> {
    let mut sorted = anchors.to_vec();
    sorted.sort_by_key(|a| (a.start(), a.end()));
    for w in sorted.windows(2) {
        if w[1].start() < w[0].end() {
            return None;
        }
    }
    if model.kappa > 0 && sorted.iter().any(|a| a.atoms.any_fiber_free()) {
        return None;
    }
    Some(sorted)
}

/// Lattice offsets the bridges must cover for a sorted, chain-ready anchor list.
pub fn needed_offsets(model: &MarkovModel, sorted: &[Anchor]) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    for w in sorted.windows(2) {
        for (e, _) in boundary_fibers(model, &w[0], true) {
            for (s, _) in boundary_fibers(model, &w[1], false) {
                let mut d = s.clone();
                for (x, y) in d.iter_mut().zip(&e) {
                    *x -= y;
                }
                out.insert(d);
            }
        }
    }
    if out.is_empty() {
        out.insert(vec![0; model.kappa]);
    }
    out
}

/// Lattice coordinate at the window end (end = true) or start of each atom.
pub(crate) fn boundary_fibers(model: &MarkovModel, a: &Anchor, end: bool) -> Vec<(Vec<i64>, ())> {
    let zero = (-a.atoms.a) as usize;
    let mut out = Vec::new();
    for (w, fibers) in &a.atoms.words {
        for f in fibers.iter().flatten() {
            let mut z = f.clone();
            if end {
                add_vec(&mut z, &word_phi(model, &w[zero..]));
            } else {
                for (x, y) in z.iter_mut().zip(word_phi(model, &w[..=zero])) {
                    *x -= y;
                }
            }
            out.push((z, ()));
        }
    }
    out
}

/// Same value as [`event_measure`] for chain-ready anchors, via bridges.
pub fn chain_measure<T: Scalar>(model: &MarkovModel, sorted: &[Anchor], bridges: &BridgeTable<T>) -> Result<T> {
    if sorted.iter().any(|a| a.atoms.is_empty()) {
        return Ok(T::zero());
    }
    let first = &sorted[0];
    let zero0 = (-first.atoms.a) as usize;
    let mut v: Vec<(usize, Vec<i64>, T)> = Vec::new();
    for (w, fibers) in &first.atoms.words {
        let m: T = word_measure(model, w)?;
        for f in fibers {
            let mut z = f.clone().unwrap_or_default();
            add_vec(&mut z, &word_phi(model, &w[zero0..]));
            v.push((*w.last().unwrap(), z, m.clone()));
        }
    }
    chain_from(model, bridges, v, first.end(), &sorted[1..])
}

/// Continues a chain from weighted (last symbol, lattice coordinate) states
/// at time `end` through the remaining sorted anchors.
pub fn chain_from<T: Scalar>(
    model: &MarkovModel,
    bridges: &BridgeTable<T>,
    init: Vec<(usize, Vec<i64>, T)>,
    end: i64,
    rest: &[Anchor],
) -> Result<T> {
    let mut v = init;
    let mut prev_end = end;
    for next in rest {
        let gap = next.start() - prev_end;
        if gap < 0 {
            return Err(Error::Internal("chain anchors overlap".into()));
        }
        let gap = gap as usize;
        if gap > bridges.max_gap() {
            return Err(Error::Internal(format!("bridge table too short for gap {gap}")));
        }
        let zero = (-next.atoms.a) as usize;
        let mut out: Vec<(usize, Vec<i64>, T)> = Vec::new();
        for (w, fibers) in &next.atoms.words {
            // Transition weight inside the word, excluding its first symbol's mu.
            let mut inner = T::one();
            for p in w.windows(2) {
                inner = inner * model.p::<T>(p[0], p[1]);
            }
            let pre = word_phi(model, &w[..=zero]);
            let post = word_phi(model, &w[zero..]);
            for f in fibers {
                let f = f.clone().unwrap_or_default();
                let mut zs = f.clone();
                for (x, y) in zs.iter_mut().zip(&pre) {
                    *x -= y;
                }
                let mut acc = Acc::new();
                for (last, ze, m) in &v {
                    let mut d = zs.clone();
                    for (x, y) in d.iter_mut().zip(ze) {
                        *x -= y;
                    }
                    let q = bridges.get(gap, *last, w[0], &d);
                    if !q.is_zero() {
                        acc.add(&(m.clone() * q));
                    }
                }
                let mass = acc.value() * inner.clone();
                if !mass.is_zero() {
                    let mut ze = f;
                    add_vec(&mut ze, &post);
                    out.push((*w.last().unwrap(), ze, mass));
                }
            }
        }
        v = out;
        prev_end = next.end();
    }
    let mut acc = Acc::new();
    for (_, _, m) in &v {
        acc.add(m);
    }
    Ok(acc.value())
}
