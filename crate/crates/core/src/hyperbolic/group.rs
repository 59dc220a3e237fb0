//! Finitely generated Fuchsian groups: builtin Schottky and genus-2
//! octagon groups, BFS enumeration by word length with rounded-key dedup.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

use super::geometry::{hyp_dist, DiskPoint, MobiusMap};

/// Rounding grid of the dedup keys.
pub const KEY_UNIT: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub map: MobiusMap,
    pub word: Vec<usize>,
    pub length: usize,
    /// Letterwise image under the homomorphism to Z^r (r = rank of the
    /// group's theta table).
    pub theta_image: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuchsianGroup {
    pub name: String,
    pub generators: Vec<MobiusMap>,
    /// inverse[i] is the index of the inverse of generator i.
    pub inverse: Vec<usize>,
    pub relator: Option<Vec<usize>>,
    /// Image of each generator in Z^r.
    pub theta: Vec<Vec<i64>>,
}

pub type Key = [i64; 4];

/// Rounded entries with the sign fixed so that M and -M share a key.
pub fn canonical_key(m: &MobiusMap) -> Key {
    let raw = [m.a.re, m.a.im, m.b.re, m.b.im];
    let sign = raw.iter().find(|v| v.abs() > 0.5 * KEY_UNIT).map_or(1.0, |v| v.signum());
    raw.map(|v| (sign * v / KEY_UNIT).round() as i64)
}

impl FuchsianGroup {
    pub fn new(
        name: impl Into<String>,
        generators: Vec<MobiusMap>,
        inverse: Vec<usize>,
        relator: Option<Vec<usize>>,
        theta: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let n = generators.len();
        if n == 0 || inverse.len() != n || theta.len() != n {
            return domain("generator, inverse and theta tables must have equal nonzero length");
        }
        for i in 0..n {
            let j = inverse[i];
            if j >= n || inverse[j] != i {
                return domain(format!("inverse pairing is not an involution at {i}"));
            }
            if generators[i].compose(&generators[j]).distance_pm(&MobiusMap::identity()) > 1e-9 {
                return domain(format!("generator {j} is not the inverse of generator {i}"));
            }
            if theta[i].iter().zip(&theta[j]).any(|(a, b)| a + b != 0) || theta[i].len() != theta[0].len() {
                return domain("theta must send inverses to negatives");
            }
        }
        let g = FuchsianGroup { name: name.into(), generators, inverse, relator, theta };
        if let Some(r) = &g.relator {
            if r.iter().any(|&i| i >= n) {
                return domain("relator uses an unknown generator");
            }
            let d = g.relator_defect().unwrap();
            if d > 1e-9 {
                return Err(Error::Structural(format!("relator is {d:e} away from +-identity")));
            }
        }
        Ok(g)
    }

    /// Free group on A, B: A translates by tau along the real axis with
    /// cosh(tau/2) = 2, B is A conjugated by a quarter turn. The four
    /// isometric circles are disjoint, so the group is Schottky.
    pub fn schottky_default() -> Self {
        Self::schottky(2.0 * 2f64.acosh()).expect("default Schottky group is valid")
    }

    /// Same construction for any tau above 2 acosh(sqrt 2).
    pub fn schottky(tau: f64) -> Result<Self> {
        if !(tau > 2.0 * 2f64.sqrt().acosh()) {
            return domain(format!("tau = {tau} makes the isometric circles overlap"));
        }
        let a = MobiusMap::translation(tau);
        let r = MobiusMap::rotation(PI / 2.0);
        let b = r.compose(&a).compose(&r.inverse());
        Self::new(
            "schottky",
            vec![a, a.inverse(), b, b.inverse()],
            vec![1, 0, 3, 2],
            None,
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        )
    }

    /// Genus-2 surface group of the regular octagon with angle pi/4. Side
    /// pairings g_k = R^k T R^{-k}, k = 0..3, with R the eighth turn and T
    /// the translation by twice the inradius (cosh = 1 + sqrt 2). Generator
    /// 2k is g_k, 2k + 1 its inverse.
    pub fn octagon() -> Result<Self> {
        let inradius = (1.0 + 2f64.sqrt()).acosh();
        let t = MobiusMap::translation(2.0 * inradius);
        let mut gens = Vec::new();
        let mut theta = Vec::new();
        for k in 0..4 {
            let r = MobiusMap::rotation(k as f64 * PI / 4.0);
            let g = r.compose(&t).compose(&r.inverse());
            gens.push(g);
            gens.push(g.inverse());
            let mut e = vec![0; 4];
            e[k] = 1;
            theta.push(e.clone());
            theta.push(e.iter().map(|v| -v).collect());
        }
        // g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3
        let relator = vec![0, 3, 4, 7, 1, 2, 5, 6];
        Self::new("octagon", gens, vec![1, 0, 3, 2, 5, 4, 7, 6], Some(relator), theta)
    }

    pub fn rank(&self) -> usize {
        self.theta[0].len()
    }

    pub fn word_map(&self, word: &[usize]) -> MobiusMap {
        let mut m = MobiusMap::identity();
        for (i, &g) in word.iter().enumerate() {
            m = m.compose(&self.generators[g]);
            if i % 16 == 15 {
                m = m.renormalized();
            }
        }
        m.renormalized()
    }

    pub fn word_theta(&self, word: &[usize]) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        for &g in word {
            for (x, y) in v.iter_mut().zip(&self.theta[g]) {
                *x += y;
            }
        }
        v
    }

    /// Distance of the relator's matrix from +-identity.
    pub fn relator_defect(&self) -> Option<f64> {
        self.relator.as_ref().map(|r| self.word_map(r).distance_pm(&MobiusMap::identity()))
    }

    /// Stable content hash for cache keys.
    pub fn fingerprint(&self) -> String {
        let mut s = format!("{}|{:?}|{:?}|{:?}", self.name, self.inverse, self.relator, self.theta);
        for g in &self.generators {
            s.push_str(&format!("|{:?}", canonical_key(g)));
        }
        let mut h: u64 = 0xcbf29ce484222325;
        for b in s.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }

    /// Dirichlet-domain check on sample points: no nontrivial element in
    /// `elements` maps a point of the domain {z : rho(0, z) < rho(g 0, z) for
    /// all generators g} back into it. Returns the number of violations.
    pub fn fundamental_domain_violations(&self, elements: &[GroupElement], samples: &[DiskPoint]) -> usize {
        let o = DiskPoint::origin();
        let inside = |z: DiskPoint| self.generators.iter().all(|g| hyp_dist(o, z) < hyp_dist(g.apply(o), z) - 1e-9);
        let pts: Vec<DiskPoint> = samples.iter().copied().filter(|&z| inside(z)).collect();
        elements
            .iter()
            .filter(|e| e.length > 0)
            .map(|e| pts.iter().filter(|&&z| inside(e.map.apply(z))).count())
            .sum()
    }
}

/// Enumeration result; `elements` are in BFS order (length, then discovery).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub max_len: usize,
    pub elements: Vec<GroupElement>,
    /// Smallest entry gap between distinct stored keys, in key units.
    pub min_key_gap: i64,
}

impl Enumeration {
    pub fn count_by_length(&self) -> Vec<usize> {
        let mut c = vec![0; self.max_len + 1];
        for e in &self.elements {
            c[e.length] += 1;
        }
        c
    }
}

/// Keys within this many units in every entry are treated as a collision.
pub const AUDIT_RADIUS: i64 = 10;

fn near_key(store: &BTreeMap<Key, usize>, k: &Key) -> Option<Key> {
    let lo = [k[0] - AUDIT_RADIUS, i64::MIN, i64::MIN, i64::MIN];
    let hi = [k[0] + AUDIT_RADIUS, i64::MAX, i64::MAX, i64::MAX];
    store
        .range(lo..=hi)
        .map(|(q, _)| *q)
        .find(|q| q != k && q.iter().zip(k).all(|(a, b)| (a - b).abs() <= AUDIT_RADIUS))
}

/// All elements of word length <= max_len. Candidates of each level are
/// computed in parallel and merged in (frontier, generator) order, so the
/// result is independent of the thread count.
pub fn enumerate_group(group: &FuchsianGroup, max_len: usize) -> Result<Enumeration> {
    if max_len > 12 {
        return Err(Error::Resource(format!("max_len {max_len} exceeds the guard of 12")));
    }
    let id = GroupElement {
        map: MobiusMap::identity(),
        word: vec![],
        length: 0,
        theta_image: vec![0; group.rank()],
    };
    let mut store: BTreeMap<Key, usize> = BTreeMap::new();
    store.insert(canonical_key(&id.map), 0);
    let mut elements = vec![id];
    let mut frontier = vec![0usize];
    let mut min_gap = i64::MAX;
    for len in 1..=max_len {
        let cands: Vec<Vec<(Key, GroupElement)>> = frontier
            .par_iter()
            .map(|&i| {
                let e = &elements[i];
                (0..group.generators.len())
                    .filter(|&g| e.word.last().map_or(true, |&l| group.inverse[l] != g))
                    .map(|g| {
                        let map = e.map.compose(&group.generators[g]).renormalized();
                        let mut word = e.word.clone();
                        word.push(g);
                        let mut theta = e.theta_image.clone();
                        for (x, y) in theta.iter_mut().zip(&group.theta[g]) {
                            *x += y;
                        }
                        (canonical_key(&map), GroupElement { map, word, length: len, theta_image: theta })
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (key, e) in cands.into_iter().flatten() {
            if let Some(&j) = store.get(&key) {
                if elements[j].map.distance_pm(&e.map) > 50.0 * KEY_UNIT {
                    return Err(Error::Structural(format!("key collision between words {:?} and {:?}", elements[j].word, e.word)));
                }
                continue;
            }
            if let Some(q) = near_key(&store, &key) {
                return Err(Error::Structural(format!(
                    "ambiguous dedup: key {key:?} lies within {AUDIT_RADIUS} units of {q:?}; use finer rounding"
                )));
            }
            store.insert(key, elements.len());
            next.push(elements.len());
            elements.push(e);
        }
        frontier = next;
    }
    // Audit: smallest coordinate-max gap between neighbours in key order.
    let keys: Vec<&Key> = store.keys().collect();
    for w in keys.windows(2) {
        let g = w[0].iter().zip(w[1]).map(|(a, b)| (a - b).abs()).max().unwrap();
        min_gap = min_gap.min(g);
    }
    Ok(Enumeration { max_len, elements, min_key_gap: min_gap })
}

/// Group element of a word with its data filled in.
pub fn element(group: &FuchsianGroup, word: &[usize]) -> GroupElement {
    GroupElement {
        map: group.word_map(word),
        word: word.to_vec(),
        length: word.len(),
        theta_image: group.word_theta(word),
    }
}

pub fn origin_image(e: &GroupElement) -> Complex64 {
    e.map.apply_c(Complex64::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_counts() {
        let g = FuchsianGroup::schottky_default();
        let e = enumerate_group(&g, 3).unwrap();
        assert_eq!(e.count_by_length(), vec![1, 4, 12, 36]);
    }

    #[test]
    fn octagon_relator() {
        let g = FuchsianGroup::octagon().unwrap();
        assert!(g.relator_defect().unwrap() < 1e-9);
    }

    #[test]
    fn sign_normalized_keys() {
        let m = MobiusMap::translation(1.0).compose(&MobiusMap::rotation(0.3));
        let n = MobiusMap { a: -m.a, b: -m.b };
        assert_eq!(canonical_key(&m), canonical_key(&n));
    }
}
