use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{BandVerdict, SeqPrefix, Window};
use crate::error::{domain, Result};
use crate::scalar::{Acc, Scalar};

use super::events::{chain_measure, chain_ready, event_measure, needed_offsets, Anchor, Atoms, BridgeTable, FiberedSet};
use super::lattice::LatticeDistribution;
use super::model::MarkovModel;

/// u_1..u_{n_max} with u_n = m(Omega0 and T^{-n} Omega0) for the zero fiber
/// Omega0 = X x {0}; equivalently mu[phi_n = 0]. For kappa = 0 this is 1.
pub fn return_sequence<T: Scalar>(model: &MarkovModel, n_max: usize) -> Result<Vec<T>> {
    let zero = vec![0; model.kappa];
    let edges = model.edges::<T>();
    let mut d = LatticeDistribution::<T>::stationary(model);
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        d = d.step(&edges)?;
        out.push(d.at(&zero));
    }
    Ok(out)
}

/// Float u_1..u_{n_max} with the lattice box cropped every `every` steps to
/// cells of mass above `floor`. Returns the sequence and the total mass
/// dropped, which bounds the error of every u_n from above.
pub fn return_sequence_pruned(model: &MarkovModel, n_max: usize, floor: f64, every: usize) -> Result<(Vec<f64>, f64)> {
    if !(floor >= 0.0) || every == 0 {
        return domain("pruning needs floor >= 0 and a positive period");
    }
    let zero = vec![0; model.kappa];
    let edges = model.edges::<f64>();
    let mut d = LatticeDistribution::<f64>::stationary(model);
    let mut out = Vec::with_capacity(n_max);
    let mut dropped = 0.0;
    for n in 1..=n_max {
        d = d.step(&edges)?;
        if n % every == 0 {
            let (p, lost) = d.pruned(floor);
            d = p;
            dropped += lost;
        }
        out.push(d.at(&zero));
    }
    Ok((out, dropped))
}

/// u_n of the zero fiber; see [`return_sequence`].
pub fn return_probability<T: Scalar>(model: &MarkovModel, n: usize) -> Result<T> {
    if n == 0 {
        return domain("return probability needs n >= 1");
    }
    Ok(return_sequence(model, n)?.pop().unwrap())
}

/// p^(n)_{(s,0),(s,0)} / mu_s on the extended chain.
pub fn state_return_probability<T: Scalar>(model: &MarkovModel, s: usize, n: usize) -> Result<T> {
    if s >= model.n_states() {
        return domain(format!("state {s} out of range"));
    }
    let zero = vec![0; model.kappa];
    let start = LatticeDistribution::<T>::point(model.n_states(), s, &zero);
    let d = super::lattice::step_distribution(model, &start, n)?;
    Ok(d.get(s, &zero) / model.mu::<T>(s))
}

/// Evaluates m(intersection_j T^{-(j k + r_j)} B_j) for many k with one
/// bridge table.
pub struct Correlator<'a, T> {
    model: &'a MarkovModel,
    atoms: Vec<Atoms>,
    shifts: Vec<i64>,
    bridges: Option<BridgeTable<T>>,
}

impl<'a, T: Scalar> Correlator<'a, T> {
    /// Bridges cover gaps up to `max_span` between consecutive anchors;
    /// larger gaps fall back to the direct DP.
    pub fn new(model: &'a MarkovModel, sets: &[FiberedSet], shifts: &[i64], max_span: usize) -> Result<Self> {
        if sets.is_empty() {
            return domain("need at least one set");
        }
        if shifts.len() != sets.len() {
            return domain(format!("{} sets but {} shifts", sets.len(), shifts.len()));
        }
        let atoms = sets.iter().map(|s| Atoms::of(model, s)).collect::<Result<Vec<_>>>()?;
        // Offsets for every ordered pair of sets cover all orders the anchors can take.
        let mut offsets = BTreeSet::new();
        for i in 0..atoms.len() {
            for j in 0..atoms.len() {
                let pair = [
                    Anchor { time: 0, atoms: atoms[i].clone() },
                    Anchor { time: atoms[i].len() as i64 + 1 + atoms[j].len() as i64, atoms: atoms[j].clone() },
                ];
                if let Some(sorted) = chain_ready(model, &pair) {
                    offsets.extend(needed_offsets(model, &sorted));
                }
            }
        }
        let bridges = if offsets.is_empty() || sets.len() == 1 {
            None
        } else {
            Some(BridgeTable::build(model, max_span, &offsets)?)
        };
        Ok(Correlator { model, atoms, shifts: shifts.to_vec(), bridges })
    }

    pub fn anchors(&self, k: i64) -> Vec<Anchor> {
        self.atoms
            .iter()
            .enumerate()
            .map(|(j, a)| Anchor { time: j as i64 * k + self.shifts[j], atoms: a.clone() })
            .collect()
    }

    pub fn at(&self, k: i64) -> Result<T> {
        let anchors = self.anchors(k);
        if let (Some(b), Some(sorted)) = (&self.bridges, chain_ready(self.model, &anchors)) {
            let fits = sorted.windows(2).all(|w| ((w[1].start() - w[0].end()) as usize) <= b.max_gap());
            let covered = needed_offsets(self.model, &sorted).iter().all(|o| b.has_offset(o));
            if fits && covered {
                return chain_measure(self.model, &sorted, b);
            }
        }
        event_measure(self.model, &anchors)
    }
}

/// m(intersection_{j=0}^d T^{-(j k + r_j)} B_j), exactly in the chosen backend.
pub fn multi_correlation<T: Scalar>(
    model: &MarkovModel,
    sets: &[FiberedSet],
    k: i64,
    shifts: &[i64],
) -> Result<T> {
    let span = k.abs() + 2 * shifts.iter().map(|r| r.abs()).sum::<i64>() + 1;
    Correlator::new(model, sets, shifts, span as usize)?.at(k)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RwmDefect {
    pub n: usize,
    pub defect: f64,
    pub a_d: f64,
    pub product_measure: f64,
}

/// (1/a_d(n)) sum_{k<=n} |m(intersection T^{-(jk+r_j)} B_j) - prod m(B_j) u_k^d|
/// at every n in `ns` (one pass, shared prefix sums).
pub fn rwm_defect(model: &MarkovModel, sets: &[FiberedSet], shifts: &[i64], ns: &[usize]) -> Result<Vec<RwmDefect>> {
    if sets.len() < 2 {
        return domain("rwm defect needs d >= 1 (at least two sets)");
    }
    let d = (sets.len() - 1) as i32;
    let n_max = *ns.iter().max().unwrap_or(&0);
    let u = return_sequence::<f64>(model, n_max)?;
    let mut prod = 1.0;
    for s in sets {
        prod *= s.measure::<f64>(model)?;
    }
    let span = n_max + 2 * shifts.iter().map(|r| r.unsigned_abs() as usize).sum::<usize>() + 2;
    let corr = Correlator::<f64>::new(model, sets, shifts, span)?;
    let mut out = Vec::new();
    let mut defect = Acc::<f64>::new();
    let mut a = Acc::<f64>::new();
    for k in 1..=n_max {
        let c = corr.at(k as i64)?;
        let ud = u[k - 1].powi(d);
        defect.add(&(c - prod * ud).abs());
        a.add(&ud);
        if ns.contains(&k) {
            let a_d = a.value();
            if a_d <= 0.0 {
                return domain(format!("a_d({k}) = 0"));
            }
            out.push(RwmDefect { n: k, defect: defect.value() / a_d, a_d, product_measure: prod });
        }
    }
    Ok(out)
}

/// Smallest n <= n_max with m(A and T^{-n}A and ... and T^{-dn}A) > 0.
pub fn recurrence_witness(model: &MarkovModel, a: &FiberedSet, d: usize, n_max: usize) -> Result<Option<usize>> {
    if a.measure::<f64>(model)? <= 0.0 {
        return domain("witness search needs m(A) > 0");
    }
    let sets = vec![a.clone(); d + 1];
    let corr = Correlator::<f64>::new(model, &sets, &vec![0; d + 1], n_max + 2)?;
    for n in 1..=n_max {
        if corr.at(n as i64)? > 0.0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub band: Option<BandVerdict>,
    /// (n, ratio) for every measured n.
    pub ratios: Vec<(usize, f64)>,
    /// n where u(Omega, n) = 0 (parity obstruction); skipped.
    pub skipped: Vec<usize>,
}

/// Band of m(intersection_{k<=d} T^{-kn} Omega) / u(Omega, n)^d over the
/// window, with u(Omega, n) = m(Omega and T^{-n} Omega)/m(Omega).
pub fn admissibility_band(model: &MarkovModel, omega: &FiberedSet, d: usize, window: Window) -> Result<AdmissibilityReport> {
    let m: f64 = omega.measure(model)?;
    if !(m > 0.0 && m.is_finite()) {
        return domain("admissibility needs 0 < m(Omega) < infinity");
    }
    let span = window.end + 2;
    let pair = Correlator::<f64>::new(model, &[omega.clone(), omega.clone()], &[0, 0], span)?;
    let multi = Correlator::<f64>::new(model, &vec![omega.clone(); d + 1], &vec![0; d + 1], span)?;
    let mut ratios = Vec::new();
    let mut skipped = Vec::new();
    for n in window.indices() {
        let u = pair.at(n as i64)? / m;
        if u <= 0.0 {
            skipped.push(n);
            continue;
        }
        ratios.push((n, multi.at(n as i64)? / u.powi(d as i32)));
    }
    let vals: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    let band = if vals.is_empty() { None } else { Some(BandVerdict::of(&vals, window)?) };
    Ok(AdmissibilityReport { band, ratios, skipped })
}

/// u_n as a SeqPrefix with offset 1.
pub fn return_prefix(model: &MarkovModel, n_max: usize) -> Result<SeqPrefix> {
    SeqPrefix::nonneg(1, return_sequence::<f64>(model, n_max)?)
}
