//! Special semiflows over Markov models with locally constant rational roofs.
//!
//! The roof is stored as integers h(s) Q over a common denominator Q, so the
//! pair (phi_n, Q h_n) lives on an integer lattice and every sum is exact.
//! h_n = h(x_0) + ... + h(x_{n-1}).

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, range, Error, Result};
use crate::markov::lattice::LatticeDistribution;
use crate::markov::model::{word_measure, word_phi, Edge};
use crate::markov::{return_sequence, MarkovModel};
use crate::scalar::{format_rational, parse_rational, ratio, Acc, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct RoofFunction {
    values: Vec<BigRational>,
    q: i64,
    scaled: Vec<i64>,
}

impl RoofFunction {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return domain("roof needs at least one value");
        }
        if let Some(v) = values.iter().find(|v| !v.is_positive()) {
            return domain(format!("roof values must be positive, got {v}"));
        }
        let mut q = BigInt::one();
        for v in &values {
            q = q.lcm(v.denom());
        }
        let q = q.to_i64().ok_or_else(|| Error::Domain("roof denominator too large".into()))?;
        let scaled = values
            .iter()
            .map(|v| (v * BigRational::from_integer(q.into())).to_integer().to_i64())
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| Error::Domain("roof value too large".into()))?;
        Ok(RoofFunction { values, q, scaled })
    }

    pub fn constant(n_states: usize, v: BigRational) -> Result<Self> {
        Self::new(vec![v; n_states])
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Common denominator Q.
    pub fn denominator(&self) -> i64 {
        self.q
    }

    /// Q h(s).
    pub fn scaled(&self, s: usize) -> i64 {
        self.scaled[s]
    }

    pub fn min_value(&self) -> BigRational {
        self.values.iter().min().unwrap().clone()
    }

    pub fn max_value(&self) -> BigRational {
        self.values.iter().max().unwrap().clone()
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiflowModel {
    pub name: String,
    pub base: MarkovModel,
    pub roof: RoofFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiflowDef {
    pub name: String,
    /// Builtin model name.
    pub base: String,
    /// One exact rational per base state, in state order.
    pub roof: Vec<String>,
}

impl SemiflowModel {
    pub fn new(name: impl Into<String>, base: MarkovModel, roof: RoofFunction) -> Result<Self> {
        if roof.values.len() != base.n_states() {
            return domain(format!("roof has {} values for {} states", roof.values.len(), base.n_states()));
        }
        if base.kappa == 0 {
            return domain("semiflow base needs kappa >= 1");
        }
        Ok(SemiflowModel { name: name.into(), base, roof })
    }

    /// Two-state shift (phi = +1 repeat, -1 switch) with roof (1, 3/2).
    pub fn roof_shift() -> Self {
        let roof = RoofFunction::new(vec![ratio(1, 1), ratio(3, 2)]).unwrap();
        Self::new("roof-shift", crate::builtin::two_state_shift(), roof).unwrap()
    }

    /// Lazy walk with roof 1 on the moving steps and 3/2 on the lazy step.
    pub fn roof_walk() -> Self {
        let roof = RoofFunction::new(vec![ratio(1, 1), ratio(3, 2), ratio(1, 1)]).unwrap();
        Self::new("roof-walk", crate::builtin::lazy_walk(), roof).unwrap()
    }

    /// Lazy walk with an asymmetric roof whose cycle sums generate the full
    /// lattice (1/2)Z x Z.
    pub fn skew_roof_walk() -> Self {
        let roof = RoofFunction::new(vec![ratio(1, 1), ratio(1, 1), ratio(3, 2)]).unwrap();
        Self::new("skew-roof-walk", crate::builtin::lazy_walk(), roof).unwrap()
    }

    pub fn unit_roof(base: MarkovModel) -> Self {
        let roof = RoofFunction::constant(base.n_states(), BigRational::one()).unwrap();
        let name = format!("unit-roof-{}", base.name);
        Self::new(name, base, roof).unwrap()
    }

    /// varkappa = sum_s mu_s h(s).
    pub fn mean_roof(&self) -> BigRational {
        (0..self.base.n_states()).map(|s| self.base.mu_exact(s) * &self.roof.values[s]).sum()
    }

    pub fn kappa(&self) -> usize {
        self.base.kappa
    }

    pub fn to_def(&self, base_name: &str) -> SemiflowDef {
        SemiflowDef {
            name: self.name.clone(),
            base: base_name.to_string(),
            roof: self.roof.values.iter().map(format_rational).collect(),
        }
    }

    pub fn from_def(def: &SemiflowDef) -> Result<Self> {
        let base = crate::builtin::model(&def.base)?;
        let values = def.roof.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Self::new(def.name.clone(), base, RoofFunction::new(values)?)
    }

    /// Edges on Z^kappa x Z with the last coordinate Q h(s).
    fn joint_edges<T: Scalar>(&self) -> Vec<Vec<Edge<T>>> {
        let mut edges = self.base.edges::<T>();
        for (s, es) in edges.iter_mut().enumerate() {
            for e in es {
                e.phi.push(self.roof.scaled(s));
            }
        }
        edges
    }
}

/// Joint law of (state, phi_n, Q h_n) from the stationary start. The last
/// lattice coordinate is Q h_n.
pub fn joint_distribution<T: Scalar>(model: &SemiflowModel, n: usize) -> Result<LatticeDistribution<T>> {
    let dims = model.kappa() + 1;
    let cells: f64 = (2.0 * model.base.phi_radius() as f64 * n as f64 + 1.0).powi(model.kappa() as i32)
        * ((model.roof.scaled.iter().max().unwrap() - model.roof.scaled.iter().min().unwrap()) as f64 * n as f64
            + 1.0)
        * model.base.n_states() as f64;
    if cells > 5e7 {
        return Err(Error::Resource(format!("joint window for n = {n} has {cells:e} cells")));
    }
    let mut d = LatticeDistribution::<T>::zeros(model.base.n_states(), vec![0; dims], vec![0; dims]);
    for s in 0..model.base.n_states() {
        d.set(s, &vec![0; dims], model.base.mu(s))?;
    }
    let edges = model.joint_edges::<T>();
    for _ in 0..n {
        d = d.step(&edges)?;
    }
    Ok(d)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussianParams {
    pub kappa: usize,
    /// Covariance of X (kappa x kappa).
    pub covariance: Vec<Vec<f64>>,
    /// Covariance of Z = (X, Y), Y last.
    pub cross: Vec<Vec<f64>>,
    pub fx0: f64,
    /// var(Y) vanishes (constant roof); f_Z is then undefined.
    pub y_degenerate: bool,
}

impl GaussianParams {
    /// Centered Gaussian density of X at x.
    pub fn f_x(&self, x: &[f64]) -> f64 {
        gaussian_density(&self.covariance, x).unwrap_or(f64::NAN)
    }

    /// Density of Z at (x, y).
    pub fn f_z(&self, x: &[f64], y: f64) -> Result<f64> {
        if self.y_degenerate {
            return domain("Y is degenerate (constant roof)");
        }
        let mut v = x.to_vec();
        v.push(y);
        gaussian_density(&self.cross, &v)
    }
}

fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

fn gaussian_density(cov: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let l = cholesky(cov).ok_or_else(|| Error::Accuracy {
        msg: "covariance is not positive definite".into(),
        achieved: f64::NAN,
    })?;
    // Solve L y = x; the quadratic form is |y|^2.
    let n = x.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (x[i] - s) / l[i][i];
    }
    let q: f64 = y.iter().map(|v| v * v).sum();
    let det_sqrt: f64 = (0..n).map(|i| l[i][i]).product();
    Ok((-0.5 * q).exp() / ((2.0 * std::f64::consts::PI).powf(n as f64 / 2.0) * det_sqrt))
}

/// E[V V^T] for V = (phi_n, h_n - varkappa n) from the stationary start, by
/// an exact per-state recursion on mass, first and second moments.
pub fn second_moments(model: &SemiflowModel, n: usize) -> Vec<Vec<f64>> {
    let base = &model.base;
    let ns = base.n_states();
    let k = model.kappa() + 1;
    let kap = model.mean_roof().to_f64().unwrap();
    let steps: Vec<Vec<(usize, f64, Vec<f64>)>> = (0..ns)
        .map(|s| {
            base.edges::<f64>()[s]
                .iter()
                .map(|e| {
                    let mut w: Vec<f64> = e.phi.iter().map(|&v| v as f64).collect();
                    w.push(model.roof.values[s].to_f64().unwrap() - kap);
                    (e.to, e.p, w)
                })
                .collect()
        })
        .collect();
    let mut m0: Vec<f64> = (0..ns).map(|s| base.mu(s)).collect();
    let mut m1 = vec![vec![0.0; k]; ns];
    let mut m2 = vec![vec![vec![0.0; k]; k]; ns];
    for _ in 0..n {
        let mut n0 = vec![0.0; ns];
        let mut n1 = vec![vec![0.0; k]; ns];
        let mut n2 = vec![vec![vec![0.0; k]; k]; ns];
        for s in 0..ns {
            for (t, p, w) in &steps[s] {
                n0[*t] += p * m0[s];
                for i in 0..k {
                    n1[*t][i] += p * (m1[s][i] + m0[s] * w[i]);
                    for j in 0..k {
                        n2[*t][i][j] += p * (m2[s][i][j] + m1[s][i] * w[j] + w[i] * m1[s][j] + m0[s] * w[i] * w[j]);
                    }
                }
            }
        }
        m0 = n0;
        m1 = n1;
        m2 = n2;
    }
    let mut out = vec![vec![0.0; k]; k];
    for s in 0..ns {
        for i in 0..k {
            for j in 0..k {
                out[i][j] += m2[s][i][j];
            }
        }
    }
    out
}

/// Covariance of Z from C(n) = n Sigma + B + o(1): Sigma = (C(n) - C(n/2)) 2/n.
pub fn gaussian_parameters(model: &SemiflowModel, n_fit: usize) -> Result<GaussianParams> {
    if n_fit < 2 {
        return domain("n_fit must be at least 2");
    }
    let half = n_fit / 2;
    let c1 = second_moments(model, n_fit);
    let c0 = second_moments(model, half);
    let k = model.kappa();
    let scale = 1.0 / (n_fit - half) as f64;
    let mut cross = vec![vec![0.0; k + 1]; k + 1];
    for i in 0..=k {
        for j in 0..=k {
            let v = (c1[i][j] - c0[i][j]) * scale;
            cross[i][j] = if v.abs() < 1e-12 { 0.0 } else { v };
        }
    }
    for i in 0..=k {
        for j in 0..i {
            let m = 0.5 * (cross[i][j] + cross[j][i]);
            cross[i][j] = m;
            cross[j][i] = m;
        }
    }
    let covariance: Vec<Vec<f64>> = cross[..k].iter().map(|r| r[..k].to_vec()).collect();
    let l = cholesky(&covariance).ok_or_else(|| Error::Accuracy {
        msg: "fitted covariance of X is not positive definite".into(),
        achieved: covariance[0][0],
    })?;
    let det_sqrt: f64 = (0..k).map(|i| l[i][i]).product();
    let fx0 = 1.0 / ((2.0 * std::f64::consts::PI).powf(k as f64 / 2.0) * det_sqrt);
    let y_degenerate = cross[k][k].abs() < 1e-9;
    Ok(GaussianParams { kappa: k, covariance, cross, fx0, y_degenerate })
}

/// Initial law of (last symbol, phi, Q h) after reading `word` from time 0:
/// the word's measure, its internal phi and the roof of all but its last
/// symbol.
fn word_start(model: &SemiflowModel, word: &[usize]) -> Result<(usize, Vec<i64>, i64, BigRational)> {
    if word.is_empty() {
        return domain("cylinder word must be nonempty");
    }
    if let Some(s) = word.iter().find(|&&s| s >= model.base.n_states()) {
        return domain(format!("symbol {s} outside state space"));
    }
    let m: BigRational = word_measure(&model.base, word)?;
    let q: i64 = word[..word.len() - 1].iter().map(|&s| model.roof.scaled(s)).sum();
    Ok((*word.last().unwrap(), word_phi(&model.base, word), q, m))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LltCheck {
    pub n: usize,
    pub measured: f64,
    pub predicted: f64,
    pub rel_error: f64,
    /// |t_n| / sqrt(n) above 5: the local limit says nothing useful here.
    pub out_of_regime: bool,
}

/// n^{kappa/2} mu(A and [phi_n = t_n]) / mu(A) against f_X(t_n / sqrt n).
pub fn llt_lattice_check(model: &MarkovModel, word: &[usize], t_n: &[i64], n: usize) -> Result<LltCheck> {
    if t_n.len() != model.kappa {
        return domain("t_n has the wrong dimension");
    }
    let sf = SemiflowModel::unit_roof(model.clone());
    let (last, z, _, m) = word_start(&sf, word)?;
    if m.is_zero() {
        return domain("mu(A) = 0");
    }
    let steps = n
        .checked_sub(word.len() - 1)
        .ok_or_else(|| Error::Domain("n shorter than the cylinder".into()))?;
    let mut d = LatticeDistribution::<f64>::point(model.n_states(), last, &z);
    let edges = model.edges::<f64>();
    for _ in 0..steps {
        d = d.step(&edges)?;
    }
    let nf = n as f64;
    let measured = nf.powf(model.kappa as f64 / 2.0) * d.at(t_n);
    let params = gaussian_parameters(&sf, 2000)?;
    let x: Vec<f64> = t_n.iter().map(|&v| v as f64 / nf.sqrt()).collect();
    let predicted = params.f_x(&x);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(LltCheck { n, measured, predicted, rel_error: (measured - predicted).abs() / predicted, out_of_regime: norm > 5.0 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FlowReturn {
    Value(f64),
    Dissipative,
}

/// varkappa^{kappa/2 - 1} a_n(T_phi) with a_n = sum_{k=0}^n u_k.
pub fn flow_return_sequence(model: &SemiflowModel, n: usize) -> Result<FlowReturn> {
    let k = model.kappa();
    if k >= 3 {
        return Ok(FlowReturn::Dissipative);
    }
    let u = return_sequence::<f64>(&model.base, n)?;
    let mut acc = Acc::<f64>::new();
    acc.add(&1.0);
    for v in &u {
        acc.add(v);
    }
    let kap = model.mean_roof().to_f64().unwrap();
    Ok(FlowReturn::Value(kap.powf(k as f64 / 2.0 - 1.0) * acc.value()))
}

/// Half-open interval [lo, hi) of the flow fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl FiberInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo.is_negative() || hi <= lo {
            return domain(format!("need 0 <= lo < hi, got [{lo}, {hi})"));
        }
        Ok(FiberInterval { lo, hi })
    }

    pub fn len(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// Terms w_n = mu(A and [phi_n = 0, h_n in I + t - y]) for n = 0..=n_max,
/// by a dense DP on (state, phi, Q h) truncated to what can still reach the
/// target set.
pub fn flow_terms(
    model: &SemiflowModel,
    word: &[usize],
    interval: &FiberInterval,
    t: &BigRational,
    y: &BigRational,
    n_max: usize,
) -> Result<Vec<f64>> {
    let qr = BigRational::from_integer(model.roof.q.into());
    let shift = t - y;
    // Q h_n in [q_lo, q_hi] is h_n in [lo + t - y, hi + t - y).
    let q_lo = ((&interval.lo + &shift) * &qr).ceil().to_integer().to_i64().unwrap();
    let q_hi = ((&interval.hi + &shift) * &qr).ceil().to_integer().to_i64().unwrap() - 1;
    let (last, z0, q0, m) = word_start(model, word)?;
    let m = m.to_f64().unwrap();
    let kappa = model.kappa();
    let ns = model.base.n_states();
    let r = model.base.phi_radius();
    let first = word.len() - 1;
    let mut out = vec![0.0; n_max + 1];
    if q_hi < 0 || n_max < first {
        return Ok(out);
    }
    // Fixed box: |z_i| <= r (n_max - first) + |z0_i|, q in [0, q_hi].
    let zr = r * (n_max - first) as i64 + z0.iter().map(|v| v.abs()).max().unwrap_or(0);
    let zw = (2 * zr + 1) as usize;
    let qw = (q_hi + 1) as usize;
    let zcells = zw.pow(kappa as u32);
    let cells = ns as f64 * zcells as f64 * qw as f64;
    if cells > 2e8 {
        return Err(Error::Resource(format!("flow window needs {cells:e} cells")));
    }
    let zidx = |z: &[i64]| z.iter().fold(0usize, |acc, &v| acc * zw + (v + zr) as usize);
    let edges = model.base.edges::<f64>();
    // Flat offset of each edge in the (z, q) block.
    let zstride: Vec<i64> = (0..kappa).map(|i| (zw as i64).pow((kappa - 1 - i) as u32)).collect();
    let mut cur = vec![0.0f64; ns * zcells * qw];
    if q0 <= q_hi {
        cur[(last * zcells + zidx(&z0)) * qw + q0 as usize] = m;
    }
    let zero_cell = zidx(&vec![0; kappa]);
    let read = |cur: &[f64]| -> f64 {
        let lo = q_lo.max(0) as usize;
        let mut acc = Acc::<f64>::new();
        for s in 0..ns {
            let base = (s * zcells + zero_cell) * qw;
            for q in lo..qw {
                acc.add(&cur[base + q]);
            }
        }
        acc.value()
    };
    out[first] = read(&cur);
    let unflat = |mut i: usize| -> Vec<i64> {
        let mut z = vec![0; kappa];
        for d in (0..kappa).rev() {
            z[d] = (i % zw) as i64 - zr;
            i /= zw;
        }
        z
    };
    let zs: Vec<Vec<i64>> = (0..zcells).map(unflat).collect();
    for n in first + 1..=n_max {
        let remaining = (n_max - n) as i64;
        let mut next = vec![0.0f64; ns * zcells * qw];
        // Target-major so each output cell is written by one task, in a
        // fixed order.
        next.par_chunks_mut(zcells * qw).enumerate().for_each(|(t, block)| {
            for s in 0..ns {
                for e in edges[s].iter().filter(|e| e.to == t) {
                    let dq = model.roof.scaled(s) as usize;
                    let dz: i64 = e.phi.iter().zip(&zstride).map(|(a, b)| a * b).sum();
                    for (zi, z) in zs.iter().enumerate() {
                        // Destination must stay reachable from 0 in the remaining steps.
                        let ok = z.iter().zip(&e.phi).all(|(a, b)| (a + b).abs() <= r * remaining && (a + b).abs() <= zr);
                        if !ok {
                            continue;
                        }
                        let src = (s * zcells + zi) * qw;
                        let dst = (zi as i64 + dz) as usize * qw;
                        for q in 0..qw.saturating_sub(dq) {
                            let v = cur[src + q];
                            if v != 0.0 {
                                block[dst + q + dq] += e.p * v;
                            }
                        }
                    }
                }
            }
        });
        cur = next;
        out[n] = read(&cur);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LllResult {
    pub t: f64,
    pub m: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    /// t^{kappa/2} times the window sum.
    pub sum: f64,
    pub predicted_limit: f64,
    /// max over the window of |spacing sqrt(n) / varkappa - 1| sqrt(n).
    pub spacing_defect: f64,
    pub spacing_ok: bool,
}

/// The n with |x_{n,t}| <= M, x_{n,t} = (t - varkappa n)/sqrt(n): to first
/// order n = t/varkappa +- M' sqrt t with M' = M / varkappa^{3/2}, and n >= 1.
pub fn lll_window(model: &SemiflowModel, t: f64, m: f64) -> Result<(usize, usize)> {
    let kap = model.mean_roof().to_f64().unwrap();
    let c = t / kap;
    let half = m / kap.powf(1.5) * t.sqrt();
    let lo = (c - half).ceil().max(1.0);
    let hi = (c + half).floor();
    if hi < lo {
        return range(format!("window around n = {c:.3} contains no integer"));
    }
    Ok((lo as usize, hi as usize))
}

fn spacing_defect(kap: f64, t: f64, n_lo: usize, n_hi: usize) -> f64 {
    let x = |n: f64| (t - kap * n) / n.sqrt();
    (n_lo..n_hi)
        .map(|n| {
            let nf = n as f64;
            ((x(nf) - x(nf + 1.0)) * nf.sqrt() / kap - 1.0).abs() * nf.sqrt()
        })
        .fold(0.0, f64::max)
}

pub fn lll_window_sum(
    model: &SemiflowModel,
    word: &[usize],
    interval: &FiberInterval,
    t: &BigRational,
    m: f64,
    y: &BigRational,
) -> Result<LllResult> {
    if interval.hi > model.roof.min_value() {
        return domain("I must lie in [0, min h]");
    }
    let tf = t.to_f64().unwrap();
    let (_, n_hi) = lll_window(model, tf, m)?;
    let terms = flow_terms(model, word, interval, t, y, n_hi)?;
    Ok(lll_from_terms(model, word, interval, tf, m, &terms))
}

/// Window sums for several M from one DP pass.
pub fn lll_sweep(
    model: &SemiflowModel,
    word: &[usize],
    interval: &FiberInterval,
    t: &BigRational,
    ms: &[f64],
    y: &BigRational,
) -> Result<Vec<LllResult>> {
    let tf = t.to_f64().unwrap();
    let mut hi = 0;
    for &m in ms {
        hi = hi.max(lll_window(model, tf, m)?.1);
    }
    let terms = flow_terms(model, word, interval, t, y, hi)?;
    Ok(ms.iter().map(|&m| lll_from_terms(model, word, interval, tf, m, &terms)).collect())
}

fn lll_from_terms(
    model: &SemiflowModel,
    word: &[usize],
    interval: &FiberInterval,
    t: f64,
    m: f64,
    terms: &[f64],
) -> LllResult {
    let (n_lo, n_hi) = lll_window(model, t, m).unwrap();
    let k = model.kappa() as f64;
    let mut acc = Acc::<f64>::new();
    for v in &terms[n_lo..=n_hi] {
        acc.add(v);
    }
    let sum = t.powf(k / 2.0) * acc.value();
    let kap = model.mean_roof().to_f64().unwrap();
    let fx0 = gaussian_parameters(&SemiflowModel::unit_roof(model.base.clone()), 2000).map(|g| g.fx0).unwrap_or(f64::NAN);
    let mu_a: f64 = word_measure(&model.base, word).unwrap_or(0.0);
    let predicted_limit = kap.powf(k / 2.0 - 1.0) * fx0 * mu_a * interval.len().to_f64().unwrap();
    let spacing_defect = spacing_defect(kap, t, n_lo, n_hi);
    LllResult { t, m, n_lo, n_hi, sum, predicted_limit, spacing_defect, spacing_ok: spacing_defect < 10.0 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BellTail {
    pub t: f64,
    pub m: f64,
    /// t^{kappa/2} times the sum over n outside the window.
    pub tail: f64,
    /// Every n with h_n in reach: n <= (t + hi - y) / min h. The sum is
    /// complete, so the truncation error is zero.
    pub n_max: usize,
    /// t^{kappa/2} times the sum over all n.
    pub total: f64,
}

/// Tail of the flow transfer sum outside the window |n - t/varkappa| < M sqrt t.
pub fn bell_tail_sum(
    model: &SemiflowModel,
    word: &[usize],
    interval: &FiberInterval,
    t: &BigRational,
    ms: &[f64],
    y: &BigRational,
) -> Result<Vec<BellTail>> {
    let reach = (t + &interval.hi - y) / model.roof.min_value();
    let n_max = reach.ceil().to_integer().to_usize().unwrap_or(0);
    let terms = flow_terms(model, word, interval, t, y, n_max)?;
    let tf = t.to_f64().unwrap();
    let kap = model.mean_roof().to_f64().unwrap();
    let scale = tf.powf(model.kappa() as f64 / 2.0);
    let c = tf / kap;
    let mut out = Vec::new();
    for &m in ms {
        let mut acc = Acc::<f64>::new();
        let mut all = Acc::<f64>::new();
        for (n, v) in terms.iter().enumerate().skip(1) {
            all.add(v);
            if (n as f64 - c).abs() >= m * tf.sqrt() {
                acc.add(v);
            }
        }
        out.push(BellTail { t: tf, m, tail: scale * acc.value(), n_max, total: scale * all.value() });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Aperiodicity {
    /// Cycle sums generate all of (1/Q)Z x Z^kappa after removing the
    /// per-step drift.
    Aperiodic,
    /// Cycle sums sit in a coset of a proper subgroup with the given rank
    /// and (for full rank) index; `basis` spans that subgroup in units of
    /// (1/Q, 1).
    Arithmetic { rank: usize, index: Option<u64>, basis: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AperiodicityReport {
    pub verdict: Aperiodicity,
    /// Full rank kappa + 1: Z = (X, Y) is non-singular.
    pub nonsingular: bool,
    pub cycle_bound: usize,
    pub cycles: usize,
}

/// Cycles (closed walks) up to length `max_len`, each as (length, Q h sum, phi sum).
fn cycle_sums(model: &SemiflowModel, max_len: usize) -> Vec<Vec<i64>> {
    let base = &model.base;
    let ns = base.n_states();
    let mut out = Vec::new();
    fn rec(model: &SemiflowModel, start: usize, path: &mut Vec<usize>, max_len: usize, out: &mut Vec<Vec<i64>>) {
        let base = &model.base;
        let cur = *path.last().unwrap();
        if base.p_exact(cur, start).is_positive() {
            let mut v = vec![path.len() as i64, 0];
            v.extend(vec![0; base.kappa]);
            for (i, &s) in path.iter().enumerate() {
                let t = if i + 1 < path.len() { path[i + 1] } else { start };
                v[1] += model.roof.scaled(s);
                for (k, x) in base.phi(s, t).iter().enumerate() {
                    v[2 + k] += x;
                }
            }
            out.push(v);
        }
        if path.len() < max_len {
            for t in 0..base.n_states() {
                // Canonical rotation: start is the minimal state.
                if t >= start && base.p_exact(cur, t).is_positive() {
                    path.push(t);
                    rec(model, start, path, max_len, out);
                    path.pop();
                }
            }
        }
    }
    for s in 0..ns {
        rec(model, s, &mut vec![s], max_len, &mut out);
    }
    out
}

/// Hermite-style row reduction over Z; returns the nonzero rows.
pub(crate) fn integer_row_basis(mut rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut basis = Vec::new();
    for c in 0..cols {
        loop {
            rows.retain(|r| r.iter().any(|&x| x != 0));
            let with: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][c] != 0).collect();
            if with.is_empty() {
                break;
            }
            let p = *with.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            let pivot = rows[p].clone();
            let mut done = true;
            for &i in &with {
                if i != p {
                    let f = rows[i][c].div_euclid(pivot[c]);
                    for k in 0..cols {
                        rows[i][k] -= f * pivot[k];
                    }
                    if rows[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                let mut r = rows.remove(p);
                if r[c] < 0 {
                    r.iter_mut().for_each(|x| *x = -*x);
                }
                basis.push(r);
                break;
            }
        }
    }
    basis
}

/// Livsic-style test on cycle sums. The lattice spanned by
/// (length, Q h_n, phi_n) over all cycles up to `max_len` meets {0} x G in
/// the subgroup generated by length-free combinations; aperiodic iff that
/// subgroup is all of G = Z^{1+kappa}.
pub fn aperiodicity_check(model: &SemiflowModel, max_len: Option<usize>) -> AperiodicityReport {
    let max_len = max_len.unwrap_or(2 * model.base.n_states()).max(1);
    let cycles = cycle_sums(model, max_len);
    let basis = integer_row_basis(cycles.clone());
    // After reduction only the first row has a nonzero length entry.
    let sub: Vec<Vec<i64>> =
        basis.iter().filter(|r| r[0] == 0).map(|r| r[1..].to_vec()).collect();
    let sub = integer_row_basis(sub);
    let dim = model.kappa() + 1;
    let rank = sub.len();
    let index = if rank == dim {
        Some(sub.iter().enumerate().map(|(i, r)| r[i].unsigned_abs()).product::<u64>())
    } else {
        None
    };
    let verdict = if index == Some(1) {
        Aperiodicity::Aperiodic
    } else {
        Aperiodicity::Arithmetic { rank, index, basis: sub }
    };
    AperiodicityReport { verdict, nonsingular: rank == dim, cycle_bound: max_len, cycles: cycles.len() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_roofs() {
        assert_eq!(SemiflowModel::roof_walk().mean_roof(), ratio(5, 4));
        assert_eq!(SemiflowModel::roof_shift().mean_roof(), ratio(5, 4));
        assert_eq!(SemiflowModel::unit_roof(crate::builtin::lazy_walk()).mean_roof(), ratio(1, 1));
    }

    #[test]
    fn lazy_walk_gaussian() {
        let g = gaussian_parameters(&SemiflowModel::unit_roof(crate::builtin::lazy_walk()), 1000).unwrap();
        assert!((g.covariance[0][0] - 0.5).abs() < 1e-9);
        assert!((g.fx0 - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-9);
        assert!(g.y_degenerate);
    }

    #[test]
    fn row_basis() {
        let b = integer_row_basis(vec![vec![2, 0], vec![0, 3], vec![2, 3]]);
        assert_eq!(b, vec![vec![2, 0], vec![0, 3]]);
        let b = integer_row_basis(vec![vec![4, 6], vec![6, 9]]);
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn aperiodicity_examples() {
        assert_eq!(aperiodicity_check(&SemiflowModel::skew_roof_walk(), None).verdict, Aperiodicity::Aperiodic);
        let unit = aperiodicity_check(&SemiflowModel::unit_roof(crate::builtin::lazy_walk()), None);
        assert!(!unit.nonsingular);
        let shift = aperiodicity_check(&SemiflowModel::roof_shift(), None);
        assert!(shift.nonsingular);
        assert!(matches!(shift.verdict, Aperiodicity::Arithmetic { index: Some(4), .. }));
    }
}
