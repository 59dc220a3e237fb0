use std::collections::BTreeMap;

use crate::error::{domain, Error, Result};
use crate::scalar::{Acc, Scalar};

use super::events::{Atoms, FiberedSet};
use super::lattice::LatticeDistribution;
use super::model::{word_measure, MarkovModel};

/// A function of (x_0 .. x_{len-1}, z) with finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<T> {
    pub len: usize,
    pub values: BTreeMap<(Vec<usize>, Vec<i64>), T>,
}

/// Support sizes beyond this are refused rather than silently truncated.
pub const SUPPORT_LIMIT: usize = 2_000_000;

impl<T: Scalar> StepFunction<T> {
    /// Indicator of a fibered set whose cylinders all start at position >= 0.
    pub fn indicator(model: &MarkovModel, set: &FiberedSet) -> Result<Self> {
        let atoms = Atoms::of(model, set)?;
        if atoms.a < 0 {
            return domain("transfer operator needs cylinders at positions >= 0");
        }
        let len = atoms.len();
        let mut values = BTreeMap::new();
        for (w, fibers) in atoms.words {
            for f in fibers {
                let Some(z) = f else {
                    return domain("indicator of a full-fiber set has infinite support");
                };
                values.insert((w.clone(), z), T::one());
            }
        }
        Ok(StepFunction { len, values })
    }

    /// Constant 1 on X for an unextended model.
    pub fn one(model: &MarkovModel) -> Result<Self> {
        if model.kappa != 0 {
            return domain("the constant function has infinite support on an extension");
        }
        let values = (0..model.n_states()).map(|s| ((vec![s], vec![]), T::one())).collect();
        Ok(StepFunction { len: 1, values })
    }

    pub fn eval(&self, word: &[usize], z: &[i64]) -> T {
        if word.len() < self.len {
            return T::zero();
        }
        self.values.get(&(word[..self.len].to_vec(), z.to_vec())).cloned().unwrap_or_else(T::zero)
    }

    /// Integral against m (counting measure on fibers).
    pub fn integral(&self, model: &MarkovModel) -> Result<T> {
        let mut acc = Acc::new();
        for ((w, _), v) in &self.values {
            let m: T = word_measure(model, w)?;
            acc.add(&(m * v.clone()));
        }
        Ok(acc.value())
    }

    /// Same function written over a longer window.
    pub fn extend(&self, model: &MarkovModel, len: usize) -> Self {
        let mut cur = self.clone();
        while cur.len < len {
            let mut values = BTreeMap::new();
            for ((w, z), v) in &cur.values {
                let last = *w.last().unwrap();
                for t in 0..model.n_states() {
                    if model.p::<f64>(last, t) > 0.0 {
                        let mut w2 = w.clone();
                        w2.push(t);
                        values.insert((w2, z.clone()), v.clone());
                    }
                }
            }
            cur = StepFunction { len: cur.len + 1, values };
        }
        cur
    }

    pub fn mul(&self, model: &MarkovModel, other: &Self) -> Self {
        let len = self.len.max(other.len);
        let (a, b) = (self.extend(model, len), other.extend(model, len));
        let values = a
            .values
            .into_iter()
            .filter_map(|(k, v)| b.values.get(&k).map(|w| (k, v * w.clone())))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        StepFunction { len, values }
    }
}

/// One application of the transfer operator (dual of composition with T).
fn transfer_once<T: Scalar>(model: &MarkovModel, f: &StepFunction<T>) -> Result<StepFunction<T>> {
    let mut values: BTreeMap<(Vec<usize>, Vec<i64>), T> = BTreeMap::new();
    let mut add = |key: (Vec<usize>, Vec<i64>), v: T| {
        let slot = values.entry(key).or_insert_with(T::zero);
        *slot = slot.clone() + v;
    };
    let weight = |s: usize, x0: usize| model.mu::<T>(s) * model.p::<T>(s, x0) / model.mu::<T>(x0);
    for ((w, z), v) in &f.values {
        let s = w[0];
        if f.len >= 2 {
            let rest = w[1..].to_vec();
            let mut z2 = z.clone();
            for (a, b) in z2.iter_mut().zip(model.phi(s, rest[0])) {
                *a += b;
            }
            add((rest.clone(), z2), v.clone() * weight(s, rest[0]));
        } else {
            for x0 in 0..model.n_states() {
                if model.p::<f64>(s, x0) > 0.0 {
                    let mut z2 = z.clone();
                    for (a, b) in z2.iter_mut().zip(model.phi(s, x0)) {
                        *a += b;
                    }
                    add((vec![x0], z2), v.clone() * weight(s, x0));
                }
            }
        }
    }
    values.retain(|_, v| !v.is_zero());
    if values.len() > SUPPORT_LIMIT {
        return Err(Error::Resource(format!(
            "transfer support grew past {SUPPORT_LIMIT} atoms; shorten n or the fiber window"
        )));
    }
    Ok(StepFunction { len: f.len.saturating_sub(1).max(1), values })
}

/// T^n f, computed exactly by the reverse-direction DP.
pub fn transfer_apply<T: Scalar>(model: &MarkovModel, f: &StepFunction<T>, n: usize) -> Result<StepFunction<T>> {
    let mut g = f.clone();
    for _ in 0..n {
        g = transfer_once(model, &g)?;
    }
    Ok(g)
}

/// T^{l_1}(1_{A_1} T^{l_2}(1_{A_2} ... T^{l_d}(1_{A_d}))).
pub fn transfer_nested<T: Scalar>(model: &MarkovModel, sets: &[FiberedSet], lags: &[usize]) -> Result<StepFunction<T>> {
    if sets.is_empty() || sets.len() != lags.len() {
        return domain("nested transfer needs one lag per set");
    }
    let d = sets.len();
    let mut g = transfer_apply(model, &StepFunction::indicator(model, &sets[d - 1])?, lags[d - 1])?;
    for j in (0..d - 1).rev() {
        let ind = StepFunction::<T>::indicator(model, &sets[j])?;
        g = transfer_apply(model, &ind.mul(model, &g), lags[j])?;
    }
    Ok(g)
}

/// Law of the first return time to the zero fiber, for n = 1..=n_max, by a
/// taboo DP: mass reaching fiber 0 is recorded and removed at each step.
pub fn induced_return_distribution<T: Scalar>(model: &MarkovModel, n_max: usize) -> Result<Vec<T>> {
    if model.kappa == 0 {
        return domain("first return to the zero fiber needs kappa >= 1");
    }
    let zero = vec![0; model.kappa];
    let edges = model.edges::<T>();
    let mut d = LatticeDistribution::<T>::stationary(model);
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        d = d.step(&edges)?;
        out.push(d.take(&zero));
    }
    Ok(out)
}
