use crate::error::{Error, Result};
use crate::scalar::{Acc, Scalar};

use super::model::{Edge, MarkovModel};

/// Joint law of (state, lattice point) on a dense box. The box grows by the
/// Minkowski sum of the step support each step, so it is fixed a priori by
/// the number of steps and never resized on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeDistribution<T> {
    n_states: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    mass: Vec<T>,
}

impl<T: Scalar> LatticeDistribution<T> {
    pub fn zeros(n_states: usize, lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        let cells: usize = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as usize).product();
        LatticeDistribution { n_states, lo, hi, mass: vec![T::zero(); cells * n_states] }
    }

    /// Unit mass at (s, z).
    pub fn point(n_states: usize, s: usize, z: &[i64]) -> Self {
        let mut d = Self::zeros(n_states, z.to_vec(), z.to_vec());
        d.mass[s] = T::one();
        d
    }

    /// mu at lattice point 0.
    pub fn stationary(model: &MarkovModel) -> Self {
        let zero = vec![0; model.kappa];
        let mut d = Self::zeros(model.n_states(), zero.clone(), zero);
        for s in 0..model.n_states() {
            d.mass[s] = model.mu(s);
        }
        d
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn bounds(&self) -> (&[i64], &[i64]) {
        (&self.lo, &self.hi)
    }

    fn cells(&self) -> usize {
        self.mass.len() / self.n_states
    }

    fn flat(&self, z: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for d in 0..self.dims() {
            if z[d] < self.lo[d] || z[d] > self.hi[d] {
                return None;
            }
            idx = idx * (self.hi[d] - self.lo[d] + 1) as usize + (z[d] - self.lo[d]) as usize;
        }
        Some(idx)
    }

    fn unflat(&self, mut idx: usize) -> Vec<i64> {
        let mut z = vec![0; self.dims()];
        for d in (0..self.dims()).rev() {
            let w = (self.hi[d] - self.lo[d] + 1) as usize;
            z[d] = self.lo[d] + (idx % w) as i64;
            idx /= w;
        }
        z
    }

    pub fn get(&self, s: usize, z: &[i64]) -> T {
        match self.flat(z) {
            Some(i) => self.mass[s * self.cells() + i].clone(),
            None => T::zero(),
        }
    }

    pub fn set(&mut self, s: usize, z: &[i64], v: T) -> Result<()> {
        let i = self.flat(z).ok_or_else(|| Error::Internal(format!("{z:?} outside lattice box")))?;
        let c = self.cells();
        self.mass[s * c + i] = v;
        Ok(())
    }

    /// Mass at z summed over states.
    pub fn at(&self, z: &[i64]) -> T {
        let mut acc = Acc::new();
        for s in 0..self.n_states {
            acc.add(&self.get(s, z));
        }
        acc.value()
    }

    /// Removes and returns the mass at z (all states).
    pub fn take(&mut self, z: &[i64]) -> T {
        let Some(i) = self.flat(z) else { return T::zero() };
        let c = self.cells();
        let mut acc = Acc::new();
        for s in 0..self.n_states {
            let v = std::mem::replace(&mut self.mass[s * c + i], T::zero());
            acc.add(&v);
        }
        acc.value()
    }

    pub fn total(&self) -> T {
        let mut acc = Acc::new();
        for v in &self.mass {
            acc.add(v);
        }
        acc.value()
    }

    /// Nonzero atoms in (state, lexicographic z) order.
    pub fn atoms(&self) -> Vec<(usize, Vec<i64>, T)> {
        let c = self.cells();
        let mut out = Vec::new();
        for s in 0..self.n_states {
            for i in 0..c {
                let v = &self.mass[s * c + i];
                if !v.is_zero() {
                    out.push((s, self.unflat(i), v.clone()));
                }
            }
        }
        out
    }

    /// Zeroes every cell whose coordinate d lies outside [lo, hi].
    pub fn clip(&mut self, d: usize, lo: i64, hi: i64) {
        let c = self.cells();
        for i in 0..c {
            let z = self.unflat(i)[d];
            if z < lo || z > hi {
                for s in 0..self.n_states {
                    self.mass[s * c + i] = T::zero();
                }
            }
        }
    }

    /// One step along the given edges; edge increments must have the
    /// lattice dimension.
    pub fn step(&self, edges: &[Vec<Edge<T>>]) -> Result<Self> {
        let dims = self.dims();
        let mut dlo = vec![i64::MAX; dims];
        let mut dhi = vec![i64::MIN; dims];
        for e in edges.iter().flatten() {
            if e.phi.len() != dims {
                return Err(Error::Internal("edge increment has wrong dimension".into()));
            }
            for d in 0..dims {
                dlo[d] = dlo[d].min(e.phi[d]);
                dhi[d] = dhi[d].max(e.phi[d]);
            }
        }
        if edges.iter().all(|e| e.is_empty()) {
            dlo = vec![0; dims];
            dhi = vec![0; dims];
        }
        let lo: Vec<i64> = self.lo.iter().zip(&dlo).map(|(a, b)| a + b).collect();
        let hi: Vec<i64> = self.hi.iter().zip(&dhi).map(|(a, b)| a + b).collect();
        let mut next = Self::zeros(self.n_states, lo, hi);
        let new_w: Vec<i64> = (0..dims).map(|d| next.hi[d] - next.lo[d] + 1).collect();
        let mut stride = vec![1i64; dims];
        for d in (0..dims.saturating_sub(1)).rev() {
            stride[d] = stride[d + 1] * new_w[d + 1];
        }
        let offsets: Vec<Vec<i64>> = edges
            .iter()
            .map(|es| es.iter().map(|e| (0..dims).map(|d| e.phi[d] * stride[d]).sum()).collect())
            .collect();
        let old_cells = self.cells();
        let new_cells = next.cells() as i64;
        // Odometer over the old box, in flat order.
        let mut z = self.lo.clone();
        for i in 0..old_cells {
            if i > 0 {
                for d in (0..dims).rev() {
                    if z[d] < self.hi[d] {
                        z[d] += 1;
                        break;
                    }
                    z[d] = self.lo[d];
                }
            }
            let base: i64 = (0..dims).map(|d| (z[d] - next.lo[d]) * stride[d]).sum();
            for s in 0..self.n_states {
                let v = &self.mass[s * old_cells + i];
                if v.is_zero() {
                    continue;
                }
                for (e, off) in edges[s].iter().zip(&offsets[s]) {
                    let j = base + off;
                    debug_assert!(j >= 0 && j < new_cells);
                    let slot = &mut next.mass[e.to * new_cells as usize + j as usize];
                    *slot = slot.clone() + v.clone() * e.p.clone();
                }
            }
        }
        Ok(next)
    }
}

impl LatticeDistribution<f64> {
    /// Crops the box to the cells whose mass (over all states) exceeds
    /// `floor`; returns the cropped law and the mass dropped.
    pub fn pruned(&self, floor: f64) -> (Self, f64) {
        let dims = self.dims();
        let c = self.cells();
        let mut lo = self.hi.clone();
        let mut hi = self.lo.clone();
        let mut any = false;
        for i in 0..c {
            let m: f64 = (0..self.n_states).map(|s| self.mass[s * c + i]).sum();
            if m > floor {
                any = true;
                let z = self.unflat(i);
                for d in 0..dims {
                    lo[d] = lo[d].min(z[d]);
                    hi[d] = hi[d].max(z[d]);
                }
            }
        }
        if !any {
            return (self.clone(), 0.0);
        }
        let mut out = Self::zeros(self.n_states, lo, hi);
        let oc = out.cells();
        let mut kept = 0.0;
        for i in 0..oc {
            let z = out.unflat(i);
            let j = self.flat(&z).expect("cropped box lies inside");
            for s in 0..self.n_states {
                let v = self.mass[s * c + j];
                out.mass[s * oc + i] = v;
                kept += v;
            }
        }
        (out, (self.total() - kept).max(0.0))
    }
}

/// Pushes the joint law of (state, phi partial sum) forward n steps.
pub fn step_distribution<T: Scalar>(
    model: &MarkovModel,
    start: &LatticeDistribution<T>,
    n: usize,
) -> Result<LatticeDistribution<T>> {
    if start.dims() != model.kappa || start.n_states() != model.n_states() {
        return Err(Error::Domain("start distribution does not match the model".into()));
    }
    let edges = model.edges::<T>();
    let r = model.phi_radius();
    let mut cur = start.clone();
    for _ in 0..n {
        cur = cur.step(&edges)?;
    }
    let (lo, hi) = cur.bounds();
    let (slo, shi) = start.bounds();
    for d in 0..model.kappa {
        if lo[d] < slo[d] - r * n as i64 || hi[d] > shi[d] + r * n as i64 {
            return Err(Error::Internal("lattice window exceeded the a priori bound".into()));
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::scalar::ratio;
    use num::BigRational;

    #[test]
    fn lazy_walk_steps() {
        let m = builtin::lazy_walk();
        let start = LatticeDistribution::<BigRational>::stationary(&m);
        assert_eq!(step_distribution(&m, &start, 0).unwrap(), start);
        let one = step_distribution(&m, &start, 1).unwrap();
        assert_eq!(one.at(&[-1]), ratio(1, 4));
        assert_eq!(one.at(&[0]), ratio(1, 2));
        assert_eq!(one.at(&[1]), ratio(1, 4));
        let two = step_distribution(&m, &start, 2).unwrap();
        assert_eq!(two.at(&[0]), ratio(3, 8));
        assert_eq!(two.total(), ratio(1, 1));
    }

    #[test]
    fn float_mass_conserved() {
        let m = builtin::z2_walk();
        let mut d = LatticeDistribution::<f64>::stationary(&m);
        let edges = m.edges::<f64>();
        for _ in 0..30 {
            d = d.step(&edges).unwrap();
            assert!((d.total() - 1.0).abs() < 1e-12);
        }
    }
}
