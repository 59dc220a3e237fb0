//! Finite-prefix sequences and band/trend verdicts.
//!
//! Nothing here decides a limit. A verdict is always a band measured over a
//! declared index window, plus a fitted trend where one is asked for.

use serde::{Deserialize, Serialize};

use crate::error::{domain, range, Error, Result};
use crate::scalar::Acc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqPrefix {
    pub offset: usize,
    pub values: Vec<f64>,
    #[serde(default)]
    pub nonnegative: bool,
}

impl SeqPrefix {
    pub fn new(offset: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("non-finite entry at index {}", offset + i));
        }
        Ok(SeqPrefix { offset, values, nonnegative: false })
    }

    /// Builds a sequence flagged nonnegative; rejects negative entries.
    pub fn nonneg(offset: usize, values: Vec<f64>) -> Result<Self> {
        let mut s = Self::new(offset, values)?;
        if let Some(i) = s.values.iter().position(|v| *v < 0.0) {
            return domain(format!("negative entry {} at index {}", s.values[i], offset + i));
        }
        s.nonnegative = true;
        Ok(s)
    }

    pub fn from_fn(offset: usize, last: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new(offset, (offset..=last).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest index with a value, if any.
    pub fn last_index(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.offset + self.values.len() - 1)
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.offset).and_then(|i| self.values.get(i).copied())
    }

    fn at(&self, n: usize) -> Result<f64> {
        self.get(n).ok_or_else(|| {
            Error::Range(format!(
                "index {n} outside prefix [{}, {}]",
                self.offset,
                self.last_index().map_or("empty".into(), |l| l.to_string())
            ))
        })
    }

    pub fn scaled(&self, c: f64) -> SeqPrefix {
        SeqPrefix {
            offset: self.offset,
            values: self.values.iter().map(|v| v * c).collect(),
            nonnegative: self.nonnegative && c >= 0.0,
        }
    }
}

/// Inclusive index window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return range(format!("empty window [{start}, {end}]"));
        }
        Ok(Window { start, end })
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandVerdict {
    pub low: f64,
    pub high: f64,
    pub window: Window,
}

impl BandVerdict {
    pub fn within(&self, low: f64, high: f64) -> bool {
        self.low >= low && self.high <= high
    }

    /// high/low; the multiplicative width of the band.
    pub fn spread(&self) -> f64 {
        self.high / self.low
    }

    /// Band of a list of ratios measured at the given indices.
    pub fn of(ratios: &[f64], window: Window) -> Result<Self> {
        if ratios.is_empty() {
            return range("no ratios measured on window");
        }
        let low = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let high = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(low > 0.0) {
            return domain(format!("band lower end {low} is not positive"));
        }
        Ok(BandVerdict { low, high, window })
    }
}

/// a(n) = sum_{k=1}^n u_k^d, returned with offset 1.
pub fn partial_power_sum(u: &SeqPrefix, d: u32) -> Result<SeqPrefix> {
    if d == 0 {
        return domain("power d must be positive");
    }
    if u.offset > 1 {
        return domain(format!("offset {} > 1", u.offset));
    }
    if let Some(v) = u.values.iter().find(|v| **v < 0.0) {
        return domain(format!("negative entry {v} in power sum"));
    }
    let Some(last) = u.last_index() else {
        return Ok(SeqPrefix { offset: 1, values: vec![], nonnegative: true });
    };
    let mut acc = Acc::<f64>::new();
    let mut out = Vec::with_capacity(last);
    for n in 1..=last {
        acc.add(&u.at(n)?.powi(d as i32));
        out.push(acc.value());
    }
    Ok(SeqPrefix { offset: 1, values: out, nonnegative: true })
}

/// Min and max of x_n / y_n over the window.
pub fn ratio_band(x: &SeqPrefix, y: &SeqPrefix, window: Window) -> Result<BandVerdict> {
    let mut ratios = Vec::with_capacity(window.end - window.start + 1);
    for n in window.indices() {
        let (a, b) = (x.at(n)?, y.at(n)?);
        if !(b > 0.0) || !(a > 0.0) {
            return domain(format!("non-positive entry at n = {n} (x = {a}, y = {b})"));
        }
        ratios.push(a / b);
    }
    BandVerdict::of(&ratios, window)
}

/// Band of a(2n)/a(n) for n in the window.
pub fn doubling_check(a: &SeqPrefix, window: Window) -> Result<BandVerdict> {
    let need = 2 * window.end;
    if a.last_index().is_none_or(|l| l < need) || window.start < a.offset {
        return range(format!("doubling check needs a on [{}, {need}]", window.start));
    }
    let mut ratios = Vec::new();
    for n in window.indices() {
        let (lo, hi) = (a.at(n)?, a.at(2 * n)?);
        if !(lo > 0.0) {
            return domain(format!("a({n}) = {lo} is not positive"));
        }
        ratios.push(hi / lo);
    }
    BandVerdict::of(&ratios, window)
}

/// Ordinary least squares slope and intercept of ys against xs.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return range("least squares needs at least two paired points");
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = Acc::<f64>::new();
    let mut sxy = Acc::<f64>::new();
    for (x, y) in xs.iter().zip(ys) {
        sxx.add(&((x - mx) * (x - mx)));
        sxy.add(&((x - mx) * (y - my)));
    }
    let slope = sxy.value() / sxx.value();
    Ok((slope, my - slope * mx))
}

/// Least-squares slope of log a(n) against log n on the window.
pub fn rv_index(a: &SeqPrefix, window: Window) -> Result<f64> {
    if window.end - window.start + 1 < 3 || window.start == 0 {
        return range("rv_index needs at least 3 positive indices");
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in window.indices() {
        let v = a.at(n)?;
        if !(v > 0.0) {
            return domain(format!("a({n}) = {v} is not positive"));
        }
        xs.push((n as f64).ln());
        ys.push(v.ln());
    }
    Ok(least_squares(&xs, &ys)?.0)
}

/// Roughly `count` distinct integers spaced geometrically over [lo, hi].
pub fn log_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    assert!(lo >= 1 && lo <= hi && count >= 2);
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .map(|n| n.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

/// rv_index restricted to a sparse geometric grid inside the window, which
/// keeps the fit from being dominated by the dense upper end.
pub fn rv_index_log(a: &SeqPrefix, window: Window, points: usize) -> Result<f64> {
    let grid = log_grid(window.start.max(1), window.end, points);
    if grid.len() < 3 {
        return range("rv_index needs at least 3 grid points");
    }
    let xs: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
    let mut ys = Vec::new();
    for &n in &grid {
        let v = a.at(n)?;
        if !(v > 0.0) {
            return domain(format!("a({n}) = {v} is not positive"));
        }
        ys.push(v.ln());
    }
    Ok(least_squares(&xs, &ys)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_power_sum_is_linear() {
        let u = SeqPrefix::nonneg(1, vec![1.0; 10]).unwrap();
        let a = partial_power_sum(&u, 3).unwrap();
        assert_eq!(a.get(7), Some(7.0));
    }

    #[test]
    fn hand_sum() {
        let u = SeqPrefix::nonneg(1, vec![0.5, 0.375]).unwrap();
        let a = partial_power_sum(&u, 1).unwrap();
        assert_eq!(a.get(2), Some(0.875));
    }

    #[test]
    fn offset_zero_entry_excluded() {
        let u = SeqPrefix::nonneg(0, vec![1.0, 0.5, 0.375]).unwrap();
        let a = partial_power_sum(&u, 1).unwrap();
        assert_eq!(a.offset, 1);
        assert_eq!(a.get(2), Some(0.875));
    }

    #[test]
    fn power_sum_errors() {
        let u = SeqPrefix::new(1, vec![0.5, -0.1]).unwrap();
        assert!(matches!(partial_power_sum(&u, 1), Err(Error::Domain(_))));
        let u = SeqPrefix::nonneg(1, vec![0.5]).unwrap();
        assert!(matches!(partial_power_sum(&u, 0), Err(Error::Domain(_))));
        assert!(SeqPrefix::new(0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn scaling_band() {
        let y = SeqPrefix::from_fn(1, 50, |n| 1.0 / n as f64).unwrap();
        let x = y.scaled(2.0);
        let b = ratio_band(&x, &y, Window::new(1, 50).unwrap()).unwrap();
        assert_eq!((b.low, b.high), (2.0, 2.0));
        let zero = SeqPrefix::new(1, vec![0.0; 50]).unwrap();
        assert!(ratio_band(&x, &zero, Window::new(1, 50).unwrap()).is_err());
    }

    #[test]
    fn doubling_examples() {
        let lin = SeqPrefix::from_fn(1, 200, |n| n as f64).unwrap();
        let b = doubling_check(&lin, Window::new(1, 100).unwrap()).unwrap();
        assert_eq!((b.low, b.high), (2.0, 2.0));
        let log = SeqPrefix::from_fn(1, 2000, |n| (n as f64 + 1.0).ln()).unwrap();
        let b = doubling_check(&log, Window::new(100, 1000).unwrap()).unwrap();
        assert!(b.within(1.0, 1.2));
        assert!(matches!(doubling_check(&log, Window::new(100, 1001).unwrap()), Err(Error::Range(_))));
        let exp = SeqPrefix::from_fn(1, 240, |n| 2f64.powi(n as i32)).unwrap();
        let b = doubling_check(&exp, Window::new(100, 120).unwrap()).unwrap();
        assert!(b.low >= 2f64.powi(100) && !b.within(0.5, 4.0));
    }

    #[test]
    fn rv_examples() {
        let w = Window::new(10, 1000).unwrap();
        let lin = SeqPrefix::from_fn(1, 1000, |n| n as f64).unwrap();
        assert!((rv_index(&lin, w).unwrap() - 1.0).abs() < 1e-3);
        let sq = SeqPrefix::from_fn(1, 1000, |n| (n as f64).sqrt()).unwrap();
        assert!((rv_index(&sq, w).unwrap() - 0.5).abs() < 1e-2);
        assert!(rv_index(&sq, Window::new(5, 6).unwrap()).is_err());
    }

    #[test]
    fn grid_is_sorted_and_bounded() {
        let g = log_grid(10, 10_000, 30);
        assert_eq!((g[0], *g.last().unwrap()), (10, 10_000));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
