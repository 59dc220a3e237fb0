//! Orbital sums, correlation integrals of Delta(x, eps) = N_rho(x, eps) x T
//! under the geodesic flow, and the cover counting sequence.
//!
//! Every sum over the group is restricted to an enumerated ball whose
//! completeness is certified by the word-metric band: if rho(0, g 0) >=
//! c_1 l(g) on the enumeration, elements longer than max_len have
//! rho(0, g 0) > c_1 max_len, so radii up to that bound are complete.

use std::f64::consts::PI;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{BandVerdict, Window};
use crate::error::{domain, Error, Result};
use crate::quad::gl_rule;
use crate::scalar::Acc;

use super::geometry::{ball_euclid, hyp_dist, hyp_dist_c, j_arc, DiskPoint, MobiusMap};
use super::group::{enumerate_group, Enumeration, FuchsianGroup};

/// An enumerated group with its certified radius.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub group: FuchsianGroup,
    pub enumeration: Enumeration,
    pub band: BandVerdict,
    /// Orbit points g(0) with rho(0, g 0) below this are all enumerated.
    pub certified_radius: f64,
    /// rho(0, g 0) per element, in enumeration order.
    dist0: Vec<f64>,
}

/// Band of rho(0, g(0)) / l(g) over all enumerated g != id.
pub fn word_metric_band(e: &Enumeration) -> Result<BandVerdict> {
    let o = DiskPoint::origin();
    let ratios: Vec<f64> = e
        .elements
        .iter()
        .filter(|g| g.length > 0)
        .map(|g| hyp_dist(o, g.map.apply(o)) / g.length as f64)
        .collect();
    if ratios.is_empty() {
        return domain("enumeration has no nontrivial elements");
    }
    BandVerdict::of(&ratios, Window::new(1, e.max_len)?)
}

/// Per-length (min, max) of rho(0, g 0) / l(g).
pub fn word_metric_levels(e: &Enumeration) -> Vec<(usize, f64, f64)> {
    let o = DiskPoint::origin();
    (1..=e.max_len)
        .map(|l| {
            let r: Vec<f64> = e
                .elements
                .iter()
                .filter(|g| g.length == l)
                .map(|g| hyp_dist(o, g.map.apply(o)) / l as f64)
                .collect();
            (l, r.iter().cloned().fold(f64::INFINITY, f64::min), r.iter().cloned().fold(0.0, f64::max))
        })
        .collect()
}

impl Orbit {
    pub fn new(group: FuchsianGroup, max_len: usize) -> Result<Self> {
        let enumeration = enumerate_group(&group, max_len)?;
        Self::from_enumeration(group, enumeration)
    }

    pub fn from_enumeration(group: FuchsianGroup, enumeration: Enumeration) -> Result<Self> {
        let band = word_metric_band(&enumeration)?;
        let certified_radius = band.low * enumeration.max_len as f64;
        let zero = Complex64::new(0.0, 0.0);
        let dist0 = enumeration.elements.iter().map(|g| hyp_dist_c(zero, g.map.apply_c(zero))).collect();
        Ok(Orbit { group, enumeration, band, certified_radius, dist0 })
    }

    /// Certifies that all g with rho(x, g x) <= radius are enumerated, using
    /// rho(0, g 0) <= rho(x, g x) + 2 rho(0, x).
    pub fn certify(&self, x: DiskPoint, radius: f64) -> Result<()> {
        let need = radius + 2.0 * hyp_dist(DiskPoint::origin(), x);
        if need > self.certified_radius {
            let max_t = self.certified_radius - 2.0 * hyp_dist(DiskPoint::origin(), x);
            return Err(Error::Coverage {
                msg: format!("radius {need:.4} exceeds the certified radius {:.4}", self.certified_radius),
                max_t,
            });
        }
        Ok(())
    }

    /// Orbit points g(x) with rho(x, g x) in [lo, hi], in deterministic order.
    fn orbit_points(&self, x: DiskPoint, lo: f64, hi: f64) -> Vec<(Complex64, &[i64])> {
        let r0 = hyp_dist(DiskPoint::origin(), x);
        let mut out = Vec::new();
        for (i, g) in self.enumeration.elements.iter().enumerate() {
            if self.dist0[i] > hi + 2.0 * r0 {
                continue;
            }
            let gx = g.map.apply_c(x.z);
            let d = hyp_dist_c(x.z, gx);
            if d >= lo && d <= hi {
                out.push((gx, g.theta_image.as_slice()));
            }
        }
        out
    }

    /// rho(0, g 0) of every enumerated element, in enumeration order.
    pub fn distances(&self) -> &[f64] {
        &self.dist0
    }
}

/// Restriction to Ker Theta projected to the first kappa coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaZero {
    pub kappa: usize,
}

impl ThetaZero {
    pub fn admits(&self, theta: &[i64]) -> bool {
        theta.iter().take(self.kappa).all(|&v| v == 0)
    }
}

/// Sum of e^{-rho(x, g x)} over g with |rho(x, g x) - t| < eps.
pub fn orbital_sum(orbit: &Orbit, x: DiskPoint, t: f64, eps: f64, constraint: Option<ThetaZero>) -> Result<f64> {
    if !(eps > 0.0) {
        return domain("eps must be positive");
    }
    if let Some(c) = constraint {
        if c.kappa > orbit.group.rank() {
            return domain(format!("kappa = {} exceeds the theta rank {}", c.kappa, orbit.group.rank()));
        }
    }
    orbit.certify(x, t + eps)?;
    let mut acc = Acc::<f64>::new();
    for (gx, th) in orbit.orbit_points(x, t - eps, t + eps) {
        let d = hyp_dist_c(x.z, gx);
        if (d - t).abs() < eps && constraint.map_or(true, |c| c.admits(th)) {
            acc.add(&(-d).exp());
        }
    }
    Ok(acc.value())
}

/// Lengths of a union of arcs (center, half width) on the circle.
fn arcs_to_intervals(arcs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut iv = Vec::new();
    for &(c, h) in arcs {
        if h >= PI {
            return vec![(0.0, 2.0 * PI)];
        }
        let a = (c - h).rem_euclid(2.0 * PI);
        let b = a + 2.0 * h;
        if b > 2.0 * PI {
            iv.push((a, 2.0 * PI));
            iv.push((0.0, b - 2.0 * PI));
        } else {
            iv.push((a, b));
        }
    }
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo < hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Measure of theta with phi^{t_j}(z, theta) in Gamma N for all j, given the
/// candidate orbit points g(x) for each time.
fn angular_measure(z: Complex64, eps: f64, times: &[f64], cands: &[Vec<Complex64>]) -> f64 {
    let inv = MobiusMap::to_point(DiskPoint { z }).inverse();
    let mut acc: Option<Vec<(f64, f64)>> = None;
    for (t, cs) in times.iter().zip(cands) {
        let mut arcs = Vec::new();
        for &gx in cs {
            let d = hyp_dist_c(z, gx);
            if (d - t).abs() >= eps {
                continue;
            }
            let w = DiskPoint { z: inv.apply_c(gx) };
            if let Ok(Some(a)) = j_arc(w, eps, *t) {
                arcs.push(a);
            }
        }
        let iv = arcs_to_intervals(&arcs);
        acc = Some(match acc {
            None => iv,
            Some(prev) => intersect(&prev, &iv),
        });
        if acc.as_ref().map_or(false, |v| v.is_empty()) {
            return 0.0;
        }
    }
    acc.map_or(0.0, |v| v.iter().map(|(a, b)| b - a).sum())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss points per panel and direction.
    pub order: usize,
    pub min_panels: usize,
    pub max_panels: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { order: 8, min_panels: 4, max_panels: 128, rel_tol: 1e-4 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    /// |I(panels) - I(panels / 2)| / |I(panels)|.
    pub rel_change: f64,
    pub panels: usize,
}

/// Integral over N_rho(x, eps) (polar coordinates about the Euclidean
/// center, dA = 4 r dr da / (1 - |z|^2)^2) of the angular measure of the
/// flow constraints at the given times. Panels double until the relative
/// change drops below the tolerance.
fn ball_integral(
    x: DiskPoint,
    eps: f64,
    times: &[f64],
    cands: &[Vec<Complex64>],
    q: QuadratureSpec,
) -> Result<Integral> {
    let (c, radius) = ball_euclid(x, eps)?;
    let rule = gl_rule(q.order);
    let eval = |panels: usize| -> f64 {
        let hr = radius / panels as f64;
        let ha = 2.0 * PI / panels as f64;
        // Rows of the radial grid in parallel; each row summed in order.
        let rows: Vec<f64> = (0..panels * q.order)
            .into_par_iter()
            .map(|ri| {
                let (pi, k) = (ri / q.order, ri % q.order);
                let (xr, wr) = rule[k];
                let r = hr * (pi as f64 + 0.5 * (xr + 1.0));
                let mut acc = Acc::<f64>::new();
                for pa in 0..panels {
                    for &(xa, wa) in &rule {
                        let a = ha * (pa as f64 + 0.5 * (xa + 1.0));
                        let z = c + Complex64::from_polar(r, a);
                        let jac = 4.0 * r / (1.0 - z.norm_sqr()).powi(2);
                        let f = angular_measure(z, eps, times, cands);
                        acc.add(&(0.25 * hr * ha * wr * wa * jac * f));
                    }
                }
                acc.value()
            })
            .collect();
        let mut acc = Acc::<f64>::new();
        for v in &rows {
            acc.add(v);
        }
        acc.value()
    };
    let mut panels = q.min_panels.max(1);
    let mut prev = eval(panels);
    loop {
        let next_p = panels * 2;
        let cur = eval(next_p);
        let rel = if cur == 0.0 { (cur - prev).abs() } else { ((cur - prev) / cur).abs() };
        panels = next_p;
        if rel <= q.rel_tol || cur == 0.0 && prev == 0.0 {
            return Ok(Integral { value: cur, rel_change: rel, panels });
        }
        if panels >= q.max_panels {
            return Err(Error::Accuracy { msg: format!("ball quadrature at {panels} panels"), achieved: rel });
        }
        prev = cur;
    }
}

/// m(Delta(x, eps) and phi^{-s} Delta(x, eps)).
pub fn correlation_integral(orbit: &Orbit, x: DiskPoint, eps: f64, s: f64, q: QuadratureSpec) -> Result<Integral> {
    if !(eps > 0.0) || s < 0.0 {
        return domain("need eps > 0 and s >= 0");
    }
    orbit.certify(x, s + 2.0 * eps)?;
    let cands: Vec<Complex64> = orbit.orbit_points(x, s - 2.0 * eps, s + 2.0 * eps).into_iter().map(|p| p.0).collect();
    ball_integral(x, eps, &[s], &[cands], q)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sandwich {
    pub s: f64,
    pub integral: f64,
    /// Orbital sum over rho = s +- eps/2.
    pub lower_sum: f64,
    /// Orbital sum over rho = s +- 2 eps.
    pub upper_sum: f64,
}

impl Sandwich {
    /// integral / upper_sum: bounded above when (i) holds.
    pub fn upper_constant(&self) -> Option<f64> {
        (self.upper_sum > 0.0).then(|| self.integral / self.upper_sum)
    }
    /// integral / lower_sum: bounded below when (ii) holds.
    pub fn lower_constant(&self) -> Option<f64> {
        (self.lower_sum > 0.0).then(|| self.integral / self.lower_sum)
    }
}

pub fn annulus_sandwich(orbit: &Orbit, x: DiskPoint, eps: f64, s: f64, q: QuadratureSpec) -> Result<Sandwich> {
    let integral = correlation_integral(orbit, x, eps, s, q)?.value;
    let lower_sum = orbital_sum(orbit, x, s, 0.5 * eps, None)?;
    let upper_sum = orbital_sum(orbit, x, s, 2.0 * eps, None)?;
    Ok(Sandwich { s, integral, lower_sum, upper_sum })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiCorrelation {
    pub gaps: Vec<f64>,
    pub lhs: f64,
    pub rhs_product: f64,
    pub ratio: f64,
}

/// m(intersection over j of phi^{-t_j} Delta(x, eps)), t_j = s_1 + ... + s_j,
/// against the product of the pairwise correlations at 4 eps.
pub fn multi_correlation_geodesic(
    orbit: &Orbit,
    x: DiskPoint,
    eps: f64,
    gaps: &[f64],
    q: QuadratureSpec,
) -> Result<MultiCorrelation> {
    if gaps.is_empty() || gaps.iter().any(|&s| !(s > 0.0)) {
        return domain("gaps must be positive and nonempty");
    }
    let mut times = Vec::new();
    let mut t = 0.0;
    for &s in gaps {
        t += s;
        times.push(t);
    }
    orbit.certify(x, t + 2.0 * eps * gaps.len() as f64)?;
    let cands: Vec<Vec<Complex64>> = times
        .iter()
        .map(|&tj| orbit.orbit_points(x, tj - 2.0 * eps, tj + 2.0 * eps).into_iter().map(|p| p.0).collect())
        .collect();
    let total: usize = cands.iter().map(|c| c.len()).product();
    if total > 1_000_000_000 {
        return Err(Error::Resource(format!("{total} candidate tuples")));
    }
    let lhs = ball_integral(x, eps, &times, &cands, q)?.value;
    let mut rhs = 1.0;
    for &s in gaps {
        rhs *= correlation_integral(orbit, x, 4.0 * eps, s, q)?.value;
    }
    let ratio = if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(MultiCorrelation { gaps: gaps.to_vec(), lhs, rhs_product: rhs, ratio })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverCount {
    pub kappa: usize,
    pub eps: f64,
    pub t: Vec<f64>,
    /// Annulus sum over Ker Theta.
    pub restricted: Vec<f64>,
    /// Annulus sum over the whole group.
    pub unrestricted: Vec<f64>,
    /// t^{kappa/2} restricted.
    pub scaled: Vec<f64>,
    /// t^{kappa/2} restricted / unrestricted: the fraction of the annulus in
    /// Ker Theta, corrected for the growth of the whole group.
    pub normalized: Vec<f64>,
}

pub fn cover_counting(orbit: &Orbit, kappa: usize, t_grid: &[f64], eps: f64) -> Result<CoverCount> {
    let x = DiskPoint::origin();
    let mut out = CoverCount {
        kappa,
        eps,
        t: t_grid.to_vec(),
        restricted: vec![],
        unrestricted: vec![],
        scaled: vec![],
        normalized: vec![],
    };
    for &t in t_grid {
        let r = orbital_sum(orbit, x, t, eps, Some(ThetaZero { kappa }))?;
        let u = orbital_sum(orbit, x, t, eps, None)?;
        let w = t.powf(kappa as f64 / 2.0);
        out.restricted.push(r);
        out.unrestricted.push(u);
        out.scaled.push(w * r);
        out.normalized.push(if u > 0.0 { w * r / u } else { 0.0 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_union_and_intersection() {
        let u = arcs_to_intervals(&[(0.1, 0.2), (6.2, 0.2)]);
        let total: f64 = u.iter().map(|(a, b)| b - a).sum();
        assert!((total - (0.3 + (2.0 * PI - 6.0))).abs() < 1e-12);
        let i = intersect(&[(0.0, 1.0), (2.0, 3.0)], &[(0.5, 2.5)]);
        assert_eq!(i, vec![(0.5, 1.0), (2.0, 2.5)]);
    }
}
