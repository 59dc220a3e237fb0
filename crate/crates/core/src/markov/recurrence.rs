use serde::{Deserialize, Serialize};

use crate::asymptotics::{least_squares, log_grid, partial_power_sum, SeqPrefix};
use crate::error::Result;

use super::correlation::return_sequence_pruned;
use super::model::MarkovModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recurrence {
    Recurrent,
    Dissipative,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub verdict: Recurrence,
    pub d: u32,
    pub n_max: usize,
    /// Fitted decay exponent p in u_n ~ n^{-p}.
    pub p: f64,
    pub pd: f64,
    /// Fitted c in a_d(n) ~ c log n (meaningful near the boundary pd = 1).
    pub log_slope: f64,
    /// Fitted exponent of the doubling increments a_d(2n) - a_d(n) in n.
    pub increment_exponent: f64,
    /// True when the boundary refinement decided the verdict.
    pub harmonic: bool,
    pub a_d: SeqPrefix,
}

/// Fits (p, d) from u_n on a geometric grid of [n_max/20, n_max]. Zeros of
/// u_n (parity) are skipped.
pub fn fit_decay(u: &[f64]) -> Result<f64> {
    let n_max = u.len();
    let grid = log_grid((n_max / 20).max(2), n_max, 30);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in grid {
        // Nearest positive entry at or after n.
        if let Some(m) = (n..=n_max).take(4).find(|&m| u[m - 1] > 0.0) {
            xs.push((m as f64).ln());
            ys.push(u[m - 1].ln());
        }
    }
    Ok(-least_squares(&xs, &ys)?.0)
}

pub fn recurrence_classify(model: &MarkovModel, d: u32, n_max: usize, tol: f64) -> Result<RecurrenceReport> {
    // Mass below 1e-40 per cell is cut; the total cut is far below any u_n
    // at these n, and kappa = 2 prefixes of length 10^4 become feasible.
    let (u, _) = return_sequence_pruned(model, n_max, 1e-40, 16)?;
    classify_sequence(&u, d, tol)
}

/// Classification from a precomputed return sequence u_1..u_N.
pub fn classify_sequence(u: &[f64], d: u32, tol: f64) -> Result<RecurrenceReport> {
    let n_max = u.len();
    let a_d = partial_power_sum(&SeqPrefix::nonneg(1, u.to_vec())?, d.max(1))?;
    let mut report = RecurrenceReport {
        verdict: Recurrence::Inconclusive,
        d,
        n_max,
        p: f64::NAN,
        pd: f64::NAN,
        log_slope: f64::NAN,
        increment_exponent: f64::NAN,
        harmonic: false,
        a_d,
    };
    if n_max < 64 || d == 0 {
        return Ok(report);
    }
    let p = fit_decay(u)?;
    report.p = p;
    report.pd = p * d as f64;
    // Boundary fits: a_d against log n, and the doubling increments.
    let grid = log_grid((n_max / 100).max(4), n_max, 30);
    let xs: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = grid.iter().map(|&n| report.a_d.get(n).unwrap()).collect();
    report.log_slope = least_squares(&xs, &ys)?.0;
    let mut ns = Vec::new();
    let mut n = (n_max / 64).max(2);
    while 2 * n <= n_max {
        ns.push(n);
        n *= 2;
    }
    let incr: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| ((n as f64).ln(), report.a_d.get(2 * n).unwrap() - report.a_d.get(n).unwrap()))
        .filter(|(_, v)| *v > 0.0)
        .collect();
    if incr.len() >= 3 {
        let (x, y): (Vec<f64>, Vec<f64>) = incr.iter().map(|(x, v)| (*x, v.ln())).unzip();
        report.increment_exponent = least_squares(&x, &y)?.0;
    }
    report.verdict = if report.pd < 1.0 - tol {
        Recurrence::Recurrent
    } else if report.pd > 1.0 + tol {
        Recurrence::Dissipative
    } else if report.increment_exponent.is_finite() && report.increment_exponent > -tol {
        // Doubling increments of a_d do not decay: harmonic divergence.
        report.harmonic = true;
        Recurrence::Recurrent
    } else {
        Recurrence::Inconclusive
    };
    Ok(report)
}
