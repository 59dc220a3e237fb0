//! Gauss-Legendre quadrature helpers (nodes from `gauss-quad`).

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::scalar::Acc;

/// Nodes and weights on [-1, 1].
pub fn gl_rule(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("rule order must be positive"));
    rule.as_node_weight_pairs().to_vec()
}

fn apply(rule: &[(f64, f64)], a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> f64 {
    let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
    let mut acc = Acc::<f64>::new();
    for (x, w) in rule {
        acc.add(&(w * f(m + h * x)));
    }
    h * acc.value()
}

/// Adaptive bisection with a fixed Gauss-Legendre rule, comparing each panel
/// against its two halves. Returns (value, estimated absolute error).
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<(f64, f64)> {
    let rule = gl_rule(10);
    let mut total = Acc::<f64>::new();
    let mut err = Acc::<f64>::new();
    // Explicit stack, left-to-right, so the summation order is fixed.
    let whole = apply(&rule, a, b, &mut f);
    let mut stack = vec![(a, b, whole, 0u32, tol)];
    while let Some((lo, hi, coarse, depth, t)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = apply(&rule, lo, mid, &mut f);
        let right = apply(&rule, mid, hi, &mut f);
        let diff = (left + right - coarse).abs();
        if diff <= t || depth >= max_depth {
            if depth >= max_depth && diff > t {
                return Err(Error::Accuracy {
                    msg: format!("quadrature did not converge on [{lo:e}, {hi:e}]"),
                    achieved: diff,
                });
            }
            total.add(&(left + right));
            err.add(&diff);
        } else {
            stack.push((mid, hi, right, depth + 1, 0.5 * t));
            stack.push((lo, mid, left, depth + 1, 0.5 * t));
        }
    }
    Ok((total.value(), err.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let (v, _) = adaptive(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 30).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let (v, _) = adaptive(|x| (-x * x).exp(), -8.0, 8.0, 1e-12, 30).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }
}
