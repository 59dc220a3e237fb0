//! One-sided 1/2-stable law, normalized so that E Z^{-1/2} = 1.
//!
//! Equivalently E exp(-sZ) = exp(-s^{1/2} / Gamma(3/2)), which gives the
//! density f(x) = x^{-3/2} exp(-1/(pi x)) / pi. With the unscaled convention
//! E exp(-sZ) = exp(-s^{1/2}) the same integral tends to 2/sqrt(pi) instead.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::quad::adaptive;

pub fn stable_half_density(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    x.powf(-1.5) * (-1.0 / (PI * x)).exp() / PI
}

/// Density under E exp(-sZ) = exp(-s^{1/2}).
pub fn levy_density_unscaled(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    x.powf(-1.5) * (-1.0 / (4.0 * x)).exp() / (2.0 * PI.sqrt())
}

/// Quadrature of the integral over [c, d] of f(x) x^{-1/2} dx, on a log scale.
pub fn stable_density_check(c: f64, d: f64, tol: f64) -> Result<f64> {
    integral_with(stable_half_density, c, d, tol)
}

pub fn integral_with(f: impl Fn(f64) -> f64, c: f64, d: f64, tol: f64) -> Result<f64> {
    if !(c > 0.0) || d < c {
        return domain(format!("need 0 < c <= d, got [{c}, {d}]"));
    }
    if c == d {
        return Ok(0.0);
    }
    let g = |u: f64| {
        let x = u.exp();
        f(x) * x.sqrt()
    };
    Ok(adaptive(g, c.ln(), d.ln(), tol, 40)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_integral_is_one() {
        let v = stable_density_check(1e-6, 1e6, 1e-10).unwrap();
        // Closed form after y = 1/x: exp(-1e-6/pi) - exp(-1e6/pi).
        assert!((v - (-1e-6 / PI).exp()).abs() < 1e-9);
        assert!((v - 1.0).abs() < 1e-3);
    }

    #[test]
    fn density_is_a_probability_density() {
        let (mass, _) = crate::quad::adaptive(
            |u: f64| stable_half_density(u.exp()) * u.exp(),
            (1e-8f64).ln(),
            (1e14f64).ln(),
            1e-10,
            40,
        )
        .unwrap();
        // Tail beyond 1e14 has mass about 2/(pi sqrt(1e14)).
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unscaled_convention_limit() {
        let v = integral_with(levy_density_unscaled, 1e-8, 1e8, 1e-10).unwrap();
        assert!((v - 2.0 / PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn degenerate_and_monotone() {
        assert_eq!(stable_density_check(2.0, 2.0, 1e-9).unwrap(), 0.0);
        let a = stable_density_check(0.1, 10.0, 1e-10).unwrap();
        let b = stable_density_check(0.05, 20.0, 1e-10).unwrap();
        assert!(b >= a);
        assert!(stable_density_check(0.0, 1.0, 1e-9).is_err());
    }
}
