//! Poincare disk geometry: distance, Mobius maps, line elements and the
//! geodesic flow, Euclidean form of hyperbolic balls, and the two angle
//! windows used by the orbital estimates. Angles are radians.

use std::f64::consts::PI;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

const GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub z: Complex64,
}

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.norm() < 1.0 - GUARD) {
            return domain(format!("{z} is not inside the unit disk"));
        }
        Ok(DiskPoint { z })
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn origin() -> Self {
        DiskPoint { z: Complex64::new(0.0, 0.0) }
    }

    /// The point at hyperbolic distance r from 0 in direction theta.
    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(Complex64::from_polar((r / 2.0).tanh(), theta))
    }
}

/// rho(x, y) = 2 artanh(|x - y| / |1 - conj(x) y|).
pub fn hyp_dist(x: DiskPoint, y: DiskPoint) -> f64 {
    hyp_dist_c(x.z, y.z)
}

pub(crate) fn hyp_dist_c(x: Complex64, y: Complex64) -> f64 {
    let num = (x - y).norm();
    if num == 0.0 {
        return 0.0;
    }
    let q = num / (Complex64::new(1.0, 0.0) - x.conj() * y).norm();
    2.0 * q.min(1.0).atanh()
}

/// z -> (a z + b) / (conj(b) z + conj(a)) with |a|^2 - |b|^2 = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
}

impl MobiusMap {
    pub fn identity() -> Self {
        MobiusMap { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) {
            return domain("|a|^2 - |b|^2 must be positive");
        }
        Ok(MobiusMap { a, b }.renormalized())
    }

    /// Hyperbolic translation by distance d along the real diameter.
    pub fn translation(d: f64) -> Self {
        MobiusMap { a: Complex64::new((d / 2.0).cosh(), 0.0), b: Complex64::new((d / 2.0).sinh(), 0.0) }
    }

    /// Euclidean rotation z -> e^{i alpha} z.
    pub fn rotation(alpha: f64) -> Self {
        MobiusMap { a: Complex64::from_polar(1.0, alpha / 2.0), b: Complex64::new(0.0, 0.0) }
    }

    /// phi_z(w) = (z + w) / (1 + conj(z) w), sending 0 to z.
    pub fn to_point(z: DiskPoint) -> Self {
        let s = (1.0 - z.z.norm_sqr()).sqrt();
        MobiusMap { a: Complex64::new(1.0 / s, 0.0), b: z.z / s }
    }

    pub fn det(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    pub fn renormalized(self) -> Self {
        let s = self.det().sqrt();
        MobiusMap { a: self.a / s, b: self.b / s }
    }

    pub fn apply_c(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    pub fn apply(&self, z: DiskPoint) -> DiskPoint {
        DiskPoint { z: self.apply_c(z.z) }
    }

    /// g'(z) = 1 / (conj(b) z + conj(a))^2 on the unit-determinant form.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = self.b.conj() * z + self.a.conj();
        self.det() / (d * d)
    }

    /// self o other.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap { a: self.a.conj(), b: -self.b }
    }

    /// Translation length from the trace: 2 acosh(|Re a|) when hyperbolic.
    pub fn translation_length(&self) -> f64 {
        2.0 * self.a.re.abs().max(1.0).acosh()
    }

    /// Largest entry difference up to the global sign.
    pub fn distance_pm(&self, other: &MobiusMap) -> f64 {
        let d = |s: f64| (self.a - other.a * s).norm().max((self.b - other.b * s).norm());
        d(1.0).min(d(-1.0))
    }
}

fn norm_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// (x, theta): base point and direction of the unit tangent, theta the
/// argument of the tangent vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineElement {
    pub base: DiskPoint,
    pub angle: f64,
}

impl LineElement {
    pub fn new(base: DiskPoint, angle: f64) -> Self {
        LineElement { base, angle: norm_angle(angle) }
    }

    /// Distance on the unit tangent bundle used by tests: base distance
    /// plus the circular angle gap.
    pub fn gap(&self, other: &LineElement) -> f64 {
        let d = (self.angle - other.angle).rem_euclid(2.0 * PI);
        hyp_dist(self.base, other.base) + d.min(2.0 * PI - d)
    }
}

/// g(x, theta) = (g(x), theta + arg g'(x)).
pub fn mobius_act(g: &MobiusMap, w: &LineElement) -> LineElement {
    LineElement::new(g.apply(w.base), w.angle + g.derivative(w.base.z).arg())
}

/// Direction reversal.
pub fn chi(w: &LineElement) -> LineElement {
    LineElement::new(w.base, w.angle + PI)
}

/// Flow for time t along the directed geodesic. At the origin,
/// phi^t(0, theta) = (tanh(t/2) e^{i theta}, theta); elsewhere conjugate by
/// phi_x, whose derivative at 0 is a positive real.
pub fn geodesic_flow(w: &LineElement, t: f64) -> LineElement {
    let g = MobiusMap::to_point(w.base);
    let p = LineElement { base: DiskPoint { z: Complex64::from_polar((t / 2.0).tanh(), w.angle) }, angle: w.angle };
    mobius_act(&g, &p)
}

/// N_rho(w, eta) as a Euclidean ball (center, radius).
pub fn ball_euclid(w: DiskPoint, eta: f64) -> Result<(Complex64, f64)> {
    if !(eta > 0.0) {
        return domain("eta must be positive");
    }
    let d = (eta / 2.0).tanh();
    let r2 = w.z.norm_sqr();
    let den = 1.0 - d * d * r2;
    let center = w.z * ((1.0 - d * d) / den);
    let radius = d * (1.0 - r2) / den;
    if center.norm() + radius >= 1.0 - GUARD {
        return domain("ball reaches the boundary at working precision");
    }
    Ok((center, radius))
}

/// |Lambda(w, eta)|: angle subtended at 0 by N_rho(w, eta).
pub fn lambda_len(w: DiskPoint, eta: f64) -> Result<f64> {
    if hyp_dist(DiskPoint::origin(), w) <= eta {
        return domain("0 lies in the ball; Lambda is undefined");
    }
    let d = (eta / 2.0).tanh();
    let r = w.z.norm();
    let arg = (1.0 - r * r) * d / (r * (1.0 - d * d));
    Ok(2.0 * arg.min(1.0).asin())
}

/// Arc (center angle, half width) of directions theta with
/// tanh(s/2) e^{i theta} in N_rho(w, eta); half width pi means the full
/// circle.
pub fn j_arc(w: DiskPoint, eta: f64, s: f64) -> Result<Option<(f64, f64)>> {
    let (c, radius) = ball_euclid(w, eta)?;
    let r = (s.abs() / 2.0).tanh();
    let cn = c.norm();
    if r == 0.0 || cn == 0.0 {
        return Ok(if (r - cn).abs() < radius { Some((0.0, PI)) } else { None });
    }
    let k = (r * r + cn * cn - radius * radius) / (2.0 * r * cn);
    Ok(if k >= 1.0 {
        None
    } else if k <= -1.0 {
        Some((0.0, PI))
    } else {
        Some((norm_angle(c.arg()), k.acos()))
    })
}

/// |J(w, eta)| at flow time s, in radians.
pub fn j_len(w: DiskPoint, eta: f64, s: f64) -> Result<f64> {
    Ok(j_arc(w, eta, s)?.map_or(0.0, |(_, h)| 2.0 * h))
}

/// (|Lambda|, |J|).
pub fn angle_windows(w: DiskPoint, eta: f64, s: f64) -> Result<(f64, f64)> {
    Ok((lambda_len(w, eta)?, j_len(w, eta, s)?))
}

/// Hyperbolic area of a ball of radius eps: 4 pi sinh^2(eps/2).
pub fn ball_area(eps: f64) -> f64 {
    4.0 * PI * (eps / 2.0).sinh().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let o = DiskPoint::origin();
        assert_eq!(hyp_dist(o, o), 0.0);
        let h = DiskPoint::from_re_im(0.5, 0.0).unwrap();
        assert!((hyp_dist(o, h) - 3f64.ln()).abs() < 1e-14);
        assert!(DiskPoint::from_re_im(1.0, 0.0).is_err());
    }

    #[test]
    fn flow_at_origin() {
        let w = LineElement::new(DiskPoint::origin(), 0.7);
        let f = geodesic_flow(&w, 1.3);
        assert!((f.base.z - Complex64::from_polar((0.65f64).tanh(), 0.7)).norm() < 1e-15);
        assert!((f.angle - 0.7).abs() < 1e-12);
    }

    #[test]
    fn ball_at_origin() {
        let (c, r) = ball_euclid(DiskPoint::origin(), 0.3).unwrap();
        assert_eq!(c.norm(), 0.0);
        assert!((r - 0.15f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn j_full_circle_and_empty() {
        let o = DiskPoint::origin();
        assert!((j_len(o, 0.5, 0.2).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(j_len(o, 0.5, 0.9).unwrap(), 0.0);
        assert!((j_len(o, 0.5, 0.0).unwrap() - 2.0 * PI).abs() < 1e-15);
    }
}
