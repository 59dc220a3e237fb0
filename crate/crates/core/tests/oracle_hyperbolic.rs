//! Disk geometry and orbital sums against sampling, trigonometry and
//! explicit word enumeration. Nothing here calls the library's distance or
//! Mobius arithmetic.

use std::f64::consts::PI;

use ergolab::hyperbolic::{
    correlation_integral, j_len, lambda_len, orbital_sum, DiskPoint, FuchsianGroup, Orbit, QuadratureSpec, ThetaZero,
};
use ergolab::markov::stable_density_check;
use num::complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// cosh rho = 1 + 2 |x - y|^2 / ((1 - |x|^2)(1 - |y|^2)).
fn dist(x: Complex64, y: Complex64) -> f64 {
    (1.0 + 2.0 * (x - y).norm_sqr() / ((1.0 - x.norm_sqr()) * (1.0 - y.norm_sqr()))).acosh()
}

fn disk(re: f64, im: f64) -> DiskPoint {
    DiskPoint::from_re_im(re, im).unwrap()
}

#[test]
fn distance_matches_metric_quadrature() {
    // Along a diameter the geodesic is the segment, and the length element
    // is 2 |dz| / (1 - |z|^2).
    for &(a, b) in &[(0.0, 0.5), (-0.3, 0.8), (0.1, 0.95), (-0.9, 0.9)] {
        let n = 200_000;
        let h = (b - a) / n as f64;
        let len: f64 = (0..n)
            .map(|i| {
                let z: f64 = a + h * (i as f64 + 0.5);
                2.0 * h / (1.0 - z * z)
            })
            .sum();
        let got = ergolab::hyperbolic::hyp_dist(disk(a, 0.0), disk(b, 0.0));
        assert!((got - len).abs() < 1e-6 * len.max(1.0), "[{a}, {b}]: {got} vs {len}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let x = Complex64::from_polar(rng.random::<f64>().sqrt() * 0.95, rng.random::<f64>() * 2.0 * PI);
        let y = Complex64::from_polar(rng.random::<f64>().sqrt() * 0.95, rng.random::<f64>() * 2.0 * PI);
        let got = ergolab::hyperbolic::hyp_dist(DiskPoint::new(x).unwrap(), DiskPoint::new(y).unwrap());
        assert!((got - dist(x, y)).abs() < 1e-9 * got.max(1.0));
    }
}

/// Fraction of 10^6 equally spaced angles satisfying `hit`, times 2 pi.
fn angular(hit: impl Fn(f64) -> bool) -> f64 {
    let n = 1_000_000;
    let c = (0..n).filter(|&i| hit(2.0 * PI * (i as f64 + 0.5) / n as f64)).count();
    2.0 * PI * c as f64 / n as f64
}

#[test]
fn lambda_matches_angular_sampling() {
    for &(w, eta) in &[(Complex64::new(0.5, 0.0), 0.1), (Complex64::from_polar(0.8, 2.0), 0.3), (Complex64::new(0.0, -0.3), 0.05)] {
        let rho = dist(Complex64::new(0.0, 0.0), w);
        // Right triangle at the foot of the perpendicular from w to the ray:
        // sinh(dist to the line) = sinh(rho) sin(angle).
        let want = angular(|th| {
            let gap = (th - w.arg()).rem_euclid(2.0 * PI);
            let gap = gap.min(2.0 * PI - gap);
            gap < PI / 2.0 && (rho.sinh() * gap.sin()).asinh() < eta
        });
        let got = lambda_len(DiskPoint::new(w).unwrap(), eta).unwrap();
        assert!((got - want).abs() < 1e-3 * got, "w = {w}: {got} vs {want}");
    }
}

#[test]
fn j_matches_angular_sampling() {
    let w = Complex64::from_polar(0.6, 1.0);
    let rho = dist(Complex64::new(0.0, 0.0), w);
    for &(eta, s) in &[(0.2, rho), (0.2, rho - 0.1), (0.5, rho + 0.3), (0.1, rho + 0.5), (2.0, 0.3)] {
        let r = (s / 2.0).tanh();
        let want = angular(|th| dist(Complex64::from_polar(r, th), w) < eta);
        let got = j_len(DiskPoint::new(w).unwrap(), eta, s).unwrap();
        assert!((got - want).abs() < 1e-5 + 1e-3 * got, "eta = {eta} s = {s}: {got} vs {want}");
    }
}

/// (a, b) matrices [[a, b], [conj b, conj a]].
type M = (Complex64, Complex64);

fn mul(x: M, y: M) -> M {
    (x.0 * y.0 + x.1 * y.1.conj(), x.0 * y.1 + x.1 * y.0.conj())
}

fn act(m: M, z: Complex64) -> Complex64 {
    (m.0 * z + m.1) / (m.1.conj() * z + m.0.conj())
}

/// Every reduced word up to `len`, as (map, word).
fn reduced_words(g: &FuchsianGroup, len: usize) -> Vec<(M, Vec<usize>)> {
    let id: M = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let mut all = vec![(id, vec![])];
    let mut level = all.clone();
    for _ in 0..len {
        let mut next = Vec::new();
        for (m, w) in &level {
            for (i, gen) in g.generators.iter().enumerate() {
                if w.last().is_some_and(|&l| g.inverse[l] == i) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(i);
                next.push((mul(*m, (gen.a, gen.b)), w2));
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

#[test]
fn orbital_sum_matches_word_enumeration() {
    // Free group: distinct reduced words are distinct elements.
    let g = FuchsianGroup::schottky_default();
    let len = 6;
    let orbit = Orbit::new(g.clone(), len).unwrap();
    let words = reduced_words(&g, len);
    assert_eq!(words.len(), orbit.enumeration.elements.len());
    let x = disk(0.1, 0.05);
    let x0 = dist(Complex64::new(0.0, 0.0), x.z);
    for frac in [0.3, 0.5, 0.8] {
        let eps = 0.4;
        let t = frac * orbit.certified_radius - eps - 2.0 * x0;
        for constraint in [None, Some(ThetaZero { kappa: 1 }), Some(ThetaZero { kappa: 2 })] {
            let want: f64 = words
                .iter()
                .filter(|(_, w)| {
                    constraint.map_or(true, |c| {
                        (0..c.kappa).all(|k| w.iter().map(|&i| g.theta[i][k]).sum::<i64>() == 0)
                    })
                })
                .map(|(m, _)| dist(x.z, act(*m, x.z)))
                .filter(|d| (d - t).abs() < eps)
                .map(|d| (-d).exp())
                .sum();
            let got = orbital_sum(&orbit, x, t, eps, constraint).unwrap();
            assert!((got - want).abs() < 1e-12 * want.max(1.0), "t = {t} {constraint:?}: {got} vs {want}");
            assert!(want > 0.0 || constraint.is_some());
        }
    }
}

#[test]
fn correlation_integral_matches_monte_carlo() {
    let g = FuchsianGroup::schottky_default();
    let orbit = Orbit::new(g.clone(), 4).unwrap();
    let words = reduced_words(&g, 4);
    let x = DiskPoint::origin();
    let (eps, s): (f64, f64) = (0.3, g.generators[0].translation_length());
    let images: Vec<Complex64> = words.iter().map(|(m, _)| act(*m, x.z)).collect();
    // Uniform on the hyperbolic ball about 0: the area inside radius r is
    // proportional to sinh^2(r/2).
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 400_000;
    let mut hits = 0usize;
    for _ in 0..n {
        let r = 2.0 * (rng.random::<f64>() * (eps / 2.0).sinh().powi(2)).sqrt().asinh();
        let z = Complex64::from_polar((r / 2.0).tanh(), rng.random::<f64>() * 2.0 * PI);
        let th = rng.random::<f64>() * 2.0 * PI;
        // Flow from z: move 0 -> z by w -> (w + z)/(1 + conj(z) w), whose
        // derivative at 0 is real and positive.
        let w = Complex64::from_polar((s / 2.0).tanh(), th);
        let end = (w + z) / (1.0 + z.conj() * w);
        if images.iter().any(|&p| dist(end, p) < eps) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    let scale = 4.0 * PI * (eps / 2.0).sinh().powi(2) * 2.0 * PI;
    let want = p * scale;
    let se = (p * (1.0 - p) / n as f64).sqrt() * scale;
    let got = correlation_integral(&orbit, x, eps, s, QuadratureSpec::default()).unwrap().value;
    assert!(p > 0.01);
    assert!((got - want).abs() < 5.0 * se, "{got} vs {want} (se {se})");
}

#[test]
fn stable_density_integral_matches_closed_form() {
    // With y = 1/x the integrand x^{-2} e^{-1/(pi x)} / pi has antiderivative
    // e^{-1/(pi x)}.
    for &(c, d) in &[(0.01, 1.0), (0.5, 50.0), (1e-3, 1e5), (2.0, 3.0)] {
        let want = (-1.0 / (PI * d)).exp() - (-1.0 / (PI * c)).exp();
        let got = stable_density_check(c, d, 1e-12).unwrap();
        assert!((got - want).abs() < 1e-9, "[{c}, {d}]: {got} vs {want}");
    }
}
