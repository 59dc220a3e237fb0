//! Correlations of a geodesic-flow neighborhood against orbital sums over
//! annuli, and the multiple-correlation bound for two gaps.

use ergolab::builtin;
use ergolab::hyperbolic::{annulus_sandwich, multi_correlation_geodesic, DiskPoint, Orbit, QuadratureSpec};

fn main() -> ergolab::Result<()> {
    let orbit = Orbit::new(builtin::group("schottky")?, 8)?;
    println!("certified radius {:.2}", orbit.certified_radius);
    let x = DiskPoint::origin();
    let q = QuadratureSpec::default();
    for s in [4.0, 6.0, 8.0] {
        let w = annulus_sandwich(&orbit, x, 0.5, s, q)?;
        println!(
            "s = {s}: integral {:.4e}, inner sum {:.4e}, outer sum {:.4e}",
            w.integral, w.lower_sum, w.upper_sum
        );
    }
    let m = multi_correlation_geodesic(&orbit, x, 0.5, &[2.6, 5.3], q)?;
    println!("gaps [2.6, 5.3]: lhs {:.4e}, product {:.4e}, ratio {:.4e}", m.lhs, m.rhs_product, m.ratio);
    Ok(())
}
