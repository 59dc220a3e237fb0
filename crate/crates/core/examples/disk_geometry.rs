//! Poincare disk geometry: distances, the geodesic flow on line elements,
//! hyperbolic balls and the angle windows they subtend.

use ergolab::hyperbolic::{angle_windows, ball_euclid, chi, geodesic_flow, hyp_dist, lambda_len, mobius_act, DiskPoint, LineElement, MobiusMap};

fn main() -> ergolab::Result<()> {
    let x = DiskPoint::polar(1.0, 0.3)?;
    let y = DiskPoint::polar(2.5, 2.0)?;
    let g = MobiusMap::to_point(DiskPoint::polar(0.7, 1.1)?).compose(&MobiusMap::rotation(0.4));
    println!("rho(x, y) = {:.12}, rho(gx, gy) = {:.12}", hyp_dist(x, y), hyp_dist(g.apply(x), g.apply(y)));

    let le = LineElement::new(x, 0.9);
    let a = geodesic_flow(&geodesic_flow(&le, 1.5), 2.0);
    let b = geodesic_flow(&le, 3.5);
    println!("phi^2 phi^1.5 = ({:.9}, {:.9}), phi^3.5 = ({:.9}, {:.9})", a.base.z, a.angle, b.base.z, b.angle);
    // chi phi^t chi = phi^{-t}, and Mobius maps commute with the flow.
    let back = chi(&geodesic_flow(&chi(&mobius_act(&g, &b)), 3.5));
    println!("chi phi^3.5 chi g phi^3.5 = g: base gap {:.2e}", (back.base.z - g.apply(x).z).norm());

    let (center, radius) = ball_euclid(DiskPoint::polar(3.0, 0.0)?, 0.5)?;
    println!("N(w, 0.5) at rho(0, w) = 3 is the Euclidean ball B({center:.6}, {radius:.6})");

    for rho in [2.0, 4.0, 8.0] {
        let w = DiskPoint::polar(rho, 0.0)?;
        let eta = 0.01;
        let (lam, j) = angle_windows(w, eta, rho)?;
        println!(
            "rho {rho}: |Lambda| = {lam:.4e}, |J| at s = rho {j:.4e}, |Lambda|/(eta (1-|w|^2)) = {:.5}",
            lambda_len(w, eta)? / (eta * (1.0 - w.z.norm_sqr()))
        );
    }
    Ok(())
}
