//! Multiple correlations of cylinder sets and the rational weak mixing
//! defect on the lazy walk.

use ergolab::markov::{multi_correlation, return_sequence, rwm_defect, Cylinder, FiberedSet};
use ergolab::{builtin, scalar};
use num::BigRational;

fn main() -> ergolab::Result<()> {
    let walk = builtin::lazy_walk();
    let zero = walk.state_index("0").unwrap();
    let plus = walk.state_index("+").unwrap();
    // [0, +] at time 0 in fiber 0.
    let b = FiberedSet::single(Cylinder::new(0, vec![zero, plus], Some(vec![0])));
    println!("m(B) = {}", scalar::format_rational(&b.measure::<BigRational>(&walk)?));

    // m(B and T^{-k} B and T^{-2k} B) against m(B)^3 u_k^2.
    let sets = vec![b.clone(); 3];
    let u = return_sequence::<f64>(&walk, 40)?;
    let mb: f64 = b.measure(&walk)?;
    for k in [5, 10, 20, 40] {
        let c: f64 = multi_correlation(&walk, &sets, k as i64, &[0, 0, 0])?;
        println!("k = {k:2}  correlation {c:.3e}  m(B)^3 u_k^2 {:.3e}", mb.powi(3) * u[k - 1].powi(2));
    }

    for row in rwm_defect(&walk, &sets, &[0, 0, 0], &[250, 500, 1000, 2000])? {
        println!("n = {:4}  defect {:.5}  a_2(n) = {:.4}", row.n, row.defect, row.a_d);
    }
    Ok(())
}
