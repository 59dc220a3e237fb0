//! Return sequence of the lazy walk on Z, exact and in floating point,
//! with its power sums and regular-variation index.

use ergolab::asymptotics::{partial_power_sum, rv_index_log, SeqPrefix, Window};
use ergolab::markov::return_sequence;
use ergolab::{builtin, scalar};
use num::BigRational;

fn main() -> ergolab::Result<()> {
    let walk = builtin::lazy_walk();

    let exact = return_sequence::<BigRational>(&walk, 6)?;
    for (n, u) in exact.iter().enumerate() {
        println!("u_{} = {}", n + 1, scalar::format_rational(u));
    }

    let u = return_sequence::<f64>(&walk, 4000)?;
    let u = SeqPrefix::nonneg(1, u)?;
    let a1 = partial_power_sum(&u, 1)?;
    let a2 = partial_power_sum(&u, 2)?;
    for n in [10, 100, 1000, 4000] {
        let un = u.get(n).unwrap();
        println!(
            "n = {n:5}  sqrt(pi n) u_n = {:.6}  a_1 = {:.3}  a_2 = {:.4}",
            (std::f64::consts::PI * n as f64).sqrt() * un,
            a1.get(n).unwrap(),
            a2.get(n).unwrap()
        );
    }
    // a_1 is regularly varying of index 1/2; a_2 grows like log n.
    println!("index of a_1 on [400, 4000]: {:.4}", rv_index_log(&a1, Window::new(400, 4000)?, 20)?);
    println!("a_2(4000) - a_2(1000) = {:.5} (1/pi ln 4 = {:.5})", a2.get(4000).unwrap() - a2.get(1000).unwrap(), 4f64.ln() / std::f64::consts::PI);
    Ok(())
}
