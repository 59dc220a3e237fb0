//! First and second moments of the correlation counting function on the
//! zero fiber, normalized by a_d(n).

use ergolab::builtin;
use ergolab::farey::psi_moments;
use ergolab::markov::FiberedSet;

fn main() -> ergolab::Result<()> {
    let walk = builtin::lazy_walk();
    let omega = FiberedSet::zero_fiber(&walk);
    for nu in 0..=2 {
        for m in psi_moments::<f64>(&walk, &omega, 2, nu, &[50, 100, 200])? {
            println!(
                "nu {nu} n {:3}: first/a_2 = {:.4}  second/a_2^2 = {:.4}",
                m.n,
                m.first / m.a_d,
                m.second / (m.a_d * m.a_d)
            );
        }
    }
    Ok(())
}
