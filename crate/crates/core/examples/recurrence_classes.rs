//! d-recurrence against dissipativity from fitted decay exponents, on
//! Z and Z^2 walks.

use ergolab::builtin;
use ergolab::markov::recurrence_classify;

fn main() -> ergolab::Result<()> {
    let cases = [("lazy-walk", 1, 10_000), ("lazy-walk", 2, 10_000), ("lazy-walk", 3, 10_000), ("z2-walk", 1, 600), ("z2-walk", 2, 600)];
    for (name, d, n_max) in cases {
        let model = builtin::model(name)?;
        let r = recurrence_classify(&model, d, n_max, 0.1)?;
        println!(
            "{name:10} kappa {} d {d}: {:?}  (u_n decay {:.3}, d p = {:.3}, harmonic {})",
            model.kappa, r.verdict, r.p, r.pd, r.harmonic
        );
    }
    Ok(())
}
