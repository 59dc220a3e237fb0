//! Annulus counts restricted to the kernel of the abelianization map, as
//! for a Z^kappa cover, normalized by t^{kappa/2}.

use ergolab::builtin;
use ergolab::hyperbolic::{cover_counting, Orbit};

fn main() -> ergolab::Result<()> {
    let orbit = Orbit::new(builtin::group("schottky")?, 9)?;
    let ts: Vec<f64> = (6..=15).map(|t| t as f64).collect();
    for kappa in [0, 1, 2] {
        let c = cover_counting(&orbit, kappa, &ts, 1.0)?;
        let v: Vec<String> = c.normalized.iter().map(|v| format!("{v:.3}")).collect();
        println!("kappa {kappa}: {}", v.join(" "));
    }
    Ok(())
}
