//! Gaussian parameters of a special semiflow over the lazy walk, the local
//! limit constant, and the aperiodicity of the roof.

use ergolab::builtin;
use ergolab::markov::return_sequence;
use ergolab::semiflow::{aperiodicity_check, gaussian_parameters, SemiflowModel};

fn main() -> ergolab::Result<()> {
    for name in ["roof-shift", "roof-walk"] {
        let sf = builtin::semiflow(name)?;
        let g = gaussian_parameters(&sf, 2000)?;
        let ap = aperiodicity_check(&sf, None);
        println!("{name}: mean roof {}  f_X(0) = {:.6}  covariance {:?}", sf.mean_roof(), g.fx0, g.covariance);
        println!("  {:?}, nonsingular {}", ap.verdict, ap.nonsingular);
    }

    let walk = builtin::lazy_walk();
    let fx0 = gaussian_parameters(&SemiflowModel::unit_roof(walk.clone()), 2000)?.fx0;
    let u = return_sequence::<f64>(&walk, 1000)?;
    for n in [250, 500, 1000] {
        println!("n = {n:4}: sqrt(n) u_n = {:.6} against f_X(0) = {fx0:.6}", (n as f64).sqrt() * u[n - 1]);
    }
    Ok(())
}
