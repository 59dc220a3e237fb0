//! Window sums of the semiflow return counts at time t, against the
//! lower local limit, and the tail outside the window.

use ergolab::builtin;
use ergolab::scalar::parse_rational;
use ergolab::semiflow::{bell_tail_sum, lll_sweep, FiberInterval};

fn main() -> ergolab::Result<()> {
    let sf = builtin::semiflow("roof-walk")?;
    let zero = sf.base.state_index("0").unwrap();
    let interval = FiberInterval::new(parse_rational("0")?, parse_rational("1")?)?;
    let y = parse_rational("0")?;

    let t = parse_rational("200")?;
    for r in lll_sweep(&sf, &[zero], &interval, &t, &[2.0, 5.0, 10.0], &y)? {
        println!(
            "M = {:4}: n in [{}, {}], sum {:.6}, predicted {:.6}, spacing defect {:.3}",
            r.m, r.n_lo, r.n_hi, r.sum, r.predicted_limit, r.spacing_defect
        );
    }

    let t = parse_rational("100")?;
    for b in bell_tail_sum(&sf, &[zero], &interval, &t, &[0.25, 0.5, 1.0, 2.0], &y)? {
        println!("M = {:4}: tail {:.3e} of total {:.6}", b.m, b.tail, b.total);
    }
    Ok(())
}
