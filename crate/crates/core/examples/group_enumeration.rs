//! Word enumeration of the Schottky and octagon groups, growth by length,
//! and the word-metric band rho(0, g 0)/l(g).

use ergolab::builtin;
use ergolab::hyperbolic::enumerate_group;
use ergolab::hyperbolic::orbital::word_metric_levels;

fn main() -> ergolab::Result<()> {
    for (name, max_len) in [("schottky", 7), ("octagon", 4)] {
        let group = builtin::group(name)?;
        let e = enumerate_group(&group, max_len)?;
        println!("{name}: rank {}, new elements per length {:?}", group.rank(), e.count_by_length());
        if let Some(defect) = group.relator_defect() {
            println!("  relator distance from the identity {defect:.2e}");
        }
        for (l, lo, hi) in word_metric_levels(&e) {
            println!("  length {l}: rho(0, g 0)/l in [{lo:.4}, {hi:.4}]");
        }
    }
    Ok(())
}
