//! Farey sequences, the ordering bijections they induce on the slots
//! j k + eps l, and the step vectors of each ordering.

use ergolab::farey::{all_orderings, check_partition, farey_sequence, step_vectors, verify_ordering_domain};

fn main() -> ergolab::Result<()> {
    let d = 3;
    let fs = farey_sequence(d)?;
    let fr: Vec<String> = fs.fractions.iter().map(|(p, q)| format!("{p}/{q}")).collect();
    println!("F_{d} = {}", fr.join(" "));

    let pis = all_orderings(d)?;
    for pi in &pis {
        let (lo, hi) = pi.slope_interval;
        let slots: Vec<String> = pi.pairs.iter().map(|(k, e)| format!("{k}k+{e}l")).collect();
        let sv = step_vectors(pi)?;
        println!(
            "pi_{} on ({}/{}, {}/{}]: {}  steps {:?}  pairing {:?}",
            pi.j, lo.0, lo.1, hi.0, hi.1, slots.join(" <= "), sv.vectors, sv.pairing
        );
        if let Err(c) = verify_ordering_domain(pi, 200) {
            println!("  counterexample at k = {}, l = {}", c.k, c.l);
        }
    }
    match check_partition(&pis, 200) {
        None => println!("domains partition {{k <= l <= 200}}"),
        Some((k, l, n)) => println!("({k}, {l}) covered {n} times"),
    }
    Ok(())
}
