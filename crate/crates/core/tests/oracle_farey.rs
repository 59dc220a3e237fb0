//! Farey sequences and orderings against brute force.

use ergolab::farey::{all_orderings, det, farey_sequence, slot_value, step_vectors, Slot};
use num::integer::gcd;

fn farey_brute(d: u64) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> =
        (1..=d).flat_map(|q| (0..=q).map(move |p| (p, q))).filter(|&(p, q)| gcd(p, q) == 1).collect();
    v.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    v
}

#[test]
fn farey_sequences_match_brute_force() {
    for d in 1..=30 {
        let f = farey_sequence(d).unwrap();
        assert_eq!(f.fractions, farey_brute(d), "d = {d}");
        for w in f.fractions.windows(2) {
            assert_eq!(w[1].0 * w[0].1 - w[0].0 * w[1].1, 1, "neighbours {w:?}");
        }
    }
    assert_eq!(farey_sequence(5).unwrap().intervals(), 10);
}

#[test]
fn orderings_match_sorting_at_the_mediant() {
    for d in 1..=9u64 {
        for pi in all_orderings(d).unwrap() {
            // The mediant has denominator above d, so no two slots tie there.
            let ((p0, q0), (p1, q1)) = pi.slope_interval;
            let (k, l) = (p0 + p1, q0 + q1);
            let mut slots: Vec<Slot> = (1..=d).flat_map(|c| [(c, 0u8), (c, 1u8)]).collect();
            slots.sort_by_key(|s| slot_value(k, l, *s));
            assert_eq!(pi.pairs, slots, "d = {d} j = {}", pi.j);
            assert!(pi.orders(k, l) && pi.in_interval(k, l));
            // The right end is included, the left end is not.
            if p1 > 0 {
                assert!(pi.orders(p1, q1) && pi.in_interval(p1, q1));
            }
            if p0 > 0 {
                assert!(!pi.orders(p0, q0) && !pi.in_interval(p0, q0));
            }
        }
    }
}

#[test]
fn step_vectors_for_order_one() {
    let pis = all_orderings(1).unwrap();
    assert_eq!(pis.len(), 1);
    let sv = step_vectors(&pis[0]).unwrap();
    assert_eq!(sv.vectors, vec![(1, 0), (-1, 1)]);
    assert_eq!(det(sv.vectors[0], sv.vectors[1]), 1);
}

#[test]
fn step_vectors_telescope() {
    for d in 1..=7u64 {
        for pi in all_orderings(d).unwrap() {
            let sv = step_vectors(&pi).unwrap();
            let (a, b) = sv.vectors.iter().fold((0, 0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
            let (c, e) = *pi.pairs.last().unwrap();
            let want = if e == 0 { (c as i64, 0) } else { (0, c as i64) };
            assert_eq!((a, b), want);
            assert_eq!(sv.pairing.len() * 2, sv.vectors.len());
            assert!(sv.pairing.iter().all(|&(i, j)| det(sv.vectors[i], sv.vectors[j]) != 0));
        }
    }
}
