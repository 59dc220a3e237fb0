//! Builtin desk models, referenced by name from configs.
//!
//! Random walks are encoded by state-splitting: the state is the last step
//! taken, every row of P is the step law, and phi(s, t) is the step of t.

use num::BigRational;

use crate::error::{Error, Result};
use crate::hyperbolic::group::FuchsianGroup;
use crate::markov::MarkovModel;
use crate::scalar::ratio;
use crate::semiflow::SemiflowModel;

fn walk(name: &str, steps: &[(&str, Vec<i64>, BigRational)]) -> MarkovModel {
    let kappa = steps[0].1.len();
    let row: Vec<BigRational> = steps.iter().map(|s| s.2.clone()).collect();
    let n = steps.len();
    let phi = (0..n).map(|_| steps.iter().map(|s| s.1.clone()).collect()).collect();
    MarkovModel::new(
        name,
        steps.iter().map(|s| s.0.to_string()).collect(),
        vec![row; n],
        kappa,
        phi,
    )
    .expect("builtin walk is valid")
}

/// Lazy walk on Z: steps -1, 0, +1 with mass 1/4, 1/2, 1/4.
pub fn lazy_walk() -> MarkovModel {
    walk(
        "lazy-walk",
        &[("-", vec![-1], ratio(1, 4)), ("0", vec![0], ratio(1, 2)), ("+", vec![1], ratio(1, 4))],
    )
}

/// Simple +-1 walk on Z (period 2 in the fiber).
pub fn simple_walk() -> MarkovModel {
    walk("simple-walk", &[("-", vec![-1], ratio(1, 2)), ("+", vec![1], ratio(1, 2))])
}

/// Lazy walk on Z^2: stay with mass 1/2, each unit step with mass 1/8.
pub fn z2_walk() -> MarkovModel {
    walk(
        "z2-walk",
        &[
            ("0", vec![0, 0], ratio(1, 2)),
            ("+e1", vec![1, 0], ratio(1, 8)),
            ("-e1", vec![-1, 0], ratio(1, 8)),
            ("+e2", vec![0, 1], ratio(1, 8)),
            ("-e2", vec![0, -1], ratio(1, 8)),
        ],
    )
}

/// Two-state chain [[0.9, 0.1], [0.2, 0.8]] with no extension.
pub fn biased_chain() -> MarkovModel {
    MarkovModel::new(
        "biased-chain",
        vec!["a".into(), "b".into()],
        vec![vec![ratio(9, 10), ratio(1, 10)], vec![ratio(2, 10), ratio(8, 10)]],
        0,
        vec![vec![vec![]; 2]; 2],
    )
    .expect("builtin chain is valid")
}

/// Uniform two-state full shift with no extension.
pub fn uniform_chain() -> MarkovModel {
    let h = ratio(1, 2);
    MarkovModel::new(
        "uniform-chain",
        vec!["a".into(), "b".into()],
        vec![vec![h.clone(), h.clone()], vec![h.clone(), h]],
        0,
        vec![vec![vec![]; 2]; 2],
    )
    .expect("builtin chain is valid")
}

/// Uniform two-state full shift with phi = +1 on repeats, -1 on switches.
pub fn two_state_shift() -> MarkovModel {
    let h = ratio(1, 2);
    MarkovModel::new(
        "two-state-shift",
        vec!["a".into(), "b".into()],
        vec![vec![h.clone(), h.clone()], vec![h.clone(), h]],
        1,
        vec![vec![vec![1], vec![-1]], vec![vec![-1], vec![1]]],
    )
    .expect("builtin shift is valid")
}

/// Symmetric non-i.i.d. three-state chain with the rotation cocycle
/// a->b->c->a = +1 (reverse direction -1, staying 0).
pub fn cyclic3() -> MarkovModel {
    let (h, q) = (ratio(1, 2), ratio(1, 4));
    let p = vec![
        vec![h.clone(), q.clone(), q.clone()],
        vec![q.clone(), h.clone(), q.clone()],
        vec![q.clone(), q.clone(), h],
    ];
    let phi = vec![
        vec![vec![0], vec![1], vec![-1]],
        vec![vec![-1], vec![0], vec![1]],
        vec![vec![1], vec![-1], vec![0]],
    ];
    MarkovModel::new("cyclic3", vec!["a".into(), "b".into(), "c".into()], p, 1, phi)
        .expect("builtin chain is valid")
}

pub const MODEL_NAMES: &[&str] =
    &["lazy-walk", "simple-walk", "z2-walk", "biased-chain", "uniform-chain", "two-state-shift", "cyclic3"];

pub fn model(name: &str) -> Result<MarkovModel> {
    Ok(match name {
        "lazy-walk" => lazy_walk(),
        "simple-walk" => simple_walk(),
        "z2-walk" => z2_walk(),
        "biased-chain" => biased_chain(),
        "uniform-chain" => uniform_chain(),
        "two-state-shift" => two_state_shift(),
        "cyclic3" => cyclic3(),
        _ => return Err(unknown("model", name, MODEL_NAMES)),
    })
}

pub const SEMIFLOW_NAMES: &[&str] = &["roof-shift", "roof-walk", "skew-roof-walk", "unit-roof-walk"];

pub fn semiflow(name: &str) -> Result<SemiflowModel> {
    Ok(match name {
        "roof-shift" => SemiflowModel::roof_shift(),
        "roof-walk" => SemiflowModel::roof_walk(),
        "skew-roof-walk" => SemiflowModel::skew_roof_walk(),
        "unit-roof-walk" => SemiflowModel::unit_roof(lazy_walk()),
        _ => return Err(unknown("semiflow", name, SEMIFLOW_NAMES)),
    })
}

pub const GROUP_NAMES: &[&str] = &["schottky", "octagon"];

pub fn group(name: &str) -> Result<FuchsianGroup> {
    match name {
        "schottky" => Ok(FuchsianGroup::schottky_default()),
        "octagon" => FuchsianGroup::octagon(),
        _ => Err(unknown("group", name, GROUP_NAMES)),
    }
}

fn unknown(kind: &str, name: &str, known: &[&str]) -> Error {
    Error::Parse(format!("unknown builtin {kind} `{name}` (known: {})", known.join(", ")))
}
