//! Experiment dispatch. Each experiment fills its defaults, computes, and
//! returns a report with tables and verdicts.

use std::path::{Path, PathBuf};

use num::{BigRational, ToPrimitive};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{doubling_check, log_grid, partial_power_sum, rv_index_log, SeqPrefix, Window};
use crate::builtin;
use crate::error::{Error, Result};
use crate::farey::{self, all_orderings, check_partition, farey_sequence, slot_value, step_vectors, verify_ordering_domain};
use crate::hyperbolic::{
    self, annulus_sandwich, ball_euclid, chi, cover_counting, enumerate_group, geodesic_flow, hyp_dist, j_len, lambda_len,
    mobius_act, multi_correlation_geodesic, DiskPoint, Enumeration, FuchsianGroup, LineElement,
    MobiusMap, Orbit, QuadratureSpec,
};
use crate::markov::{
    self, admissibility_band, induced_return_distribution, recurrence_classify, rwm_defect, stable_density_check,
    transfer_apply, Cylinder, FiberedSet, MarkovModel, ModelDef, Recurrence, StepFunction,
};
use crate::scalar::{parse_rational, Backend};
use crate::semiflow::{
    aperiodicity_check, bell_tail_sum, flow_return_sequence, gaussian_parameters, lll_sweep, llt_lattice_check,
    Aperiodicity, FiberInterval, FlowReturn, SemiflowDef, SemiflowModel,
};

use super::config::{suggest, Experiment, ExperimentConfig};
use super::report::{Report, Table};

/// Every tag a report can carry. The default suite covers all of them.
pub const IN_SCOPE_TAGS: &[&str] = &[
    "return-sequence",
    "power-sums",
    "induced-return",
    "stable-density",
    "multiple-correlation",
    "rwm-defect",
    "admissibility",
    "transfer-duality",
    "recurrence-classification",
    "ordering-domains",
    "step-vectors",
    "psi-moment-bounds",
    "local-limit",
    "flow-return",
    "aperiodicity",
    "lower-local-limit",
    "window-spacing",
    "bell-tail",
    "disk-geometry",
    "angle-windows",
    "word-metric",
    "orbital-sandwich",
    "multi-correlation-bound",
    "cover-counting",
];

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Renewal => renewal(cfg),
        Experiment::Correlation => correlation(cfg),
        Experiment::Recurrence => recurrence(cfg),
        Experiment::Farey => farey_exp(cfg),
        Experiment::PsiMoments => psi(cfg),
        Experiment::SemiflowLlt => semiflow_llt(cfg),
        Experiment::Lll => lll(cfg),
        Experiment::Bell => bell(cfg),
        Experiment::HypGeometry => hyp_geometry(cfg),
        Experiment::GroupEnum => group_enum(cfg),
        Experiment::Orbital => orbital(cfg),
        Experiment::CoverCount => cover_count(cfg),
    }
}

// ---- model resolution ----

pub fn resolve_model(name: &str) -> Result<MarkovModel> {
    if builtin::MODEL_NAMES.contains(&name) {
        return builtin::model(name);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::Parse(format!(
            "model `{name}` is neither a builtin nor a file{}",
            suggest(name, builtin::MODEL_NAMES)
        )));
    }
    let text = std::fs::read_to_string(path)?;
    MarkovModel::from_def(&ModelDef::parse(&text)?)
}

pub fn resolve_semiflow(name: &str) -> Result<SemiflowModel> {
    if builtin::SEMIFLOW_NAMES.contains(&name) {
        return builtin::semiflow(name);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::Parse(format!(
            "semiflow `{name}` is neither a builtin nor a file{}",
            suggest(name, builtin::SEMIFLOW_NAMES)
        )));
    }
    let def: SemiflowDef = toml::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Parse(e.to_string()))?;
    SemiflowModel::from_def(&def)
}

fn model_of(cfg: &ExperimentConfig, default: &str) -> Result<MarkovModel> {
    resolve_model(cfg.model.as_deref().unwrap_or(default))
}

fn semiflow_of(cfg: &ExperimentConfig, default: &str) -> Result<SemiflowModel> {
    resolve_semiflow(cfg.semiflow.as_deref().unwrap_or(default))
}

fn word_of(model: &MarkovModel, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            model.state_index(n).ok_or_else(|| {
                let known: Vec<&str> = model.states.iter().map(String::as_str).collect();
                Error::Parse(format!("unknown state `{n}` in model `{}`{}", model.name, suggest(n, &known)))
            })
        })
        .collect()
}

fn rational(s: &str) -> Result<BigRational> {
    parse_rational(s)
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn b(x: bool) -> f64 {
    if x {
        1.0
    } else {
        0.0
    }
}

/// True when each value is at most (1 + jitter) times its predecessor.
fn decreasing_with_jitter(v: &[f64], jitter: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + jitter))
}

const EXACT_GUARD: usize = 400;

fn returns(model: &MarkovModel, n_max: usize, backend: Backend) -> Result<Vec<f64>> {
    match backend {
        Backend::Float => markov::return_sequence::<f64>(model, n_max),
        Backend::Exact => {
            if n_max > EXACT_GUARD {
                return Err(Error::Resource(format!("exact backend is limited to n <= {EXACT_GUARD}; use float")));
            }
            Ok(markov::return_sequence::<BigRational>(model, n_max)?.iter().map(f).collect())
        }
    }
}

// ---- markov ----

fn renewal(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["return-sequence", "power-sums", "induced-return", "stable-density"]);
    let model = model_of(cfg, "lazy-walk")?;
    let p = &cfg.params;
    let n_max = p.n_max.unwrap_or(1000);
    let d = p.d.unwrap_or(2) as u32;
    let k = model.kappa as f64;
    let u = returns(&model, n_max, cfg.backend)?;
    let up = SeqPrefix::nonneg(1, u.clone())?;
    let a1 = partial_power_sum(&up, 1)?;
    let ad = partial_power_sum(&up, d)?;
    let ns = p.ns.clone().unwrap_or_else(|| log_grid(1, n_max, 40));
    let mut t = Table::new(
        "sequence",
        &[("n", ""), ("u", "mass of [phi_n = 0]"), ("a_1", "sum u_k"), ("a_d", "sum u_k^d"), ("llt", "n^{kappa/2} u_n")],
    );
    for &n in &ns {
        let (Some(un), Some(x1), Some(xd)) = (up.get(n), a1.get(n), ad.get(n)) else {
            return Err(Error::Range(format!("n = {n} outside 1..={n_max}")));
        };
        t.push(vec![n as f64, un, x1, xd, (n as f64).powf(k / 2.0) * un]);
    }
    r.tables.push(t);

    if n_max >= 100 && model.kappa <= 1 {
        let w = Window::new(n_max / 10, n_max)?;
        let idx = rv_index_log(&a1, w, 20)?;
        let pred = if model.kappa == 0 { 1.0 } else { 0.5 };
        r.verdict("rv-index", (idx - pred).abs() < 0.05, format!("index of a_1 on [{}, {n_max}] = {idx:.4}, expected {pred}", w.start));
        let band = doubling_check(&a1, Window::new(n_max / 10, n_max / 2)?)?;
        r.verdict("doubling", band.within(1.0, 2.0), format!("a_1(2n)/a_1(n) in [{:.4}, {:.4}]", band.low, band.high));
    }

    if model.kappa >= 1 {
        let m = n_max.min(2000);
        let first: Vec<f64> = match cfg.backend {
            Backend::Float => induced_return_distribution::<f64>(&model, m)?,
            Backend::Exact if m <= EXACT_GUARD => {
                induced_return_distribution::<BigRational>(&model, m)?.iter().map(f).collect()
            }
            Backend::Exact => return Err(Error::Resource(format!("exact backend is limited to n <= {EXACT_GUARD}"))),
        };
        let mut t = Table::new("first-return", &[("n", ""), ("probability", "P(return time = n)"), ("cumulative", "P(return time <= n)")]);
        let mut cum = 0.0;
        let mut cums = Vec::new();
        for (i, q) in first.iter().enumerate() {
            cum += q;
            cums.push(cum);
            if ns.contains(&(i + 1)) {
                t.push(vec![(i + 1) as f64, *q, cum]);
            }
        }
        r.tables.push(t);
        let ok = cums.windows(2).all(|w| w[1] >= w[0]) && cum <= 1.0 + 1e-12;
        r.verdict("first-return-mass", ok, format!("mass returned by n = {m}: {cum:.6}"));
    }

    let tol = cfg.tolerance();
    let v = stable_density_check(1e-6, 1e6, 1e-10)?;
    let mut t = Table::new("stable", &[("c", ""), ("d", ""), ("value", "integral of f(x) x^{-1/2}")]);
    t.push(vec![1e-6, 1e6, v]);
    r.tables.push(t);
    r.verdict("stable-density", (v - 1.0).abs() < tol, format!("integral over [1e-6, 1e6] = {v:.8}"));
    Ok(r)
}

fn fiber_cylinder(model: &MarkovModel, word: Vec<usize>) -> FiberedSet {
    FiberedSet::single(Cylinder::new(0, word, Some(vec![0; model.kappa])))
}

fn correlation(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["multiple-correlation", "rwm-defect", "admissibility", "transfer-duality"]);
    let model = model_of(cfg, "lazy-walk")?;
    let p = &cfg.params;
    let d = p.d.unwrap_or(2);
    let tol = cfg.tolerance();
    // Without a word, every zero-fiber cylinder of length <= 2.
    let words: Vec<Vec<usize>> = match &p.word {
        Some(w) => vec![word_of(&model, w)?],
        None => short_words(model.n_states()),
    };
    let ns = p.ns.clone().unwrap_or_else(|| vec![500, 1000, 2000]);

    // Multiple correlations of the zero fiber against u_k^d.
    let omega = FiberedSet::zero_fiber(&model);
    let k_max = 16;
    let sets = vec![omega.clone(); d + 1];
    let shifts = p.shifts.clone().unwrap_or_else(|| vec![0; d + 1]);
    if shifts.len() != d + 1 {
        return Err(Error::Parse(format!("params.shifts needs d + 1 = {} entries", d + 1)));
    }
    let u = returns(&model, k_max, Backend::Float)?;
    let mut t = Table::new("correlation", &[("k", ""), ("value", "m(intersection)"), ("u_k^d", "")]);
    for k in 1..=k_max {
        let v = match cfg.backend {
            Backend::Float => markov::multi_correlation::<f64>(&model, &sets, k as i64, &shifts)?,
            Backend::Exact => f(&markov::multi_correlation::<BigRational>(&model, &sets, k as i64, &shifts)?),
        };
        t.push(vec![k as f64, v, u[k - 1].powi(d as i32)]);
    }
    r.tables.push(t);

    // Defect for every d' <= d; the verdict takes the worst cylinder at each n.
    let mut t = Table::new(
        "rwm-defect",
        &[("d", ""), ("word", "cylinder index"), ("n", ""), ("defect", "relative to a_d(n)"), ("a_d", "sum u_k^d")],
    );
    for dd in 1..=d {
        let per_word: Vec<Vec<markov::correlation::RwmDefect>> = words
            .par_iter()
            .map(|w| rwm_defect(&model, &vec![fiber_cylinder(&model, w.clone()); dd + 1], &vec![0; dd + 1], &ns))
            .collect::<Result<_>>()?;
        let mut worst = vec![0.0f64; ns.len()];
        for (wi, rows) in per_word.iter().enumerate() {
            for (i, x) in rows.iter().enumerate() {
                t.push(vec![dd as f64, wi as f64, x.n as f64, x.defect, x.a_d]);
                worst[i] = worst[i].max(x.defect);
            }
        }
        let ok = per_word.iter().all(|rows| {
            let v: Vec<f64> = rows.iter().map(|x| x.defect).collect();
            decreasing_with_jitter(&v, 0.1) && *v.last().unwrap() < tol
        });
        r.verdict(
            &format!("rwm-defect-d{dd}"),
            ok,
            format!("{} cylinders, worst defects {worst:.4?} over n = {ns:?}", words.len()),
        );
    }
    r.tables.push(t);

    // Admissibility band of the zero fiber.
    let [w0, w1] = p.window.unwrap_or([20, 400]);
    let adm = admissibility_band(&model, &omega, d, Window::new(w0, w1)?)?;
    let mut t = Table::new("admissibility", &[("n", ""), ("value", "m(multi)/u(n)^d"), ("lower", ""), ("upper", "")]);
    if let Some(band) = adm.band {
        for &(n, v) in &adm.ratios {
            t.push(vec![n as f64, v, band.low, band.high]);
        }
        r.verdict(
            "admissibility",
            band.low > 0.0 && band.high.is_finite(),
            format!("band [{:.4}, {:.4}] on [{w0}, {w1}], {} parity skips", band.low, band.high, adm.skipped.len()),
        );
    } else {
        r.verdict("admissibility", false, "no measurable n in window");
    }
    r.tables.push(t);

    // Duality <T 1_A, 1_B> = m(A and T^{-1} B), exactly, on short cylinders.
    let (pairs, bad) = duality_audit(&model)?;
    let mut t = Table::new("duality", &[("pairs", ""), ("mismatches", "")]);
    t.push(vec![pairs as f64, bad as f64]);
    r.tables.push(t);
    r.verdict("transfer-duality", bad == 0, format!("{pairs} cylinder pairs, {bad} mismatches"));
    Ok(r)
}

/// Words of length 1 and 2, in lexicographic order within each length.
pub fn short_words(n: usize) -> Vec<Vec<usize>> {
    let mut words: Vec<Vec<usize>> = (0..n).map(|s| vec![s]).collect();
    for s in 0..n {
        for t in 0..n {
            words.push(vec![s, t]);
        }
    }
    words
}

/// All pairs of zero-fiber cylinders of length <= 2.
pub fn duality_audit(model: &MarkovModel) -> Result<(usize, usize)> {
    let words = short_words(model.n_states());
    let (mut pairs, mut bad) = (0, 0);
    for a in &words {
        for bw in &words {
            let sa = fiber_cylinder(model, a.clone());
            let sb = fiber_cylinder(model, bw.clone());
            let ta = transfer_apply::<BigRational>(model, &StepFunction::indicator(model, &sa)?, 1)?;
            let lhs = ta.mul(model, &StepFunction::indicator(model, &sb)?).integral(model)?;
            let rhs = markov::multi_correlation::<BigRational>(model, &[sa, sb], 1, &[0, 0])?;
            pairs += 1;
            if lhs != rhs {
                bad += 1;
            }
        }
    }
    Ok((pairs, bad))
}

fn recurrence(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["recurrence-classification"]);
    let model = model_of(cfg, "lazy-walk")?;
    let p = &cfg.params;
    let d = p.d.unwrap_or(2) as u32;
    // The kappa = 2 lattice box grows like n^2 cells, so its default prefix is shorter.
    let n_max = p.n_max.unwrap_or(if model.kappa >= 2 { 1000 } else { 10_000 });
    let tol = cfg.tolerance();
    let rep = recurrence_classify(&model, d, n_max, tol)?;
    // u_n ~ n^{-kappa/2}: recurrent iff kappa d / 2 <= 1.
    let predicted = if model.kappa as u32 * d <= 2 { Recurrence::Recurrent } else { Recurrence::Dissipative };
    let mut t = Table::new("fit", &[("d", ""), ("p", "decay exponent of u_n"), ("pd", ""), ("log_slope", "da_d/dlog n"), ("increment_exponent", ""), ("harmonic", "flag")]);
    t.push(vec![d as f64, rep.p, rep.pd, rep.log_slope, rep.increment_exponent, b(rep.harmonic)]);
    r.tables.push(t);
    let mut t = Table::new("a_d", &[("n", ""), ("a_d", "sum u_k^d")]);
    for n in log_grid(1, n_max, 30) {
        t.push(vec![n as f64, rep.a_d.get(n).unwrap()]);
    }
    r.tables.push(t);
    r.verdict(
        "classification",
        rep.verdict == predicted,
        format!("kappa = {}, d = {d}: {:?} (fitted p d = {:.3}), expected {:?}", model.kappa, rep.verdict, rep.pd, predicted),
    );
    if model.kappa as u32 * d == 2 && n_max >= 10_000 {
        let (lo, hi) = (n_max / 100, n_max);
        let growth = rep.a_d.get(hi).unwrap() - rep.a_d.get(lo).unwrap();
        let fitted = rep.log_slope * 100f64.ln();
        r.verdict(
            "log-growth",
            ((growth - fitted) / fitted).abs() < 0.1,
            format!("a_d({hi}) - a_d({lo}) = {growth:.5}, c ln 100 = {fitted:.5}"),
        );
    }
    Ok(r)
}

fn farey_exp(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["ordering-domains", "step-vectors"]);
    let p = &cfg.params;
    let d_max = p.d.unwrap_or(4) as u64;
    let bound = p.bound.unwrap_or(300);
    let mut seqs = Table::new("farey", &[("d", ""), ("size", "|F_d|"), ("unimodular", "flag")]);
    let mut t = Table::new(
        "orderings",
        &[("d", ""), ("j", ""), ("slope_lo", ""), ("slope_hi", ""), ("domain_size", "pairs k <= l <= bound"), ("min_abs_det", "over the pairing")],
    );
    let (mut dom_fail, mut part_fail, mut zero_vec, mut no_pair, mut tele_fail) = (vec![], vec![], 0, vec![], 0);
    for d in 1..=d_max {
        let fs = farey_sequence(d)?;
        let unimodular = fs.fractions.windows(2).all(|w| (w[1].0 * w[0].1) as i64 - (w[0].0 * w[1].1) as i64 == 1);
        seqs.push(vec![d as f64, fs.fractions.len() as f64, b(unimodular)]);
        let pis = all_orderings(d)?;
        for pi in &pis {
            if let Err(c) = verify_ordering_domain(pi, bound) {
                dom_fail.push((d, pi.j, c.k, c.l));
            }
            let (lo, hi) = pi.slope_interval;
            let size = (1..=bound).map(|l| (1..=l).filter(|&k| pi.in_interval(k, l)).count()).sum::<usize>();
            let min_det = match step_vectors(pi) {
                Ok(sv) => {
                    zero_vec += sv.vectors.iter().filter(|v| **v == (0, 0)).count();
                    // Partial sums of the step vectors reproduce the slot values.
                    for l in 1..=20u64 {
                        for k in 1..=l {
                            let mut acc = 0i64;
                            for (j, a) in sv.vectors.iter().enumerate() {
                                acc += a.0 * k as i64 + a.1 * l as i64;
                                if acc != slot_value(k, l, pi.pairs[j]) as i64 {
                                    tele_fail += 1;
                                }
                            }
                        }
                    }
                    sv.pairing.iter().map(|&(i, j)| farey::det(sv.vectors[i], sv.vectors[j]).abs()).min().unwrap_or(0) as f64
                }
                Err(_) => {
                    no_pair.push((d, pi.j));
                    0.0
                }
            };
            t.push(vec![d as f64, pi.j as f64, lo.0 as f64 / lo.1 as f64, hi.0 as f64 / hi.1 as f64, size as f64, min_det]);
        }
        if let Some(c) = check_partition(&pis, bound) {
            part_fail.push((d, c));
        }
    }
    r.tables.push(seqs);
    r.tables.push(t);
    r.verdict("ordering-domains", dom_fail.is_empty(), format!("d <= {d_max}, bound {bound}: counterexamples {dom_fail:?}"));
    r.verdict("partition", part_fail.is_empty(), format!("pairs covered other than once: {part_fail:?}"));
    r.verdict("step-vectors-nonzero", zero_vec == 0, format!("{zero_vec} zero step vectors"));
    r.verdict("independent-pairing", no_pair.is_empty(), format!("orderings without a pairing: {no_pair:?}"));
    r.verdict("telescoping", tele_fail == 0, format!("{tele_fail} partial-sum mismatches on k <= l <= 20"));
    Ok(r)
}

fn psi(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["psi-moment-bounds"]);
    let model = model_of(cfg, "lazy-walk")?;
    let p = &cfg.params;
    let d = p.d.unwrap_or(2);
    let nus: Vec<usize> = p.nu.map_or_else(|| (0..=d).collect(), |v| vec![v]);
    let ns = p.ns.clone().unwrap_or_else(|| vec![50, 100, 200, 400]);
    let tol = cfg.tolerance();
    let omega = FiberedSet::zero_fiber(&model);
    let mut t = Table::new(
        "moments",
        &[("nu", ""), ("n", ""), ("first", "integral over Omega"), ("second", "integral over Omega"), ("a_d", ""), ("first_ratio", "first/a_d"), ("second_ratio", "second/a_d^2")],
    );
    for nu in nus {
        let ms: Vec<(usize, f64, f64, f64)> = match cfg.backend {
            Backend::Float => farey::psi_moments::<f64>(&model, &omega, d, nu, &ns)?.into_iter().map(|m| (m.n, m.first, m.second, m.a_d)).collect(),
            Backend::Exact => farey::psi_moments::<BigRational>(&model, &omega, d, nu, &ns)?
                .into_iter()
                .map(|m| (m.n, f(&m.first), f(&m.second), f(&m.a_d)))
                .collect(),
        };
        let mut r1 = Vec::new();
        let mut r2 = Vec::new();
        for (n, a, s, ad) in &ms {
            r1.push(a / ad);
            r2.push(s / (ad * ad));
            t.push(vec![nu as f64, *n as f64, *a, *s, *ad, a / ad, s / (ad * ad)]);
        }
        let drift = |v: &[f64]| v.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
        let (d1, d2) = (drift(&r1), drift(&r2));
        r.verdict(
            &format!("psi-bands-nu{nu}"),
            d1 < tol && d2 < tol && r1.iter().chain(&r2).all(|v| *v > 0.0 && v.is_finite()),
            format!("first/a_d in [{:.4}, {:.4}], second/a_d^2 in [{:.4}, {:.4}], max drift {:.4}", min(&r1), max(&r1), min(&r2), max(&r2), d1.max(d2)),
        );
    }
    r.tables.push(t);
    Ok(r)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

// ---- semiflow ----

fn semiflow_llt(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["local-limit", "flow-return", "aperiodicity"]);
    let sf = semiflow_of(cfg, "roof-walk")?;
    let base = &sf.base;
    let p = &cfg.params;
    let ns = p.ns.clone().unwrap_or_else(|| vec![250, 500, 1000]);
    let n_fit = p.n_fit.unwrap_or(2000);
    let tol = cfg.tolerance();
    let k = base.kappa as f64;
    let n_max = *ns.iter().max().unwrap();
    let g_base = gaussian_parameters(&SemiflowModel::unit_roof(base.clone()), n_fit)?;
    let u = returns(base, n_max, Backend::Float)?;
    let mut t = Table::new("llt", &[("n", ""), ("measured", "n^{kappa/2} u_n"), ("predicted", "f_X(0)"), ("rel_error", "")]);
    let mut errs = Vec::new();
    for &n in &ns {
        let m = (n as f64).powf(k / 2.0) * u[n - 1];
        let e = (m - g_base.fx0).abs() / g_base.fx0;
        errs.push(e);
        t.push(vec![n as f64, m, g_base.fx0, e]);
    }
    r.tables.push(t);
    r.verdict(
        "llt-zero",
        decreasing_with_jitter(&errs, 0.0) && *errs.last().unwrap() < tol,
        format!("relative errors {errs:.5?}"),
    );

    // Off-center lattice point t_n = floor(sqrt n) e_1 from the first state.
    if base.kappa >= 1 {
        let mut t = Table::new("llt-offset", &[("n", ""), ("measured", "n^{kappa/2} P(phi_n = t_n)"), ("predicted", "f_X(t_n/sqrt n)"), ("rel_error", "")]);
        let mut last = f64::NAN;
        for &n in &ns {
            let mut tn = vec![0i64; base.kappa];
            tn[0] = (n as f64).sqrt().floor() as i64;
            let c = llt_lattice_check(base, &[0], &tn, n)?;
            last = c.rel_error;
            t.push(vec![n as f64, c.measured, c.predicted, c.rel_error]);
        }
        r.tables.push(t);
        r.verdict("llt-offset", last < 0.05, format!("relative error at n = {n_max}: {last:.5}"));
    }

    let g = gaussian_parameters(&sf, n_fit)?;
    let det = det(&g.covariance);
    let closed = (2.0 * std::f64::consts::PI).powf(-k / 2.0) / det.sqrt();
    let kap = f(&sf.mean_roof());
    let mut t = Table::new("gaussian", &[("kappa", ""), ("varkappa", "mean roof"), ("fx0", "density of X at 0"), ("det_cov", ""), ("var_y", ""), ("y_degenerate", "flag")]);
    t.push(vec![k, kap, g.fx0, det, g.cross[base.kappa][base.kappa], b(g.y_degenerate)]);
    r.tables.push(t);
    r.verdict("fx0-closed-form", ((g.fx0 - closed) / closed).abs() < 1e-12, format!("fx0 = {:.10}, closed form {closed:.10}", g.fx0));

    if let FlowReturn::Value(v) = flow_return_sequence(&sf, n_max)? {
        let mut t = Table::new("flow-return", &[("n", ""), ("value", "varkappa^{kappa/2-1} a_n"), ("trend", "2 sqrt(n) f_X(0) varkappa^{-1/2}")]);
        let trend = if base.kappa == 1 { 2.0 * (n_max as f64).sqrt() * g.fx0 / kap.sqrt() } else { f64::NAN };
        t.push(vec![n_max as f64, v, trend]);
        r.tables.push(t);
    }

    let ap = aperiodicity_check(&sf, None);
    let (rank, index) = match &ap.verdict {
        Aperiodicity::Aperiodic => (base.kappa + 1, 1),
        Aperiodicity::Arithmetic { rank, index, .. } => (*rank, index.unwrap_or(0)),
    };
    let mut t = Table::new("aperiodicity", &[("rank", "of the cycle lattice"), ("index", "0 when not full rank"), ("nonsingular", "flag"), ("cycles", "")]);
    t.push(vec![rank as f64, index as f64, b(ap.nonsingular), ap.cycles as f64]);
    r.tables.push(t);
    r.verdict("nonsingular", ap.nonsingular, format!("{:?}, cycles up to length {}", ap.verdict, ap.cycle_bound));
    Ok(r)
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => {
            // Laplace expansion on the first row; kappa is small.
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<f64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
                    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                    s * m[0][j] * det(&minor)
                })
                .sum()
        }
    }
}

fn interval_of(cfg: &ExperimentConfig) -> Result<FiberInterval> {
    let [lo, hi] = cfg.params.interval.clone().unwrap_or_else(|| ["0".into(), "1".into()]);
    FiberInterval::new(rational(&lo)?, rational(&hi)?)
}

fn lll(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["lower-local-limit", "window-spacing"]);
    let sf = semiflow_of(cfg, "roof-walk")?;
    let p = &cfg.params;
    let word = word_of(&sf.base, p.word.as_ref().unwrap_or(&vec!["0".to_string()]))?;
    let interval = interval_of(cfg)?;
    let t = rational(p.t.as_deref().unwrap_or("200"))?;
    let y = rational(p.y.as_deref().unwrap_or("0"))?;
    let mut ms = p.ms.clone().unwrap_or_else(|| vec![2.0, 5.0, 10.0]);
    ms.sort_by(f64::total_cmp);
    let tol = cfg.tolerance();
    let res = lll_sweep(&sf, &word, &interval, &t, &ms, &y)?;
    let mut tab = Table::new(
        "window",
        &[("m", "bound on |x_{n,t}|"), ("n_lo", ""), ("n_hi", ""), ("sum", "t^{kappa/2} window sum"), ("predicted", "varkappa^{kappa/2-1} f_X(0) mu(A) |I|"), ("ratio", "sum/predicted"), ("spacing_defect", "max sqrt(n) |spacing sqrt(n)/varkappa - 1|")],
    );
    for x in &res {
        tab.push(vec![x.m, x.n_lo as f64, x.n_hi as f64, x.sum, x.predicted_limit, x.sum / x.predicted_limit, x.spacing_defect]);
    }
    r.tables.push(tab);
    let last = res.last().unwrap();
    let rel = (last.sum / last.predicted_limit - 1.0).abs();
    r.verdict("lll-limit", rel < tol, format!("at M = {}: sum {:.6} vs predicted {:.6} (relative gap {rel:.4})", last.m, last.sum, last.predicted_limit));
    let sums: Vec<f64> = res.iter().map(|x| x.sum).collect();
    r.verdict("monotone-in-m", sums.windows(2).all(|w| w[1] >= w[0]), format!("sums {sums:.6?}"));
    r.verdict(
        "spacing",
        res.iter().all(|x| x.spacing_ok),
        format!("defects {:.4?} (limit 10)", res.iter().map(|x| x.spacing_defect).collect::<Vec<_>>()),
    );
    Ok(r)
}

fn bell(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["bell-tail"]);
    let sf = semiflow_of(cfg, "roof-walk")?;
    let p = &cfg.params;
    let interval = interval_of(cfg)?;
    let t = rational(p.t.as_deref().unwrap_or("100"))?;
    let y = rational(p.y.as_deref().unwrap_or("0"))?;
    let mut ms = p.ms.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0, 4.0]);
    ms.sort_by(f64::total_cmp);
    // Without a word the whole base is used, as a union of 1-cylinders.
    let words: Vec<Vec<usize>> = match &p.word {
        Some(w) => vec![word_of(&sf.base, w)?],
        None => (0..sf.base.n_states()).map(|s| vec![s]).collect(),
    };
    let mut tails = vec![0.0; ms.len()];
    let mut totals = vec![0.0; ms.len()];
    let mut n_max = 0;
    for w in &words {
        for (i, bt) in bell_tail_sum(&sf, w, &interval, &t, &ms, &y)?.into_iter().enumerate() {
            tails[i] += bt.tail;
            totals[i] += bt.total;
            n_max = bt.n_max;
        }
    }
    let mut tab = Table::new("tail", &[("m", "|n - t/varkappa| >= M sqrt t"), ("tail", "t^{kappa/2} sum outside"), ("total", "t^{kappa/2} sum over all n"), ("n_max", "complete up to")]);
    for i in 0..ms.len() {
        tab.push(vec![ms[i], tails[i], totals[i], n_max as f64]);
    }
    r.tables.push(tab);
    r.verdict(
        "tail-declines-in-m",
        tails.windows(2).all(|w| w[1] <= w[0]) && tails.iter().zip(&totals).all(|(a, b)| a <= b),
        format!("tails [{}]; no limit is asserted", tails.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")),
    );
    Ok(r)
}

// ---- hyperbolic ----

fn hyp_geometry(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["disk-geometry", "angle-windows"]);
    let p = &cfg.params;
    let samples = p.samples.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut point = |rmax: f64| DiskPoint::polar(rng.random::<f64>() * rmax, rng.random::<f64>() * 2.0 * std::f64::consts::PI);
    let mut tab = Table::new("checks", &[("check", "row index of the verdict"), ("max_error", ""), ("tolerance", "")]);
    let add = |r: &mut Report, tab: &mut Table, name: &str, err: f64, tol: f64, what: &str| {
        tab.push(vec![tab.rows.len() as f64, err, tol]);
        r.verdict(name, err < tol, format!("{what}: max error {err:.3e} (tolerance {tol:.0e})"));
    };

    let mut iso = 0.0f64;
    let mut add_err = 0.0f64;
    let mut comm = 0.0f64;
    let mut anti = 0.0f64;
    let mut ball = 0.0f64;
    let mut rng2 = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9);
    for _ in 0..samples {
        let (x, y, w) = (point(3.0)?, point(3.0)?, point(1.5)?);
        let g = MobiusMap::to_point(point(2.0)?).compose(&MobiusMap::rotation(rng2.random::<f64>() * 6.0));
        iso = iso.max((hyp_dist(g.apply(x), g.apply(y)) - hyp_dist(x, y)).abs());
        let le = LineElement::new(w, rng2.random::<f64>() * 6.0);
        let (s, t) = (rng2.random::<f64>() * 10.0 - 5.0, rng2.random::<f64>() * 10.0 - 5.0);
        add_err = add_err.max(euclid_gap(&geodesic_flow(&le, s + t), &geodesic_flow(&geodesic_flow(&le, t), s)));
        comm = comm.max(euclid_gap(&mobius_act(&g, &geodesic_flow(&le, t)), &geodesic_flow(&mobius_act(&g, &le), t)));
        anti = anti.max(euclid_gap(&chi(&geodesic_flow(&le, t)), &geodesic_flow(&chi(&le), -t)));
        let eta = 0.05 + rng2.random::<f64>();
        let (c, rad) = ball_euclid(x, eta)?;
        for k in 0..4 {
            let z = c + num::complex::Complex64::from_polar(rad, k as f64 * 1.3 + 0.2);
            ball = ball.max((hyp_dist(x, DiskPoint { z }) - eta).abs());
        }
    }
    add(&mut r, &mut tab, "isometry", iso, 1e-12, "rho(g x, g y) - rho(x, y)");
    add(&mut r, &mut tab, "flow-additivity", add_err, 1e-10, "phi^{s+t} against phi^s phi^t");
    add(&mut r, &mut tab, "flow-commutes", comm, 1e-10, "g phi^t against phi^t g");
    add(&mut r, &mut tab, "chi-anticommutes", anti, 1e-10, "chi phi^t against phi^{-t} chi");
    add(&mut r, &mut tab, "ball-boundary", ball, 1e-10, "boundary of the Euclidean ball at distance eta");

    // Determinant drift: a long product of small random steps stays in a
    // compact set, so |det - 1| measures rounding and not growth of |a|.
    let mut m = MobiusMap::identity();
    let mut drift = 0.0f64;
    for i in 0..10_000 {
        let g = MobiusMap::to_point(point(0.01)?).compose(&MobiusMap::rotation(i as f64));
        m = m.compose(&g);
        if i % 8 == 7 {
            m = m.renormalized();
        }
        drift = drift.max((m.det() - 1.0).abs());
    }
    add(&mut r, &mut tab, "determinant", drift, 1e-10, "|det - 1| over 10^4 compositions");

    // Lambda asymptotics. The closed form gives |Lambda| ~ eta (1 - |w|^2),
    // and 1 - |w|^2 ~ 4 e^{-rho(0,w)}, so the exponential form has ratio 4.
    let (rho, eta) = (8.0, 0.01);
    let w = DiskPoint::polar(rho, 0.4)?;
    let len = lambda_len(w, eta)?;
    let first = len / (eta * (1.0 - w.z.norm_sqr()));
    let expo = len / (eta * (-rho).exp());
    add(&mut r, &mut tab, "lambda-first-order", (first - 1.0).abs(), 0.1, "|Lambda| / (eta (1 - |w|^2)) - 1 at rho = 8, eta = 0.01");
    add(
        &mut r,
        &mut tab,
        "lambda-exponential",
        (expo - 1.0).abs(),
        0.1,
        &format!("|Lambda| / (eta e^{{-rho(0,w)}}) = {expo:.5} at rho = 8, eta = 0.01; the exact limit is 4"),
    );

    // J inside Lambda and positivity of |J| exactly on the shell, over a grid.
    let [gr, gs, ge] = p.grid.unwrap_or([50, 50, 10]);
    let (mut bad_sub, mut bad_iff, mut checked) = (0, 0, 0);
    for i in 0..gr {
        let rho = 0.5 + 5.5 * (i as f64 + 0.5) / gr as f64;
        let w = DiskPoint::polar(rho, 0.37 * i as f64)?;
        for j in 0..gs {
            let s = 6.0 * (j as f64 + 0.5) / gs as f64;
            for k in 0..ge {
                let eta = 0.05 + 0.45 * k as f64 / ge.max(2).saturating_sub(1) as f64;
                let jl = j_len(w, eta, s)?;
                let on_shell = (rho - s).abs() <= eta;
                if ((rho - s).abs() - eta).abs() > 1e-9 {
                    checked += 1;
                    if (jl > 0.0) != on_shell {
                        bad_iff += 1;
                    }
                }
                if rho > eta && jl > lambda_len(w, eta)? + 1e-12 {
                    bad_sub += 1;
                }
            }
        }
    }
    add(&mut r, &mut tab, "j-inside-lambda", bad_sub as f64, 0.5, "grid points with |J| > |Lambda|");
    add(&mut r, &mut tab, "j-positivity", bad_iff as f64, 0.5, &format!("grid points violating |J| > 0 iff rho = s +- eta ({checked} checked)"));
    r.tables.push(tab);
    Ok(r)
}

fn euclid_gap(a: &LineElement, b: &LineElement) -> f64 {
    let d = (a.angle - b.angle).rem_euclid(2.0 * std::f64::consts::PI);
    (a.base.z - b.base.z).norm() + d.min(2.0 * std::f64::consts::PI - d)
}

/// Words of an enumeration; the cache stores only these.
#[derive(Serialize, Deserialize)]
struct CachedEnumeration {
    fingerprint: String,
    max_len: usize,
    min_key_gap: i64,
    words: Vec<Vec<usize>>,
}

pub const CACHE_ENV: &str = "ERGOLAB_CACHE_DIR";

fn cache_path(group: &FuchsianGroup, max_len: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!("{}-{}-{max_len}.json", group.name, group.fingerprint())))
}

/// Enumeration through the cache directory when one is configured.
pub fn load_or_enumerate(group: &FuchsianGroup, max_len: usize) -> Result<Enumeration> {
    let path = cache_path(group, max_len);
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(c) = serde_json::from_str::<CachedEnumeration>(&text) {
                if c.fingerprint == group.fingerprint() && c.max_len == max_len {
                    let elements = c.words.iter().map(|w| hyperbolic::group::element(group, w)).collect();
                    return Ok(Enumeration { max_len, elements, min_key_gap: c.min_key_gap });
                }
            }
        }
    }
    let e = enumerate_group(group, max_len)?;
    if let Some(p) = &path {
        let c = CachedEnumeration {
            fingerprint: group.fingerprint(),
            max_len,
            min_key_gap: e.min_key_gap,
            words: e.elements.iter().map(|g| g.word.clone()).collect(),
        };
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(p, serde_json::to_string(&c).expect("cache serializes"))?;
    }
    Ok(e)
}

fn group_of(cfg: &ExperimentConfig) -> Result<FuchsianGroup> {
    let name = cfg.group.as_deref().unwrap_or("schottky");
    if builtin::GROUP_NAMES.contains(&name) {
        builtin::group(name)
    } else {
        Err(Error::Parse(format!("unknown group `{name}`{}", suggest(name, builtin::GROUP_NAMES))))
    }
}

fn group_enum(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["word-metric"]);
    let group = group_of(cfg)?;
    let max_len = cfg.params.max_len.unwrap_or(if group.relator.is_some() { 5 } else { 8 });
    let e = load_or_enumerate(&group, max_len)?;
    let counts = e.count_by_length();
    let levels = hyperbolic::orbital::word_metric_levels(&e);
    let mut tab = Table::new("levels", &[("length", ""), ("count", "new elements"), ("ratio_low", "rho(0, g 0)/l(g)"), ("ratio_high", "rho(0, g 0)/l(g)")]);
    tab.push(vec![0.0, counts[0] as f64, f64::NAN, f64::NAN]);
    for (l, lo, hi) in &levels {
        tab.push(vec![*l as f64, counts[*l] as f64, *lo, *hi]);
    }
    r.tables.push(tab);
    let total: usize = counts.iter().sum();
    if group.relator.is_none() {
        let s = group.generators.len();
        let expected: Vec<usize> =
            (0..=max_len).map(|l| if l == 0 { 1 } else { s * (s - 1).pow(l as u32 - 1) }).collect();
        let through_two: usize = counts.iter().take(3).sum();
        r.verdict(
            "free-counts",
            counts == expected,
            format!("new per level {counts:?}; {through_two} elements through length 2, {total} in all"),
        );
    } else {
        let defect = group.relator_defect().unwrap();
        r.verdict("relator", defect < 1e-9, format!("relator distance from +-identity {defect:.3e}"));
        let samples: Vec<DiskPoint> = (0..200)
            .map(|i| DiskPoint::polar(0.9 * (i as f64 / 200.0), 2.399 * i as f64))
            .collect::<Result<_>>()?;
        let v = group.fundamental_domain_violations(&e.elements, &samples);
        r.verdict("fundamental-domain", v == 0, format!("{v} sample points mapped back into the domain"));
    }
    let again = enumerate_group(&group, max_len)?;
    let same = again.elements.iter().map(|g| &g.word).eq(e.elements.iter().map(|g| &g.word));
    r.verdict("idempotent", same, format!("{} elements, identical words on re-enumeration", again.elements.len()));
    r.verdict(
        "collision-audit",
        e.min_key_gap > hyperbolic::group::AUDIT_RADIUS,
        format!("smallest key gap {} units of {:e}", e.min_key_gap, hyperbolic::group::KEY_UNIT),
    );
    let lows: Vec<f64> = levels.iter().map(|x| x.1).collect();
    r.verdict("band-positive", min(&lows) > 0.0, format!("band [{:.4}, {:.4}]", min(&lows), max(&levels.iter().map(|x| x.2).collect::<Vec<_>>())));
    Ok(r)
}

fn orbit_of(cfg: &ExperimentConfig, default_len: usize) -> Result<Orbit> {
    let group = group_of(cfg)?;
    let max_len = cfg.params.max_len.unwrap_or(default_len);
    let e = load_or_enumerate(&group, max_len)?;
    Orbit::from_enumeration(group, e)
}

fn orbital(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["orbital-sandwich", "multi-correlation-bound"]);
    let orbit = orbit_of(cfg, 8)?;
    let p = &cfg.params;
    let eps = p.eps.unwrap_or(0.5);
    let s_grid = p.s_grid.clone().unwrap_or_else(|| (3..=10).map(|s| s as f64).collect());
    let gaps = p.gaps.clone().unwrap_or_else(|| vec![vec![2.6, 2.6], vec![2.6, 5.3]]);
    let stability = 1.0 / cfg.tolerance();
    let x = DiskPoint::origin();
    let q = QuadratureSpec::default();
    let mut tab = Table::new(
        "sandwich",
        &[("s", ""), ("integral", "m(Delta and phi^{-s} Delta)"), ("lower_sum", "orbital sum, rho = s +- eps/2"), ("upper_sum", "orbital sum, rho = s +- 2 eps"), ("upper_const", "integral/upper_sum"), ("lower_const", "integral/lower_sum")],
    );
    let mut ups = Vec::new();
    let mut lows = Vec::new();
    let mut empty_ok = true;
    for &s in &s_grid {
        let w = annulus_sandwich(&orbit, x, eps, s, q)?;
        let (u, l) = (w.upper_constant(), w.lower_constant());
        ups.extend(u);
        lows.extend(l);
        if w.upper_sum == 0.0 && w.integral != 0.0 {
            empty_ok = false;
        }
        tab.push(vec![s, w.integral, w.lower_sum, w.upper_sum, u.unwrap_or(f64::NAN), l.unwrap_or(f64::NAN)]);
    }
    r.tables.push(tab);
    r.verdict(
        "sandwich-upper",
        empty_ok && !ups.is_empty() && max(&ups) / min(&ups) <= stability,
        format!("integral <= C upper_sum with C in [{:.4}, {:.4}] over s = {s_grid:?}", min(&ups), max(&ups)),
    );
    r.verdict(
        "sandwich-lower",
        !lows.is_empty() && min(&lows) > 0.0 && max(&lows) / min(&lows) <= stability,
        format!("integral >= c lower_sum with c in [{:.4}, {:.4}] ({} of {} s have a nonempty inner annulus)", min(&lows), max(&lows), lows.len(), s_grid.len()),
    );

    let mut tab = Table::new("multi", &[("p", ""), ("total_time", ""), ("lhs", "m(intersection)"), ("rhs_product", "product at 4 eps"), ("ratio", "lhs/rhs")]);
    let mut ratios = Vec::new();
    for g in &gaps {
        let m = multi_correlation_geodesic(&orbit, x, eps, g, q)?;
        ratios.push(m.ratio);
        tab.push(vec![g.len() as f64, g.iter().sum(), m.lhs, m.rhs_product, m.ratio]);
    }
    r.tables.push(tab);
    let pos: Vec<f64> = ratios.iter().copied().filter(|v| *v > 0.0).collect();
    let m_p = max(&ratios);
    r.verdict(
        "multi-bound",
        ratios.iter().all(|v| v.is_finite()) && !pos.is_empty() && max(&pos) / min(&pos) <= stability,
        format!("ratios {ratios:?}; reported M_p = {m_p:.4e}"),
    );
    Ok(r)
}

fn cover_count(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(cfg, &["cover-counting"]);
    let orbit = orbit_of(cfg, 10)?;
    let p = &cfg.params;
    let eps = p.eps.unwrap_or(1.0);
    let t_grid = p.t_grid.clone().unwrap_or_else(|| (6..=17).map(|t| t as f64).collect());
    let kappas = p.kappa.clone().unwrap_or_else(|| vec![0, 1, 2]);
    let stability = 1.0 / cfg.tolerance();
    let mut tab = Table::new(
        "cover",
        &[("kappa", ""), ("t", ""), ("restricted", "annulus sum over Ker Theta"), ("unrestricted", "annulus sum over the group"), ("scaled", "t^{kappa/2} restricted"), ("normalized", "t^{kappa/2} restricted/unrestricted")],
    );
    let mut by_k = Vec::new();
    for &k in &kappas {
        let c = cover_counting(&orbit, k, &t_grid, eps)?;
        for i in 0..t_grid.len() {
            tab.push(vec![k as f64, t_grid[i], c.restricted[i], c.unrestricted[i], c.scaled[i], c.normalized[i]]);
        }
        by_k.push((k, c));
    }
    r.tables.push(tab);
    let get = |k: usize| by_k.iter().find(|(kk, _)| *kk == k).map(|(_, c)| c);
    if let Some(c1) = get(1) {
        let v = &c1.normalized;
        r.verdict(
            "kappa1-band",
            min(v) > 0.0 && max(v) / min(v) <= stability,
            format!("t^{{1/2}} restricted/unrestricted in [{:.4}, {:.4}] on t = {t_grid:?}", min(v), max(v)),
        );
        if let Some(c2) = get(2) {
            let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
            let (m1, m2) = (mean(&c1.normalized), mean(&c2.normalized));
            let pointwise = c2.restricted.iter().zip(&c1.restricted).all(|(a, b)| a <= b);
            r.verdict("kappa2-smaller", pointwise && m2 < m1, format!("window means {m2:.4} (kappa 2) against {m1:.4} (kappa 1)"));
        }
    }
    Ok(r)
}
