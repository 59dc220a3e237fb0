use std::collections::VecDeque;

use num::{BigRational, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{format_rational, parse_rational, Scalar};

/// Finite irreducible aperiodic Markov shift with a centered edge cocycle
/// into Z^kappa. Transition probabilities are stored exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovModel {
    pub name: String,
    pub states: Vec<String>,
    p: Vec<Vec<BigRational>>,
    mu: Vec<BigRational>,
    pub kappa: usize,
    phi: Vec<Vec<Vec<i64>>>,
}

/// Outgoing edge of the extended chain.
#[derive(Clone, Debug)]
pub struct Edge<T> {
    pub to: usize,
    pub p: T,
    pub phi: Vec<i64>,
}

impl MarkovModel {
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        p: Vec<Vec<BigRational>>,
        kappa: usize,
        phi: Vec<Vec<Vec<i64>>>,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return domain("model needs at least one state");
        }
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return domain(format!("transition matrix must be {n}x{n}"));
        }
        for (i, row) in p.iter().enumerate() {
            if row.iter().any(|x| x.is_negative()) {
                return domain(format!("negative probability in row {i}"));
            }
            let total: BigRational = row.iter().sum();
            if !total.is_one() {
                return domain(format!("row {i} sums to {}", format_rational(&total)));
            }
        }
        if phi.len() != n || phi.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != kappa)) {
            return domain(format!("cocycle table must be {n}x{n} vectors of length {kappa}"));
        }
        let mu = stationary_distribution(&p)?;
        if period(&p) != 1 {
            return Err(Error::Structural("transition matrix is periodic".into()));
        }
        let model = MarkovModel { name: name.into(), states, p, mu, kappa, phi };
        let drift = model.drift();
        if drift.iter().any(|c| !c.is_zero()) {
            let shown: Vec<String> = drift.iter().map(format_rational).collect();
            return domain(format!("cocycle is not centered: drift = ({})", shown.join(", ")));
        }
        Ok(model)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn p_exact(&self, s: usize, t: usize) -> &BigRational {
        &self.p[s][t]
    }

    pub fn p<T: Scalar>(&self, s: usize, t: usize) -> T {
        T::from_rational(&self.p[s][t])
    }

    pub fn mu_exact(&self, s: usize) -> &BigRational {
        &self.mu[s]
    }

    pub fn mu<T: Scalar>(&self, s: usize) -> T {
        T::from_rational(&self.mu[s])
    }

    pub fn phi(&self, s: usize, t: usize) -> &[i64] {
        &self.phi[s][t]
    }

    /// max_{s,t} |phi(s,t)|_inf over edges with positive probability.
    pub fn phi_radius(&self) -> i64 {
        let mut r = 0;
        for s in 0..self.n_states() {
            for t in 0..self.n_states() {
                if !self.p[s][t].is_zero() {
                    r = r.max(self.phi[s][t].iter().map(|v| v.abs()).max().unwrap_or(0));
                }
            }
        }
        r
    }

    /// sum_{s,t} mu_s p_st phi(s,t), exactly.
    pub fn drift(&self) -> Vec<BigRational> {
        let mut d = vec![BigRational::zero(); self.kappa];
        for s in 0..self.n_states() {
            for t in 0..self.n_states() {
                let w = &self.mu[s] * &self.p[s][t];
                for (c, v) in d.iter_mut().zip(&self.phi[s][t]) {
                    *c += &w * BigRational::from_integer((*v).into());
                }
            }
        }
        d
    }

    pub fn edges<T: Scalar>(&self) -> Vec<Vec<Edge<T>>> {
        (0..self.n_states())
            .map(|s| {
                (0..self.n_states())
                    .filter(|&t| !self.p[s][t].is_zero())
                    .map(|t| Edge { to: t, p: self.p(s, t), phi: self.phi[s][t].clone() })
                    .collect()
            })
            .collect()
    }

    /// Time reversal: p~_{s,t} = mu_t p_{t,s} / mu_s, phi~(s,t) = -phi(t,s).
    /// Under the stationary law, the reversed chain run forward is the
    /// original chain run backward, with the cocycle sum negated.
    pub fn reversed(&self) -> MarkovModel {
        let n = self.n_states();
        let p = (0..n)
            .map(|s| (0..n).map(|t| &self.mu[t] * &self.p[t][s] / &self.mu[s]).collect())
            .collect();
        let phi = (0..n)
            .map(|s| (0..n).map(|t| self.phi[t][s].iter().map(|v| -v).collect()).collect())
            .collect();
        MarkovModel {
            name: format!("{}~reversed", self.name),
            states: self.states.clone(),
            p,
            mu: self.mu.clone(),
            kappa: self.kappa,
            phi,
        }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// True when every row of P is the same, so the chain is i.i.d.
    pub fn is_iid(&self) -> bool {
        self.p.iter().all(|r| *r == self.p[0])
    }

    pub fn to_def(&self) -> ModelDef {
        ModelDef {
            name: self.name.clone(),
            states: self.states.clone(),
            kappa: self.kappa,
            p: self.p.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            phi: self.phi.clone(),
        }
    }

    pub fn from_def(def: &ModelDef) -> Result<Self> {
        let p = def
            .p
            .iter()
            .map(|r| r.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        MarkovModel::new(def.name.clone(), def.states.clone(), p, def.kappa, def.phi.clone())
    }
}

/// Model definition file contents (TOML). Probabilities are exact
/// rationals or decimals written as strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDef {
    pub name: String,
    pub states: Vec<String>,
    pub kappa: usize,
    pub p: Vec<Vec<String>>,
    pub phi: Vec<Vec<Vec<i64>>>,
}

impl ModelDef {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model definitions always serialize")
    }
}

fn strongly_connected(p: &[Vec<BigRational>]) -> bool {
    let n = p.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let w = if forward { &p[u][v] } else { &p[v][u] };
                if !w.is_zero() && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|b| b)
    };
    reach(true) && reach(false)
}

/// Period of an irreducible chain: gcd over edges u->v of level(u)+1-level(v).
fn period(p: &[Vec<BigRational>]) -> u64 {
    let n = p.len();
    let mut level = vec![None; n];
    level[0] = Some(0i64);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if !p[u][v].is_zero() && level[v].is_none() {
                level[v] = Some(level[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    let mut g = 0i64;
    for u in 0..n {
        for v in 0..n {
            if !p[u][v].is_zero() {
                if let (Some(a), Some(b)) = (level[u], level[v]) {
                    g = g.gcd(&(a + 1 - b));
                }
            }
        }
    }
    g.unsigned_abs()
}

/// Exact stationary law of an irreducible stochastic matrix, by Gaussian
/// elimination over the rationals.
pub fn stationary_distribution(p: &[Vec<BigRational>]) -> Result<Vec<BigRational>> {
    let n = p.len();
    if n == 0 || p.iter().any(|r| r.len() != n) {
        return domain("transition matrix must be square and nonempty");
    }
    if !strongly_connected(p) {
        return Err(Error::Structural("transition matrix is reducible".into()));
    }
    // Rows: (P^T - I) with the last equation replaced by sum mu = 1.
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|j| if i == j { &p[j][i] - BigRational::one() } else { p[j][i].clone() })
                .collect();
            row.push(BigRational::zero());
            row
        })
        .collect();
    a[n - 1] = vec![BigRational::one(); n + 1];
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Structural("singular balance equations".into()))?;
        a.swap(col, pivot);
        let inv = BigRational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    let mu: Vec<BigRational> = a.into_iter().map(|r| r[n].clone()).collect();
    if mu.iter().any(|m| !m.is_positive()) {
        return Err(Error::Structural("stationary law is not strictly positive".into()));
    }
    Ok(mu)
}

/// [s_0 .. s_n] at `position`, optionally restricted to one fiber copy.
/// The fiber is the lattice coordinate of the point at time 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    pub position: i64,
    pub word: Vec<usize>,
    pub fiber: Option<Vec<i64>>,
}

impl Cylinder {
    pub fn new(position: i64, word: Vec<usize>, fiber: Option<Vec<i64>>) -> Self {
        Cylinder { position, word, fiber }
    }

    /// Single-symbol cylinder at time 0 in fiber z.
    pub fn at(symbol: usize, fiber: Vec<i64>) -> Self {
        Cylinder { position: 0, word: vec![symbol], fiber: Some(fiber) }
    }
}

/// mu_{s_0} p_{s_0 s_1} ... p_{s_{n-1} s_n}; 0 for inadmissible words.
pub fn cylinder_measure<T: Scalar>(model: &MarkovModel, c: &Cylinder) -> Result<T> {
    word_measure(model, &c.word)
}

pub fn word_measure<T: Scalar>(model: &MarkovModel, word: &[usize]) -> Result<T> {
    let Some(&first) = word.first() else {
        return domain("cylinder word must be nonempty");
    };
    if let Some(bad) = word.iter().find(|&&s| s >= model.n_states()) {
        return domain(format!("symbol {bad} outside state space of size {}", model.n_states()));
    }
    let mut m: BigRational = model.mu_exact(first).clone();
    for w in word.windows(2) {
        m *= model.p_exact(w[0], w[1]);
        if m.is_zero() {
            break;
        }
    }
    Ok(T::from_rational(&m))
}

/// Sum of phi along consecutive pairs of a word.
pub fn word_phi(model: &MarkovModel, word: &[usize]) -> Vec<i64> {
    let mut z = vec![0; model.kappa];
    for w in word.windows(2) {
        for (a, b) in z.iter_mut().zip(model.phi(w[0], w[1])) {
            *a += b;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn m(rows: &[&[(i64, i64)]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&(a, b)| ratio(a, b)).collect()).collect()
    }

    #[test]
    fn stationary_examples() {
        let p = m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        assert_eq!(stationary_distribution(&p).unwrap(), vec![ratio(1, 2), ratio(1, 2)]);
        let p = m(&[&[(9, 10), (1, 10)], &[(2, 10), (8, 10)]]);
        assert_eq!(stationary_distribution(&p).unwrap(), vec![ratio(2, 3), ratio(1, 3)]);
        let id = m(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        assert!(matches!(stationary_distribution(&id), Err(Error::Structural(_))));
    }

    #[test]
    fn rejects_periodic_and_uncentered() {
        let flip = m(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let names = vec!["a".to_string(), "b".to_string()];
        let phi0 = vec![vec![vec![]; 2]; 2];
        assert!(matches!(
            MarkovModel::new("flip", names.clone(), flip, 0, phi0),
            Err(Error::Structural(_))
        ));
        let half = m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        let phi = vec![vec![vec![1], vec![1]], vec![vec![1], vec![-1]]];
        assert!(matches!(MarkovModel::new("drift", names, half, 1, phi), Err(Error::Domain(_))));
    }

    #[test]
    fn cylinder_examples() {
        let one = MarkovModel::new("one", vec!["x".into()], m(&[&[(1, 1)]]), 0, vec![vec![vec![]]]).unwrap();
        let c = Cylinder::new(3, vec![0, 0], None);
        assert_eq!(cylinder_measure::<BigRational>(&one, &c).unwrap(), ratio(1, 1));
        let half = m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        let two = MarkovModel::new("two", vec!["a".into(), "b".into()], half, 0, vec![vec![vec![]; 2]; 2]).unwrap();
        let c = Cylinder::new(0, vec![0, 1], None);
        assert_eq!(cylinder_measure::<BigRational>(&two, &c).unwrap(), ratio(1, 4));
        assert!(cylinder_measure::<f64>(&two, &Cylinder::new(0, vec![2], None)).is_err());
        let biased = m(&[&[(1, 2), (1, 2)], &[(1, 1), (0, 1)]]);
        let names = vec!["a".to_string(), "b".to_string()];
        let mb = MarkovModel::new("b", names, biased, 0, vec![vec![vec![]; 2]; 2]).unwrap();
        assert_eq!(cylinder_measure::<f64>(&mb, &Cylinder::new(0, vec![1, 1], None)).unwrap(), 0.0);
    }

    #[test]
    fn model_file_round_trip() {
        let text = r#"
name = "biased"
states = ["a", "b"]
kappa = 0
p = [["0.9", "1/10"], ["0.2", "0.8"]]
phi = [[[], []], [[], []]]
"#;
        let def = ModelDef::parse(text).unwrap();
        let model = MarkovModel::from_def(&def).unwrap();
        assert_eq!(model.mu_exact(0), &ratio(2, 3));
        let again = MarkovModel::from_def(&ModelDef::parse(&model.to_def().to_toml()).unwrap()).unwrap();
        assert_eq!(again, model);
        assert!(ModelDef::parse("name = 'x'\nstates = []\nkappa = 0\np = []\nphi = []\nbogus = 1").is_err());
    }
}
