//! Experiment configuration files (TOML).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Backend};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Renewal,
    Correlation,
    Recurrence,
    Farey,
    PsiMoments,
    SemiflowLlt,
    Lll,
    Bell,
    HypGeometry,
    GroupEnum,
    Orbital,
    CoverCount,
}

impl Experiment {
    pub const ALL: [Experiment; 12] = [
        Experiment::Renewal,
        Experiment::Correlation,
        Experiment::Recurrence,
        Experiment::Farey,
        Experiment::PsiMoments,
        Experiment::SemiflowLlt,
        Experiment::Lll,
        Experiment::Bell,
        Experiment::HypGeometry,
        Experiment::GroupEnum,
        Experiment::Orbital,
        Experiment::CoverCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Renewal => "renewal",
            Experiment::Correlation => "correlation",
            Experiment::Recurrence => "recurrence",
            Experiment::Farey => "farey",
            Experiment::PsiMoments => "psi-moments",
            Experiment::SemiflowLlt => "semiflow-llt",
            Experiment::Lll => "lll",
            Experiment::Bell => "bell",
            Experiment::HypGeometry => "hyp-geometry",
            Experiment::GroupEnum => "group-enum",
            Experiment::Orbital => "orbital",
            Experiment::CoverCount => "cover-count",
        }
    }

    /// Verdict tolerance used when the config does not set one.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Experiment::SemiflowLlt => 0.02,
            Experiment::Lll => 0.25,
            Experiment::PsiMoments => 0.2,
            Experiment::Renewal => 1e-3,
            _ => 0.1,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment `{s}`{}", suggest(s, EXPERIMENT_NAMES))))
    }
}

const EXPERIMENT_NAMES: &[&str] = &[
    "renewal",
    "correlation",
    "recurrence",
    "farey",
    "psi-moments",
    "semiflow-llt",
    "lll",
    "bell",
    "hyp-geometry",
    "group-enum",
    "orbital",
    "cover-count",
];

/// Experiment parameters. Every field is optional; each experiment fills
/// its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<i64>>,
    /// Flow time, an exact rational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms: Option<Vec<f64>>,
    /// Half-open fiber interval [lo, hi), exact rationals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_fit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 3]>,
}

const PARAM_KEYS: &[&str] = &[
    "n_max", "ns", "window", "d", "nu", "kappa", "bound", "word", "shifts", "t", "ms", "interval", "y", "n_fit", "eps",
    "s_grid", "t_grid", "gaps", "max_len", "samples", "grid",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format `{s}` (expected csv|json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Builtin model name or path to a model definition file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semiflow: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default)]
    pub params: Params,
}

const TOP_KEYS: &[&str] =
    &["experiment", "model", "semiflow", "group", "backend", "threads", "tolerance", "seed", "out", "format", "params"];

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            model: None,
            semiflow: None,
            group: None,
            backend: Backend::Float,
            threads: None,
            tolerance: None,
            seed: 0,
            out: None,
            format: None,
            params: Params::default(),
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.experiment.default_tolerance())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        parse_config(&text)
    }

    /// Nonempty ranges, positive tolerances, well-formed rationals.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parse(msg));
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return bad(format!("tolerance must be > 0, got {t}"));
            }
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1".into());
        }
        let p = &self.params;
        let lists: [(&str, Option<usize>); 7] = [
            ("ns", p.ns.as_ref().map(Vec::len)),
            ("kappa", p.kappa.as_ref().map(Vec::len)),
            ("word", p.word.as_ref().map(Vec::len)),
            ("ms", p.ms.as_ref().map(Vec::len)),
            ("s_grid", p.s_grid.as_ref().map(Vec::len)),
            ("t_grid", p.t_grid.as_ref().map(Vec::len)),
            ("gaps", p.gaps.as_ref().map(Vec::len)),
        ];
        for (key, len) in lists {
            if len == Some(0) {
                return bad(format!("params.{key} must be nonempty"));
            }
        }
        if let Some([a, b]) = p.window {
            if a > b {
                return bad(format!("params.window [{a}, {b}] is empty"));
            }
        }
        if let Some(g) = &p.gaps {
            if g.iter().any(Vec::is_empty) {
                return bad("params.gaps entries must be nonempty".into());
            }
        }
        for (key, v) in [("t", &p.t), ("y", &p.y)] {
            if let Some(s) = v {
                parse_rational(s).map_err(|e| Error::Parse(format!("params.{key}: {e}")))?;
            }
        }
        if let Some([lo, hi]) = &p.interval {
            let (a, b) = (parse_rational(lo)?, parse_rational(hi)?);
            if b <= a {
                return bad(format!("params.interval [{lo}, {hi}) is empty"));
            }
        }
        for (key, v) in [("eps", p.eps)] {
            if let Some(x) = v {
                if !(x > 0.0) {
                    return bad(format!("params.{key} must be > 0"));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a config. Unknown keys are reported with their line
/// and the nearest valid key.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| describe(text, &e))?;
    cfg.validate()?;
    Ok(cfg)
}

fn describe(text: &str, e: &toml::de::Error) -> Error {
    let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    let at = line.map_or(String::new(), |l| format!("line {l}: "));
    let msg = e.message();
    if let Some(key) = msg.strip_prefix("unknown field `").and_then(|r| r.split('`').next()) {
        let known = if msg.contains("`n_max`") { PARAM_KEYS } else { TOP_KEYS };
        return Error::Parse(format!("{at}unknown key `{key}`{}", suggest(key, known)));
    }
    Error::Parse(format!("{at}{}", msg.trim_end()))
}

/// ", did you mean `x`?" for the closest candidate, if any is close.
pub fn suggest(key: &str, known: &[&str]) -> String {
    known
        .iter()
        .map(|k| (strsim::damerau_levenshtein(key, k), *k))
        .filter(|(d, k)| *d <= 2.max(k.len() / 3))
        .min()
        .map_or(String::new(), |(_, k)| format!(", did you mean `{k}`?"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config("experiment = \"farey\"").unwrap();
        assert_eq!(c.experiment, Experiment::Farey);
        assert_eq!(c.backend, Backend::Float);
        assert_eq!(c.params, Params::default());
        assert_eq!(c.tolerance(), 0.1);
    }

    #[test]
    fn misspelled_key_names_nearest() {
        let text = "experiment = \"renewal\"\n[params]\nkapa = [1]\n";
        let e = parse_config(text).unwrap_err().to_string();
        assert!(e.contains("`kapa`") && e.contains("`kappa`") && e.contains("line 3"), "{e}");
        let e = parse_config("experimnt = \"lll\"").unwrap_err().to_string();
        assert!(e.contains("`experiment`"), "{e}");
    }

    #[test]
    fn rejects_empty_ranges_and_bad_rationals() {
        assert!(parse_config("experiment = \"lll\"\n[params]\nms = []").is_err());
        assert!(parse_config("experiment = \"lll\"\n[params]\nt = \"1/0\"").is_err());
        assert!(parse_config("experiment = \"lll\"\ntolerance = 0.0").is_err());
        assert!(parse_config("experiment = \"lll\"\n[params]\ninterval = [\"1\", \"1/2\"]").is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"
experiment = "lll"
semiflow = "roof-walk"
backend = "exact"
tolerance = 0.25
[params]
t = "200"
ms = [2.0, 5.0, 10.0]
interval = ["0", "1"]
word = ["0"]
"#;
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    }
}
