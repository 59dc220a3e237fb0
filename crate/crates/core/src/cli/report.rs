//! Reports: tables with declared units, verdicts, JSON and CSV emission.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Unit or normalization of the column ("" for plain counts/indices).
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    #[serde(with = "rows_serde")]
    pub rows: Vec<Vec<f64>>,
}

/// JSON has no NaN or infinity; those cells are written as strings.
mod rows_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<Value>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| serde_json::Number::from_f64(x).map_or_else(|| Value::String(super::fmt_num(x)), Value::Number))
                    .collect()
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let v: Vec<Vec<Value>> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| match &c {
                        Value::Number(n) => n.as_f64(),
                        Value::String(s) => super::parse_num(s),
                        _ => None,
                    }
                    .ok_or_else(|| serde::de::Error::custom(format!("bad table cell {c}"))))
                    .collect()
            })
            .collect()
    }
}

impl Table {
    /// `cols` as (name, unit) pairs.
    pub fn new(name: &str, cols: &[(&str, &str)]) -> Self {
        Table {
            name: name.into(),
            columns: cols.iter().map(|(n, u)| Column { name: n.to_string(), unit: u.to_string() }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    fn header(&self) -> Vec<String> {
        self.columns
            .iter()
            .map(|c| if c.unit.is_empty() { c.name.clone() } else { format!("{} [{}]", c.name, c.unit) })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| fmt_num(*v))).map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Internal(e.to_string()))?)
            .map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn from_csv(name: &str, text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns = r
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(|h| match h.split_once(" [") {
                Some((n, u)) => Column { name: n.into(), unit: u.trim_end_matches(']').into() },
                None => Column { name: h.into(), unit: String::new() },
            })
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            rows.push(
                rec.iter()
                    .map(|v| parse_num(v).ok_or_else(|| Error::Parse(format!("bad number `{v}` in {name}"))))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(Table { name: name.into(), columns, rows })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Shortest round-trip representation; non-finite values spelled out.
fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

fn parse_num(s: &str) -> Option<f64> {
    s.parse().ok()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub experiment: String,
    /// Which displayed relations this report exercises.
    pub tags: Vec<String>,
    pub backend: String,
    /// The config as run, without the thread count and output fields.
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig, tags: &[&str]) -> Self {
        let mut echo = cfg.clone();
        echo.threads = None;
        echo.out = None;
        echo.format = None;
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            experiment: cfg.experiment.name().into(),
            tags: tags.iter().map(|t| t.to_string()).collect(),
            backend: format!("{:?}", cfg.backend).to_lowercase(),
            config: echo,
            tables: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn verdict(&mut self, check: &str, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { check: check.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn verdict_table_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "passed", "detail"]).map_err(csv_err)?;
        for v in &self.verdicts {
            w.write_record([v.check.as_str(), if v.passed { "true" } else { "false" }, v.detail.as_str()])
                .map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Internal(e.to_string()))?)
            .map_err(|e| Error::Internal(e.to_string()))
    }

    /// (file name, contents) pairs for the chosen format.
    pub fn render(&self, format: super::config::Format) -> Result<Vec<(String, String)>> {
        let stem = &self.experiment;
        Ok(match format {
            super::config::Format::Json => vec![(format!("{stem}.json"), self.to_json())],
            super::config::Format::Csv => {
                let mut files = Vec::new();
                for t in &self.tables {
                    files.push((format!("{stem}_{}.csv", t.name), t.to_csv()?));
                }
                files.push((format!("{stem}_verdicts.csv"), self.verdict_table_csv()?));
                files
            }
        })
    }
}

/// Writes the rendered files into `dir`, creating it if needed.
pub fn emit_report(r: &Report, format: super::config::Format, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for (name, body) in r.render(format)? {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new("band", &[("n", ""), ("value", "ratio"), ("lower", "ratio"), ("upper", "ratio")]);
        t.push(vec![1.0, 0.1 + 0.2, 1e-300, f64::INFINITY]);
        t.push(vec![2.0, -3.5, 0.0, 1.0 / 3.0]);
        let back = Table::from_csv("band", &t.to_csv().unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(t.to_csv().unwrap().starts_with("n,value [ratio],lower [ratio],upper [ratio]\n"));
    }
}
