//! Config-driven experiment runner.

pub mod config;
pub mod report;
pub mod run;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::scalar::Backend;

pub use config::{parse_config, Experiment, ExperimentConfig, Format};
pub use report::{emit_report, Report, Table, Verdict};
pub use run::{run_experiment, IN_SCOPE_TAGS};

#[derive(Parser, Debug)]
#[command(name = "ergolab", version, about = "Run recurrence, Farey, semiflow and orbital-sum experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    Renewal(Common),
    Correlation(Common),
    Recurrence(Common),
    Farey(Common),
    PsiMoments(Common),
    SemiflowLlt(Common),
    Lll(Common),
    Bell(Common),
    HypGeometry(Common),
    GroupEnum(Common),
    Orbital(Common),
    CoverCount(Common),
    /// Run one config, or every experiment with defaults when no config is given.
    Report(Common),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; reports go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    backend: Option<Backend>,
    #[arg(long)]
    tolerance: Option<f64>,
}

impl Command {
    fn split(self) -> (Option<Experiment>, Common) {
        use Command::*;
        match self {
            Renewal(c) => (Some(Experiment::Renewal), c),
            Correlation(c) => (Some(Experiment::Correlation), c),
            Recurrence(c) => (Some(Experiment::Recurrence), c),
            Farey(c) => (Some(Experiment::Farey), c),
            PsiMoments(c) => (Some(Experiment::PsiMoments), c),
            SemiflowLlt(c) => (Some(Experiment::SemiflowLlt), c),
            Lll(c) => (Some(Experiment::Lll), c),
            Bell(c) => (Some(Experiment::Bell), c),
            HypGeometry(c) => (Some(Experiment::HypGeometry), c),
            GroupEnum(c) => (Some(Experiment::GroupEnum), c),
            Orbital(c) => (Some(Experiment::Orbital), c),
            CoverCount(c) => (Some(Experiment::CoverCount), c),
            Report(c) => (None, c),
        }
    }
}

/// Config from file (if any), then command-line overrides.
fn build_config(exp: Option<Experiment>, c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => {
            let cfg = ExperimentConfig::load(p)?;
            if let Some(e) = exp {
                if cfg.experiment != e {
                    return Err(Error::Parse(format!(
                        "{} is a `{}` config, not `{}`",
                        p.display(),
                        cfg.experiment,
                        e
                    )));
                }
            }
            cfg
        }
        None => ExperimentConfig::new(exp.expect("caller handles the report-all case")),
    };
    if let Some(o) = &c.out {
        cfg.out = Some(o.display().to_string());
    }
    if let Some(f) = c.format {
        cfg.format = Some(f);
    }
    if let Some(t) = c.threads {
        cfg.threads = Some(t);
    }
    if let Some(b) = c.backend {
        cfg.backend = b;
    }
    if let Some(t) = c.tolerance {
        cfg.tolerance = Some(t);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs in a rayon pool of the configured size.
pub fn run_with_threads(cfg: &ExperimentConfig) -> Result<Report> {
    let threads = cfg.threads.unwrap_or(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    pool.install(|| run_experiment(cfg))
}

fn emit(r: &Report, cfg: &ExperimentConfig) -> Result<()> {
    let format = cfg.format.unwrap_or(Format::Json);
    match &cfg.out {
        Some(dir) => {
            emit_report(r, format, Path::new(dir))?;
        }
        None => {
            for (name, body) in r.render(format)? {
                if format == Format::Csv {
                    println!("# {name}");
                }
                print!("{body}");
            }
        }
    }
    Ok(())
}

fn summary(r: &Report) {
    for v in &r.verdicts {
        eprintln!("[{}] {}/{}: {}", if v.passed { "pass" } else { "FAIL" }, r.experiment, v.check, v.detail);
    }
}

/// Every experiment with defaults; writes an index next to the reports.
fn report_all(c: &Common) -> Result<bool> {
    let mut index = Vec::new();
    let mut ok = true;
    for exp in Experiment::ALL {
        let cfg = build_config(Some(exp), &Common { config: None, ..c.clone() })?;
        let r = run_with_threads(&cfg)?;
        summary(&r);
        ok &= r.passed();
        emit(&r, &cfg)?;
        index.push(serde_json::json!({
            "experiment": exp.name(),
            "passed": r.passed(),
            "tags": r.tags,
        }));
    }
    let body = serde_json::to_string_pretty(&serde_json::json!({ "reports": index })).expect("index serializes");
    match &c.out {
        Some(dir) => std::fs::write(dir.join("index.json"), body + "\n")?,
        None => println!("{body}"),
    }
    Ok(ok)
}

fn dispatch(cli: Cli) -> Result<bool> {
    let (exp, common) = cli.command.split();
    if exp.is_none() && common.config.is_none() {
        return report_all(&common);
    }
    let cfg = build_config(exp, &common)?;
    let r = run_with_threads(&cfg)?;
    summary(&r);
    emit(&r, &cfg)?;
    Ok(r.passed())
}

/// Exit code: 0 all verdicts pass, 1 some verdict fails, 2 usage, parse or runtime error.
pub fn main() -> i32 {
    main_from(std::env::args_os())
}

pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
