//! Command-line behaviour: exit codes, config errors, report files.

use ergolab::cli::{main_from, parse_config, run_with_threads, Experiment, ExperimentConfig, Format, Report, Table};

fn run(args: &[&str]) -> i32 {
    main_from(std::iter::once("ergolab").chain(args.iter().copied()))
}

#[test]
fn misspelled_key_gets_a_suggestion() {
    let text = "experiment = \"recurrence\"\nmodel = \"lazy-walk\"\n\n[params]\nkapa = [1]\n";
    let err = parse_config(text).unwrap_err().to_string();
    assert!(err.contains("line 5"), "{err}");
    assert!(err.contains("`kapa`") && err.contains("did you mean `kappa`"), "{err}");

    let err = parse_config("experimnt = \"farey\"").unwrap_err().to_string();
    assert!(err.contains("did you mean `experiment`"), "{err}");
    let err = parse_config("experiment = \"fary\"").unwrap_err().to_string();
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "experiment = \"farey\"\n[params]\nkapa = [1]\n").unwrap();
    assert_eq!(run(&["farey", "--config", bad.to_str().unwrap(), "--out", out]), 2);
    assert_eq!(run(&["no-such-command"]), 2);
    assert_eq!(run(&["farey", "--tolerance=-1", "--out", out]), 2);

    // Config for a different subcommand.
    let other = dir.path().join("other.toml");
    std::fs::write(&other, "experiment = \"lll\"\n").unwrap();
    assert_eq!(run(&["farey", "--config", other.to_str().unwrap(), "--out", out]), 2);

    // Unknown builtin model is a runtime error.
    let m = dir.path().join("m.toml");
    std::fs::write(&m, "experiment = \"renewal\"\nmodel = \"lazy-wlak\"\n").unwrap();
    assert_eq!(run(&["renewal", "--config", m.to_str().unwrap(), "--out", out]), 2);

    assert_eq!(run(&["farey", "--out", out]), 0);
    assert!(dir.path().join("farey.json").exists());
    // The exponential Lambda form fails (the limit ratio is 4), so this run exits 1.
    assert_eq!(run(&["hyp-geometry", "--out", out]), 1);
}

#[test]
fn report_config_dispatch_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f.toml");
    std::fs::write(&cfg, "experiment = \"farey\"\nformat = \"csv\"\n[params]\nd = 3\nbound = 40\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["report", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    let mut names: Vec<String> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert!(names.contains(&"farey_verdicts.csv".to_string()), "{names:?}");
    assert!(names.iter().all(|n| n.starts_with("farey_") && n.ends_with(".csv")));
}

#[test]
fn report_tables_round_trip_through_csv_and_json() {
    let mut cfg = ExperimentConfig::new(Experiment::SemiflowLlt);
    cfg.threads = Some(2);
    let r = run_with_threads(&cfg).unwrap();
    for (name, body) in r.render(Format::Csv).unwrap() {
        let Some(table) = name.strip_prefix("semiflow-llt_").and_then(|n| n.strip_suffix(".csv")) else { continue };
        if table == "verdicts" {
            continue;
        }
        let back = Table::from_csv(table, &body).unwrap();
        assert_eq!(&back, r.table(table).unwrap(), "{table}");
    }
    let back = Report::from_json(&r.to_json()).unwrap();
    assert_eq!(back.to_json(), r.to_json());
    assert_eq!(back.config.threads, None);
    for t in &r.tables {
        assert!(t.columns.iter().any(|c| !c.unit.is_empty()), "{} declares no units", t.name);
    }
}

#[test]
fn fast_reports_are_deterministic() {
    for e in [Experiment::Farey, Experiment::HypGeometry, Experiment::GroupEnum, Experiment::Lll] {
        let mut cfg = ExperimentConfig::new(e);
        cfg.seed = 5;
        let json: Vec<String> = [1, 3, 1]
            .into_iter()
            .map(|t| {
                cfg.threads = Some(t);
                run_with_threads(&cfg).unwrap().to_json()
            })
            .collect();
        assert_eq!(json[0], json[1], "{e}");
        assert_eq!(json[0], json[2], "{e}");
    }
}

#[test]
fn seed_changes_sampled_geometry_only() {
    let mut a = ExperimentConfig::new(Experiment::HypGeometry);
    let mut b = a.clone();
    a.seed = 1;
    b.seed = 2;
    let (ra, rb) = (run_with_threads(&a).unwrap(), run_with_threads(&b).unwrap());
    let checks = |r: &Report| r.verdicts.iter().map(|v| (v.check.clone(), v.passed)).collect::<Vec<_>>();
    assert_eq!(checks(&ra), checks(&rb));
    assert_ne!(ra.to_json(), rb.to_json());
}
