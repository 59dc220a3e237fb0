//! Runs an experiment from a TOML config through the library and prints
//! its verdicts and one table as CSV.

use ergolab::cli::{parse_config, run_experiment};

const CONFIG: &str = r#"
experiment = "lll"
semiflow = "roof-walk"
tolerance = 0.25

[params]
word = ["0"]
t = "200"
ms = [2.0, 5.0, 10.0]
interval = ["0", "1"]
"#;

fn main() -> ergolab::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let report = run_experiment(&cfg)?;
    for v in &report.verdicts {
        println!("{:5} {}: {}", v.passed, v.check, v.detail);
    }
    print!("{}", report.table("window").unwrap().to_csv()?);
    Ok(())
}
