//! A Markov model with a Z-valued cocycle defined in TOML: exact return
//! probabilities and the normalized definition written back out.

use ergolab::markov::{return_sequence, MarkovModel, ModelDef};
use num::BigRational;

const DEF: &str = r#"
name = "sticky-walk"
states = ["left", "right"]
kappa = 1
p = [["2/3", "1/3"], ["1/3", "2/3"]]
phi = [[[-1], [1]], [[-1], [1]]]
"#;

fn main() -> ergolab::Result<()> {
    let model = MarkovModel::from_def(&ModelDef::parse(DEF)?)?;
    let u = return_sequence::<BigRational>(&model, 8)?;
    for (n, v) in u.iter().enumerate() {
        println!("u_{} = {}", n + 1, ergolab::scalar::format_rational(v));
    }
    print!("{}", model.to_def().to_toml());
    Ok(())
}
