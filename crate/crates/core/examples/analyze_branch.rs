//! Full boson/fermion test of SKdV(1), then the solved series checked by
//! direct substitution.

use superpainleve::atlas::SystemName;
use superpainleve::cli::verdict_text;
use superpainleve::engine::run_branch_full;
use superpainleve::model::{residual_oracle, BranchSeed};

const SEED: &str = r#"
label = "SKdV1"
params = { c = "3", alpha = "1", beta = "3" }
level0 = { u = "1", w = "i" }
fermions = { r = 2, relation = "type2", k = "minus" }
hints = { free = ["w3", "w6"] }
"#;

fn main() {
    let sys = SystemName::Skdv.system();
    let seed = BranchSeed::from_toml(SEED).unwrap();
    let run = run_branch_full(&sys, &seed, 7).unwrap();
    print!("{}", verdict_text(&run.verdict));

    let checks = residual_oracle(&run.system, &run.values, 7);
    let nonzero = checks.iter().filter(|c| !c.value.is_zero()).count();
    println!("direct substitution: {} coefficients, {nonzero} nonzero", checks.len());
}
