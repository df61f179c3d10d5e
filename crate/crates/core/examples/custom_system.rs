//! A system written in the equation language: KdV and a coupled
//! boson/fermion extension, tested from their leading orders.

use superpainleve::cli::{run_auto, verdict_text};
use superpainleve::engine::level0_seeds;
use superpainleve::model::{parse_dsl, BranchSeed};

const KDV: &str = "
system kdv
field u parity=even lead=2
eq u = -d^3(u) + 6*u*d(u)
";

const SUSY_KDV: &str = "
system n1-skdv
field u parity=even lead=2
field xi parity=odd lead=2
eq u = -d^3(u) + 6*u*d(u) - 3*xi*d^2(xi)
eq xi = -d^3(xi) + 3*d(u)*xi + 3*u*d(xi)
";

fn main() {
    let kdv = parse_dsl(KDV).unwrap();
    for l0 in level0_seeds(&kdv).unwrap() {
        let mut seed = BranchSeed::new("kdv");
        seed.level0 = l0;
        print!("{}", verdict_text(&run_auto(&kdv, &seed, None).unwrap()));
    }

    let skdv = parse_dsl(SUSY_KDV).unwrap();
    let seed = BranchSeed::from_toml(
        "label = \"n1\"\nlevel0 = { u = \"2\" }\nfermions = { r = 2, relation = \"none\", k = \"none\" }\n",
    )
    .unwrap();
    print!("{}", verdict_text(&run_auto(&skdv, &seed, None).unwrap()));
}
