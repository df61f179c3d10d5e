//! Closed-form resonance tables against the determinants, and the
//! enumerated branches of the c = 3 family.

use superpainleve::atlas::{check_a_tables, check_b_tables, enumerate_c3_branches, Class};

fn main() {
    for t in check_a_tables().unwrap().iter().chain(&check_b_tables().unwrap()) {
        println!("{:4} {:12} {}", if t.matches { "ok" } else { "DIFF" }, t.label, t.expected);
    }

    let branches = enumerate_c3_branches(10);
    println!();
    for c in branches.iter().filter(|c| c.class == Class::Principal) {
        println!("principal {}{:?}: alpha = {}, u0 = {}, w0 = {}, roots {:?}", c.family, c.index, c.alpha, c.u0, c.w0.render(), c.roots);
    }
    let np = branches.iter().filter(|c| c.class == Class::NonPrincipal).count();
    println!("{np} non-principal members with indices in [-10, 10]");
}
