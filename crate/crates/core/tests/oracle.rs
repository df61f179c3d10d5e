mod common;


use common::published::{matrix_fidelity, oracle_checks};
use superpainleve::atlas::fixture;
use superpainleve::engine::run_branch_full;
use superpainleve::kernel::Expression;
use superpainleve::model::residual_oracle;

#[test]
fn recursion_matrices_match_closed_forms() {
    assert_eq!(matrix_fidelity(), Vec::<String>::new());
}

#[test]
fn solved_series_satisfy_the_equations() {
    for (label, checked, bad) in oracle_checks() {
        assert!(checked > 0, "{label}");
        assert!(bad.is_empty(), "{label}: {bad:?}");
    }
}

#[test]
fn corrupted_coefficient_is_caught() {
    let e = fixture("II.core").unwrap();
    let sys = e.system.system();
    let mut run = run_branch_full(&sys, &e.seed, e.max_level).unwrap();
    let u2 = run.system.field("u").unwrap().coeff(2);
    let v = run.values.get(&u2).cloned().unwrap_or_else(|| Expression::symbol(u2));
    run.values.insert(u2, &v + &Expression::int(1));
    let out = residual_oracle(&run.system, &run.values, e.max_level);
    let first = out.iter().find(|o| !o.value.is_zero()).expect("a nonzero coefficient");
    assert_eq!(first.level, 2, "{}", first.value.render());
}
