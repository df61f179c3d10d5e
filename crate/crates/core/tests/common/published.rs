//! Published closed forms and the independent checks built on them.

use std::collections::HashMap;

use superpainleve::atlas::tables::{symbolic_core_matrix, symbolic_fermion_matrix};
use superpainleve::atlas::{fixtures, Expectation};
use superpainleve::engine::{n_symbol, r_symbol, run_branch_full};
use superpainleve::kernel::{parse_expression, Expression, NameTable, Symbol};
use superpainleve::model::residual_oracle;

/// Bosonic recursion matrix entries for `c = 3`, row by row.
pub const A_C3: [&str; 4] = [
    "(-(n-2)*(n-3) + 6*u0 + beta*w0^2)*(n-4)",
    "(-(alpha+2)*n^2 + (5*alpha+4)*n - 6*(alpha+1) + 2*beta*u0)*(n-4)*w0",
    "(alpha+2)*(n-3)*w0",
    "(-(n-1)*(n-2) + (alpha+2)*u0 + beta*w0^2)*(n-3)",
];

pub const A_C0: [&str; 4] = [
    "(-(n-2)*(n-3) + 6*u0 + beta*w0^2)*(n-4)",
    "(-(alpha-1)*n*(n+1) + 6*alpha*(n-1) + 2*beta*u0)*(n-4)*w0",
    "((alpha-1)*(n-3) - 6)*w0",
    "-(n-1)*(n-2)*(n-3) + (alpha-1)*(n-3)*u0 + 6*(n-1)*u0 + beta*(n-3)*w0^2",
];

/// Fermionic matrix in `n` and `r` with `c` left as a name.
pub const B: [&str; 4] = [
    "-(n-r)*(n-r-1)*(n-r-2) - 2*c*u0 + (6-c)*(n-r)*u0 + beta*(n-r-2)*w0^2",
    "-(c*(n-r)*(n-r-1) - (6-c)*(n-r) + (alpha-1)*(n-r-1)*(n-r-2))*w0",
    "(c*(n-r)*(n-r-1) - (6-c)*(n-r) + (alpha-1)*(n-r-1)*(n-r-2))*w0",
    "-(n-r)*(n-r-1)*(n-r-2) - 2*c*u0 + (6-c)*(n-r)*u0 + beta*(n-r-2)*w0^2",
];

pub fn parse(text: &str, c: i64) -> Expression {
    let mut names = NameTable::default();
    names.insert("n", Expression::symbol(n_symbol()));
    names.insert("r", Expression::symbol(r_symbol()));
    names.insert("c", Expression::int(c));
    for p in ["alpha", "beta", "u0", "w0"] {
        names.insert(p, Expression::symbol(Symbol::param(p)));
    }
    parse_expression(text, &mut names, None).expect("closed form parses")
}

fn at(e: &Expression, var: Symbol, v: i64) -> Expression {
    e.substitute_unchecked(&HashMap::from([(var, Expression::int(v))]))
}

/// Entries where the mechanical matrices differ from the closed forms,
/// checked at `n = 0..=10` (and `r = -4..=2` for the fermionic one).
pub fn matrix_fidelity() -> Vec<String> {
    let mut bad = Vec::new();
    for (c, closed) in [(3, A_C3), (0, A_C0)] {
        let m = symbolic_core_matrix(c).expect("core matrix");
        for (k, text) in closed.iter().enumerate() {
            let (mech, pub_) = (&m[k / 2][k % 2], parse(text, c));
            for n in 0..=10 {
                if at(mech, n_symbol(), n) != at(&pub_, n_symbol(), n) {
                    bad.push(format!("A c={c} entry {k} at n={n}"));
                }
            }
        }
    }
    for c in [3, 0] {
        let m = symbolic_fermion_matrix(c).expect("fermion matrix");
        for (k, text) in B.iter().enumerate() {
            let (mech, pub_) = (&m[k / 2][k % 2], parse(text, c));
            for r in -4..=2 {
                for n in 0..=10 {
                    let (x, y) = (at(&at(mech, r_symbol(), r), n_symbol(), n), at(&at(&pub_, r_symbol(), r), n_symbol(), n));
                    if x != y {
                        bad.push(format!("B c={c} entry {k} at r={r}, n={n}"));
                    }
                }
            }
        }
    }
    bad
}

/// For every passing bundled entry: the label, the number of checkable
/// coefficients, and the ones that do not vanish.
pub fn oracle_checks() -> Vec<(String, usize, Vec<String>)> {
    fixtures()
        .into_iter()
        .filter(|e| matches!(e.expected, Expectation::Pass { .. }))
        .map(|e| {
            let run = run_branch_full(&e.system.system(), &e.seed, e.max_level).expect("run");
            assert!(run.verdict.status.is_pass(), "{}: {}", e.label, run.verdict.status);
            let entries = residual_oracle(&run.system, &run.values, e.max_level);
            let bad = entries
                .iter()
                .filter(|o| !o.value.is_zero())
                .map(|o| format!("{} at level {}: {}", o.field, o.level, o.value.render()))
                .collect();
            (e.label, entries.len(), bad)
        })
        .collect()
}
