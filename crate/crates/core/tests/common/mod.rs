//! Strategies and checks shared by the property tests and the acceptance
//! target.
#![allow(dead_code)]

pub mod published;

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use superpainleve::kernel::{Expression, Parity, Symbol};
use superpainleve::ring::{rat, Gauss, GeneratorRegistry, GrassmannScalar};

pub const GENERATORS: usize = 5;

pub fn registry() -> &'static GeneratorRegistry {
    static R: OnceLock<GeneratorRegistry> = OnceLock::new();
    R.get_or_init(|| {
        let mut r = GeneratorRegistry::new();
        for i in 0..GENERATORS {
            r.register(&format!("e{i}")).unwrap();
        }
        r
    })
}

pub fn gauss() -> impl Strategy<Value = Gauss> {
    (-6i64..=6, 1i64..=4, -3i64..=3).prop_map(|(n, d, im)| Gauss::new(rat(n, d), rat(im, 1)))
}

pub fn scalar() -> impl Strategy<Value = GrassmannScalar> {
    prop::collection::vec((0u64..(1 << GENERATORS), gauss()), 0..6)
        .prop_map(|terms| GrassmannScalar::from_terms(registry().id(), terms))
}

/// A scalar whose terms all have the parity `odd`.
pub fn homogeneous(odd: bool) -> impl Strategy<Value = GrassmannScalar> {
    scalar().prop_map(move |s| {
        let kept = s.terms().iter().filter(|t| (t.0.count_ones() % 2 == 1) == odd).cloned().collect::<Vec<_>>();
        GrassmannScalar::from_terms(registry().id(), kept)
    })
}

/// An invertible scalar: nonzero body.
pub fn unit() -> impl Strategy<Value = GrassmannScalar> {
    (scalar(), gauss().prop_filter("nonzero", |g| !g.is_zero())).prop_map(|(s, b)| {
        let soul = s.soul();
        &soul + &GrassmannScalar::from_gauss(b)
    })
}

fn atoms() -> Vec<Symbol> {
    vec![
        Symbol::series("u", 2, Parity::Even),
        Symbol::series("w", 1, Parity::Even),
        Symbol::series("xi1", 0, Parity::Odd),
        Symbol::series("xi2", 3, Parity::Odd),
        Symbol::param("alpha"),
        Symbol::function("f", Parity::Even),
    ]
}

/// Terms as (coefficient, atom exponents); odd atoms get exponent 0 or 1.
pub type Terms = Vec<(Gauss, Vec<u32>)>;

pub fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((gauss(), prop::collection::vec(0u32..3, 6)), 0..5)
}

pub fn build(terms: &Terms) -> Expression {
    let atoms = atoms();
    let mut out = Expression::zero();
    for (c, exps) in terms {
        let mut t = Expression::gauss(c.clone());
        for (a, &e) in atoms.iter().zip(exps) {
            let e = if a.is_odd() { e.min(1) } else { e };
            t = &t * &Expression::symbol(*a).pow(e);
        }
        out = &out + &t;
    }
    out
}

pub fn expression() -> impl Strategy<Value = Expression> {
    terms().prop_map(|t| build(&t))
}

fn ensure(ok: bool, what: &str) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

pub fn mul_associative(a: &GrassmannScalar, b: &GrassmannScalar, c: &GrassmannScalar) -> Result<(), TestCaseError> {
    ensure(&(a * b) * c == a * &(b * c), "associativity")
}

pub fn distributive(a: &GrassmannScalar, b: &GrassmannScalar, c: &GrassmannScalar) -> Result<(), TestCaseError> {
    ensure(a * &(b + c) == &(a * b) + &(a * c) && &(a + b) * c == &(a * c) + &(b * c), "distributivity")
}

pub fn graded_commutative(a: &GrassmannScalar, pa: bool, b: &GrassmannScalar, pb: bool) -> Result<(), TestCaseError> {
    let ba = b * a;
    let expected = if pa && pb { -ba } else { ba };
    ensure(a * b == expected, "graded commutativity")
}

pub fn odd_squares_vanish(a: &GrassmannScalar) -> Result<(), TestCaseError> {
    ensure((a * a).is_zero(), "odd square")
}

pub fn inverse(a: &GrassmannScalar) -> Result<(), TestCaseError> {
    let inv = a.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure((a * &inv).is_one() && (&inv * a).is_one(), "inverse")
}

pub fn leibniz(a: &Expression, b: &Expression) -> Result<(), TestCaseError> {
    let lhs = (a * b).formal_dt();
    let rhs = &(&a.formal_dt() * b) + &(a * &b.formal_dt());
    ensure(lhs == rhs, "Leibniz rule")
}

/// Same polynomial through a different order of operations.
pub fn normal_form(t: &Terms, c: &Terms) -> Result<(), TestCaseError> {
    let mut rev = t.clone();
    rev.reverse();
    let (a, b) = (build(t), build(&rev));
    ensure(a == b, "term order")?;
    let split = t.len() / 2;
    let (lo, hi) = (build(&t[..split].to_vec()), build(&t[split..].to_vec()));
    let cc = build(c);
    ensure(&(&lo + &hi) * &cc == &(&lo * &cc) + &(&hi * &cc), "expanded product")?;
    ensure((&a - &b).is_zero(), "difference")
}

pub const CASES: u32 = 1500;

fn e<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{e:?}"))
}

/// Runs every property `CASES` times; returns the number of checks and the
/// failures.
pub fn run_all() -> (u64, Vec<String>) {
    let mut total = 0u64;
    let mut failures = Vec::new();
    let runner = || TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    let mut record = |name: &str, r: Result<(), String>| {
        total += CASES as u64;
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };
    record("associativity", e(runner().run(&(scalar(), scalar(), scalar()), |(a, b, c)| mul_associative(&a, &b, &c))));
    record("distributivity", e(runner().run(&(scalar(), scalar(), scalar()), |(a, b, c)| distributive(&a, &b, &c))));
    record(
        "graded commutativity",
        e(runner().run(&(any::<bool>(), any::<bool>()).prop_flat_map(|(p, q)| (homogeneous(p), Just(p), homogeneous(q), Just(q))), |(a, p, b, q)| {
            graded_commutative(&a, p, &b, q)
        })),
    );
    record("odd squares", e(runner().run(&homogeneous(true), |a| odd_squares_vanish(&a))));
    record("inverse", e(runner().run(&unit(), |a| inverse(&a))));
    record("Leibniz", e(runner().run(&(expression(), expression()), |(a, b)| leibniz(&a, &b))));
    record("normal form", e(runner().run(&(terms(), terms()), |(t, c)| normal_form(&t, &c))));
    (total, failures)
}
