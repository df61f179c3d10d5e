//! Closed-form resonance polynomials of the bosonic core (`A(n)`) and of the
//! fermionic sector (`B(n)`), with the seeds they belong to, and their
//! comparison against the mechanically computed determinants.

use std::collections::HashMap;

use serde::Serialize;

use super::AtlasError;
use crate::engine::{determinant, fermion_matrix_in_r, n_symbol, r_symbol, recursion_matrix, ResonancePolynomial};
use crate::kernel::{parse_ratfunc, Expression, GaussPoly, NameTable, Parity, RatFunc, Sector, Symbol};
use crate::model::{build_skdv, EvolutionSystem};

/// An `A(n)` closed form: `bindings` fix some of `alpha, beta, u0` (and
/// possibly `w0`), `w0_squared` rewrites `w0^2`, `aux` defines shorthand
/// such as `m` used in `formula`.
#[derive(Clone, Copy, Debug)]
pub struct ATable {
    pub label: &'static str,
    pub c: i64,
    pub bindings: &'static [(&'static str, &'static str)],
    pub w0_squared: Option<&'static str>,
    pub aux: &'static [(&'static str, &'static str)],
    pub formula: &'static str,
    pub provenance: &'static str,
}

pub const A_TABLES: &[ATable] = &[
    ATable {
        label: "c3.ii",
        c: 3,
        bindings: &[("u0", "2"), ("w0", "0")],
        w0_squared: None,
        aux: &[],
        formula: "(n+1)*(n-3)*(n-4)*(n-6)*(n^2-3*n-2*(alpha+1))",
        provenance: "app. A, c=3 (ii)",
    },
    ATable {
        label: "c3.iii",
        c: 3,
        bindings: &[("alpha", "-2"), ("u0", "2"), ("w0", "0")],
        w0_squared: None,
        aux: &[],
        formula: "(n+1)*(n-1)*(n-2)*(n-3)*(n-4)*(n-6)",
        provenance: "app. A, c=3 (iii)",
    },
    ATable {
        label: "c3.iv",
        c: 3,
        bindings: &[("alpha", "-1")],
        w0_squared: Some("-(3/beta)*(u0-2)"),
        aux: &[],
        formula: "(n+1)*n*(n-3)*(n-4)*(n^2-9*n-(u0-20)-(3/beta)*(u0-2))",
        provenance: "app. A, c=3 (iv)",
    },
    ATable {
        label: "c3.iv.beta",
        c: 3,
        bindings: &[("alpha", "-1"), ("beta", "-3")],
        w0_squared: Some("u0-2"),
        aux: &[],
        formula: "(n+1)*n*(n-3)^2*(n-4)*(n-6)",
        provenance: "app. A, c=3 (iv), beta = -3",
    },
    ATable {
        label: "c3.v",
        c: 3,
        bindings: &[("alpha", "-1"), ("beta", "3*(u0-2)/(3*u0^2-7*u0+12)")],
        w0_squared: Some("-(3*u0^2-7*u0+12)"),
        aux: &[],
        formula: "(n+1)*n*(n-3)*(n-4)*((n-1)*(n-8)-3*u0*(u0-2))",
        provenance: "app. A, c=3 (v)",
    },
    ATable {
        label: "c3.vi",
        c: 3,
        bindings: &[("alpha", "-1"), ("beta", "-8/3"), ("u0", "-4/3")],
        w0_squared: Some("-15/4"),
        aux: &[],
        formula: "(n+1)*n*(n-3)*(n-4)*(n^2-9*n+211/12)",
        provenance: "app. A, c=3 (vi)",
    },
    ATable {
        label: "c3.vii",
        c: 3,
        bindings: &[("beta", "3*((alpha+2)*u0-2)/u0^2")],
        w0_squared: Some("-u0^2"),
        aux: &[("m", "4-(alpha+2)*u0")],
        formula: "(n+1)*(n-3)*(n-4)*(n-m)*(n^2+(m-9)*n+6*(4-u0-m))",
        provenance: "app. A, c=3 (vii)",
    },
    ATable {
        label: "c3.viii",
        c: 3,
        bindings: &[("beta", "(alpha+2)^2/3"), ("u0", "3/(alpha+2)")],
        w0_squared: Some("-u0^2"),
        aux: &[],
        formula: "(n+1)*(n-1)*(n-3)*(n-4)*(n^2-8*n-6*(u0-3))",
        provenance: "app. A, c=3 (viii)",
    },
    ATable {
        label: "c3.ix",
        c: 3,
        bindings: &[("beta", "-9/8*alpha*(5*alpha+4)"), ("u0", "4/(5*alpha+4)")],
        w0_squared: Some("-u0^2"),
        aux: &[],
        formula: "(n+1)*(n-1)*(n-3)*(n-4)*(n+6/5*u0-16/5)*(n-6/5*u0-24/5)",
        provenance: "app. A, c=3 (ix)",
    },
    ATable {
        label: "c0.ii",
        c: 0,
        bindings: &[("u0", "2"), ("w0", "0")],
        w0_squared: None,
        aux: &[],
        formula: "(n+1)*(n-4)*(n-6)*(n^3-6*n^2+n-2*alpha*(n-3))",
        provenance: "app. A, c=0 (ii)",
    },
    ATable {
        label: "c0.iii",
        c: 0,
        bindings: &[("alpha", "1"), ("u0", "2"), ("w0", "0")],
        w0_squared: None,
        aux: &[],
        formula: "(n+1)^2*(n-1)*(n-4)*(n-6)^2",
        provenance: "app. A, c=0 (iii)",
    },
    ATable {
        label: "c0.iv",
        c: 0,
        bindings: &[("alpha", "0")],
        w0_squared: Some("-(3/beta)*(u0-2)"),
        aux: &[],
        formula: "(n+1)*n*(n-4)*(n^3-12*n^2-(1/beta)*((3+5*beta)*u0-47*beta-6)*n-9*(1-3*beta)/beta*u0+6*(3-10*beta)/beta)",
        provenance: "app. A, c=0 (iv)",
    },
    ATable {
        label: "c0.v",
        c: 0,
        bindings: &[("alpha", "0"), ("u0", "12*(1-beta)/(6-11*beta)")],
        w0_squared: Some("-30/(6-11*beta)"),
        aux: &[],
        formula: "(n+1)*n*(n-1)*(n-4)*(n^2-11*n+(126-336*beta)/(6-11*beta))",
        provenance: "app. A, c=0 (v)",
    },
    ATable {
        label: "c0.vi",
        c: 0,
        bindings: &[("alpha", "((beta*u0-3)*u0+6)/(3*u0)")],
        w0_squared: Some("-u0^2"),
        aux: &[],
        formula: "(n+1)*(n-4)*(n^2+(1/3*beta*u0^2-2*u0-5)*n-beta*u0^2+6)\
                  *(n^2-(1/3*beta*u0^2-2*u0+7)*n-6*u0+2*beta*u0^2+12)",
        provenance: "app. A, c=0 (vi)",
    },
    ATable {
        label: "c0.vii",
        c: 0,
        bindings: &[("alpha", "(3-2*u0)/u0"), ("beta", "-3*(u0-1)/u0^2")],
        w0_squared: Some("-u0^2"),
        aux: &[("m", "3*(u0+1)")],
        formula: "(n+1)*(n-1)*(n-4)*(n-m)*(n^2+(m-11)*n-2*(2*m-15))",
        provenance: "app. A, c=0 (vii)",
    },
    ATable {
        label: "c0.viii",
        c: 0,
        bindings: &[("alpha", "(4-u0)/(5*u0)"), ("beta", "6/5*(2*u0-3)/u0^2")],
        w0_squared: Some("-u0^2"),
        aux: &[("m", "6/5*(4-u0)")],
        formula: "(n+1)*(n-1)*(n-4)*(n-m)*(n^2-(11-m)*n+2*m)",
        provenance: "app. A, c=0 (viii)",
    },
    ATable {
        label: "c0.ix",
        c: 0,
        bindings: &[("alpha", "1/3"), ("beta", "0"), ("u0", "3/2")],
        w0_squared: Some("-9/4"),
        aux: &[],
        formula: "(n+1)*(n-1)*(n-3)*(n-4)*(n^2-8*n+6)",
        provenance: "app. A, c=0 (ix)",
    },
    ATable {
        label: "c0.x",
        c: 0,
        bindings: &[("beta", "0"), ("u0", "2/(alpha+1)")],
        w0_squared: Some("-u0^2"),
        aux: &[("m", "2*(2-u0)")],
        formula: "(n+1)*(n-3)*(n-4)*(n-m)*(n^2+(m-9)*n+6)",
        provenance: "app. A, c=0 (x)",
    },
    ATable {
        label: "c0.xi",
        c: 0,
        bindings: &[("alpha", "0"), ("beta", "0"), ("u0", "2")],
        w0_squared: None,
        aux: &[],
        formula: "(n+1)*n*(n-4)*(n^3-12*n^2+w0^2*n+37*n-6+3*w0^2)",
        provenance: "app. A, c=0 (xi)",
    },
    ATable {
        label: "c0.xii",
        c: 0,
        bindings: &[("alpha", "0"), ("beta", "0"), ("u0", "2")],
        w0_squared: Some("-5"),
        aux: &[],
        formula: "(n+1)*n*(n-1)*(n-4)*(n^2-11*n+21)",
        provenance: "app. A, c=0 (xii)",
    },
];

/// A `B(n)` closed form for one of the five bosonic solutions at a given
/// fermionic lead `r`.
#[derive(Clone, Copy, Debug)]
pub struct BTable {
    pub case: &'static str,
    pub r: i32,
    pub formula: &'static str,
}

pub const B_TABLES: &[BTable] = &[
    BTable { case: "I", r: 2, formula: "n*(n-2)*(n-3)*(n-4)^2*(n-5)" },
    BTable { case: "I", r: 0, formula: "(n^5-4*n^4-n^3+16*n^2-12*n+36)*(n-2)" },
    BTable { case: "I", r: -1, formula: "(n^5+n^4-7*n^3-n^2+6*n+54)*(n-1)" },
    BTable { case: "I", r: -2, formula: "(n^5+6*n^4+7*n^3-6*n^2-8*n+72)*n" },
    BTable { case: "I", r: -3, formula: "(n^5+11*n^4+41*n^3+61*n^2+30*n+90)*(n+1)" },
    BTable { case: "II", r: 2, formula: "n*(n-2)^2*(n-4)^2*(n-6)" },
    BTable { case: "II", r: 0, formula: "(n^4-4*n^3-4*n^2+52*n-54)*n*(n-2)" },
    BTable { case: "II", r: -2, formula: "(n^4+4*n^3-4*n^2+56*n-36)*(n+2)*n" },
    BTable { case: "II", r: -4, formula: "(n^4+12*n^3+44*n^2+156*n+54)*(n+4)*(n+2)" },
    BTable { case: "III", r: 2, formula: "n*(n-2)*(n-3)*(n-4)^2*(n-5)" },
    BTable { case: "III", r: 0, formula: "(n^4-2*n^3-5*n^2+42*n-18)*(n-2)^2" },
    BTable { case: "III", r: -1, formula: "(n^5+n^4-7*n^3+53*n^2-48*n-81/2)*(n-1)" },
    BTable { case: "III", r: -2, formula: "(n^4+7*n^3+14*n^2+80*n+108)*n*(n-1)" },
    BTable { case: "III", r: -3, formula: "(n^5+11*n^4+41*n^3+151*n^2+210*n-225/2)*(n+1)" },
    BTable { case: "IV", r: 2, formula: "n*(n-2)^2*(n-3)*(n-4)*(n-7)" },
    BTable { case: "IV", r: 0, formula: "(n+2)*n^2*(n-1)*(n-2)*(n-5)" },
    BTable { case: "IV", r: -1, formula: "(n+3)*(n+1)^2*(n-1)*n*(n-4)" },
    BTable { case: "IV", r: -2, formula: "(n+4)*(n+2)^2*(n+1)*n*(n-3)" },
    BTable { case: "IV", r: -5, formula: "(n+7)*(n+5)^2*(n+4)*(n+3)*n" },
    BTable { case: "V", r: 2, formula: "n^2*(n-4)^2*(n-5)^2" },
    BTable { case: "V", r: -2, formula: "(n+4)^2*n^2*(n-1)^2" },
    BTable { case: "V", r: -3, formula: "(n+5)^2*(n+1)^2*n^2" },
];

/// Bosonic data `(c, alpha, beta, u0, w0)` of the five solutions whose
/// fermionic extension is analysed, with `k = i`.
pub const FERMIONIC_CASES: &[(&str, [&str; 5])] = &[
    ("I", ["3", "-2", "-6", "-1", "i"]),
    ("II", ["3", "1", "3", "1", "i"]),
    ("III", ["3", "4", "12", "1/2", "1/2*i"]),
    ("IV", ["0", "1", "0", "1", "i"]),
    ("V", ["3", "-2", "-6", "2", "0"]),
];

fn names() -> NameTable {
    let mut t = NameTable::default();
    for p in ["alpha", "beta", "u0", "w0", "m"] {
        t.insert(p, Expression::symbol(Symbol::param(p)));
    }
    t.insert("n", Expression::symbol(n_symbol()));
    t.insert("r", Expression::symbol(r_symbol()));
    t
}

pub(crate) fn ratfunc(text: &str) -> Result<RatFunc, AtlasError> {
    parse_ratfunc(text, &mut names(), None).map_err(|e| AtlasError::Table(format!("`{text}`: {e}")))
}

fn poly_in_n(text: &str) -> Result<GaussPoly, AtlasError> {
    let r = ratfunc(text)?;
    r.as_polynomial()
        .and_then(|e| GaussPoly::from_expression(e, n_symbol()))
        .ok_or_else(|| AtlasError::Table(format!("`{text}` is not a polynomial in n")))
}

/// Generic level-0 bindings `u_0 -> u0`, `w_0 -> w0` (symbolic).
pub(crate) fn symbolic_level0() -> HashMap<Symbol, Expression> {
    [("u", "u0"), ("w", "w0")]
        .into_iter()
        .map(|(f, p)| (Symbol::series(f, 0, Parity::Even), Expression::symbol(Symbol::param(p))))
        .collect()
}

/// Bosonic-core recursion matrix of the family at fixed `c` with `alpha`,
/// `beta`, `u0`, `w0` symbolic.
pub fn symbolic_core_matrix(c: i64) -> Result<Vec<Vec<Expression>>, AtlasError> {
    let sys = build_skdv(Some(Expression::int(c)), None, None).bosonic_core();
    Ok(recursion_matrix(&sys, Sector::Bosonic, &symbolic_level0())?)
}

/// Fermionic recursion matrix in `n` and `r` with `alpha`, `beta`, `u0`,
/// `w0` symbolic.
pub fn symbolic_fermion_matrix(c: i64) -> Result<Vec<Vec<Expression>>, AtlasError> {
    let sys = build_skdv(Some(Expression::int(c)), None, None);
    Ok(fermion_matrix_in_r(&sys, &symbolic_level0())?)
}

/// Outcome of comparing one closed form with its determinant.
#[derive(Clone, Debug, Serialize)]
pub struct TableCheck {
    pub label: String,
    pub provenance: String,
    pub expected: String,
    pub matches: bool,
}

fn specialize(e: &RatFunc, table: &ATable) -> Result<RatFunc, AtlasError> {
    let w0 = Symbol::param("w0");
    let mut out = e.clone();
    for (name, value) in table.aux {
        let b = HashMap::from([(Symbol::param(name), ratfunc(value)?)]);
        out = out.substitute(&b);
    }
    if let Some(sq) = table.w0_squared {
        out = out.reduce_square(w0, &ratfunc(sq)?);
    }
    let mut b = HashMap::new();
    for (name, value) in table.bindings {
        b.insert(Symbol::param(name), ratfunc(value)?);
    }
    Ok(out.substitute(&b))
}

/// Compares an `A(n)` closed form with the determinant of the symbolic
/// bosonic-core matrix specialized to the table's seed.
pub fn check_a_table(table: &ATable, matrix: &[Vec<Expression>]) -> Result<TableCheck, AtlasError> {
    let det = RatFunc::poly(determinant(matrix));
    let mechanical = specialize(&det, table)?;
    let printed = specialize(&ratfunc(table.formula)?, table)?;
    Ok(TableCheck {
        label: table.label.to_string(),
        provenance: table.provenance.to_string(),
        expected: table.formula.to_string(),
        matches: mechanical.equals(&printed),
    })
}

/// Every `A(n)` closed form against the mechanical determinant.
pub fn check_a_tables() -> Result<Vec<TableCheck>, AtlasError> {
    let m3 = symbolic_core_matrix(3)?;
    let m0 = symbolic_core_matrix(0)?;
    A_TABLES.iter().map(|t| check_a_table(t, if t.c == 3 { &m3 } else { &m0 })).collect()
}

fn case_level0(case: &str) -> Result<(i64, HashMap<Symbol, RatFunc>), AtlasError> {
    let (_, v) = FERMIONIC_CASES
        .iter()
        .find(|(c, _)| *c == case)
        .ok_or_else(|| AtlasError::Usage(format!("unknown fermionic case `{case}`")))?;
    let c: i64 = v[0].parse().expect("integer c");
    let mut b = HashMap::new();
    for (name, text) in ["alpha", "beta", "u0", "w0"].iter().zip(&v[1..]) {
        b.insert(Symbol::param(name), ratfunc(text)?);
    }
    Ok((c, b))
}

/// The printed `B(n)` of a case at lead `r`.
pub fn fermionic_b_polynomial(case: &str, r: i32) -> Result<ResonancePolynomial, AtlasError> {
    let t = B_TABLES
        .iter()
        .find(|t| t.case == case && t.r == r)
        .ok_or_else(|| AtlasError::Usage(format!("no B(n) listed for case {case} at r = {r}")))?;
    Ok(ResonancePolynomial::from_poly(poly_in_n(t.formula)?))
}

/// Mechanical `B(n)`: determinant of the symbolic fermion matrix at the
/// case's bosonic data and lead `r`.
pub fn mechanical_b_polynomial(case: &str, r: i32, matrix: &[Vec<Expression>]) -> Result<GaussPoly, AtlasError> {
    let (_, mut b) = case_level0(case)?;
    b.insert(r_symbol(), RatFunc::poly(Expression::int(r as i64)));
    let det = RatFunc::poly(determinant(matrix)).substitute(&b);
    det.as_polynomial()
        .and_then(|e| GaussPoly::from_expression(e, n_symbol()))
        .ok_or_else(|| AtlasError::Table(format!("B(n) for {case} at r = {r} is not numeric")))
}

/// Every `B(n)` closed form against the mechanical determinant.
pub fn check_b_tables() -> Result<Vec<TableCheck>, AtlasError> {
    let m3 = symbolic_fermion_matrix(3)?;
    let m0 = symbolic_fermion_matrix(0)?;
    B_TABLES
        .iter()
        .map(|t| {
            let (c, _) = case_level0(t.case)?;
            let mech = mechanical_b_polynomial(t.case, t.r, if c == 3 { &m3 } else { &m0 })?;
            let printed = poly_in_n(t.formula)?;
            Ok(TableCheck {
                label: format!("B.{}.r{}", t.case, t.r),
                provenance: format!("app. B, case ({})", t.case),
                expected: t.formula.to_string(),
                matches: mech == printed,
            })
        })
        .collect()
}

/// The system a fermionic case lives in.
pub fn case_system(case: &str) -> Result<EvolutionSystem, AtlasError> {
    let (c, _) = case_level0(case)?;
    Ok(build_skdv(Some(Expression::int(c)), None, None))
}
