use std::collections::HashMap;
use std::fmt::Write;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::kernel::{integer_roots, Expression, GaussPoly, Parity, Sector, Symbol};
use crate::model::{jacobian_at_level, EvolutionSystem, FermionRelation, KRelation};
use crate::ring::{Gauss, Rational};

/// The level variable of recursion matrices.
pub fn n_symbol() -> Symbol {
    Symbol::param("n")
}

/// The fermionic lead as a variable.
pub fn r_symbol() -> Symbol {
    Symbol::param("r")
}

/// Lagrange interpolation with expression values.
pub fn interpolate_expr(points: &[(i64, Expression)], var: Symbol) -> Expression {
    let mut coeffs: Vec<Expression> = Vec::new();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = GaussPoly::constant(Gauss::one());
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                let d = Rational::from_integer(BigInt::from(xi - xj)).recip();
                basis = (&basis * &GaussPoly::linear_root(Gauss::int(*xj))).scale(&Gauss::real(d));
            }
        }
        for (d, c) in basis.coeffs().iter().enumerate() {
            if coeffs.len() <= d {
                coeffs.resize(d + 1, Expression::zero());
            }
            coeffs[d].add_scaled(yi, c);
        }
    }
    let x = Expression::symbol(var);
    coeffs.iter().rev().fold(Expression::zero(), |acc, c| &(&acc * &x) + c)
}

fn at(e: &Expression, var: Symbol, value: i64) -> Expression {
    let b: HashMap<Symbol, Expression> = [(var, Expression::int(value))].into_iter().collect();
    e.substitute_unchecked(&b)
}

/// Evolving fields of one sector, in field order.
pub(crate) fn sector_fields(sys: &EvolutionSystem, sector: Sector) -> Vec<usize> {
    let parity = match sector {
        Sector::Bosonic => Parity::Even,
        Sector::Fermionic => Parity::Odd,
    };
    sys.evolving().filter(|(_, f)| f.parity == parity).map(|(i, _)| i).collect()
}

const SAMPLES: std::ops::RangeInclusive<i64> = 1..=6;
const CHECKS: std::ops::RangeInclusive<i64> = 7..=9;

/// Coefficient matrix of the level-`n` unknowns of one sector as polynomials
/// in `n` (rows: relations, columns: unknowns, both in field order), with
/// the given level-0 values substituted.
pub fn recursion_matrix(
    sys: &EvolutionSystem,
    sector: Sector,
    level0: &HashMap<Symbol, Expression>,
) -> Result<Vec<Vec<Expression>>, EngineError> {
    let fields = sector_fields(sys, sector);
    let sample = |n: i64| -> Vec<Vec<Expression>> {
        jacobian_at_level(sys, n as i32, &fields)
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.substitute_unchecked(level0)).collect())
            .collect()
    };
    let samples: Vec<(i64, Vec<Vec<Expression>>)> = SAMPLES.map(|n| (n, sample(n))).collect();
    let checks: Vec<(i64, Vec<Vec<Expression>>)> = CHECKS.map(|n| (n, sample(n))).collect();
    let var = n_symbol();
    let mut out = vec![vec![Expression::zero(); fields.len()]; fields.len()];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let pts: Vec<(i64, Expression)> = samples.iter().map(|(n, m)| (*n, m[i][j].clone())).collect();
            let poly = interpolate_expr(&pts, var);
            if checks.iter().any(|(n, m)| at(&poly, var, *n) != m[i][j]) {
                return Err(EngineError::NotPolynomial);
            }
            *slot = poly;
        }
    }
    Ok(out)
}

/// The fermionic recursion matrix as a polynomial in both `n` and the lead
/// `r`.
pub fn fermion_matrix_in_r(
    sys: &EvolutionSystem,
    level0: &HashMap<Symbol, Expression>,
) -> Result<Vec<Vec<Expression>>, EngineError> {
    let per_r = |r: i64| recursion_matrix(&sys.with_fermion_lead(r as i32), Sector::Fermionic, level0);
    let samples: Vec<(i64, Vec<Vec<Expression>>)> = (-3..=3).map(|r| per_r(r).map(|m| (r, m))).collect::<Result<_, _>>()?;
    let checks: Vec<(i64, Vec<Vec<Expression>>)> = [-5, 4, 6].into_iter().map(|r| per_r(r).map(|m| (r, m))).collect::<Result<_, _>>()?;
    let var = r_symbol();
    let size = samples[0].1.len();
    let mut out = vec![vec![Expression::zero(); size]; size];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let pts: Vec<(i64, Expression)> = samples.iter().map(|(r, m)| (*r, m[i][j].clone())).collect();
            let poly = interpolate_expr(&pts, var);
            if checks.iter().any(|(r, m)| at(&poly, var, *r) != m[i][j]) {
                return Err(EngineError::NotPolynomial);
            }
            *slot = poly;
        }
    }
    Ok(out)
}

/// Determinant by cofactor expansion.
pub fn determinant(m: &[Vec<Expression>]) -> Expression {
    match m.len() {
        0 => Expression::one(),
        1 => m[0][0].clone(),
        size => {
            let mut acc = Expression::zero();
            for c in 0..size {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Expression>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = &m[0][c] * &determinant(&minor);
                if c % 2 == 0 {
                    acc.add_assign_ref(&term);
                } else {
                    acc = &acc - &term;
                }
            }
            acc
        }
    }
}

/// Determinant of a recursion matrix with its integer roots split off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonancePolynomial {
    pub coefficients: GaussPoly,
    /// Integer roots with multiplicity, ascending.
    pub roots: Vec<i64>,
    /// Cofactor with no integer root.
    pub residual: GaussPoly,
}

impl ResonancePolynomial {
    pub fn from_poly(p: GaussPoly) -> Self {
        let (roots, residual) = integer_roots(&p);
        ResonancePolynomial { coefficients: p, roots, residual }
    }

    /// Every root is an integer.
    pub fn is_integer(&self) -> bool {
        self.residual.degree() == Some(0)
    }

    /// `residual * prod (n - root)` reproduces the coefficients.
    pub fn is_consistent(&self) -> bool {
        &GaussPoly::from_roots(&self.roots) * &self.residual == self.coefficients
    }

    pub fn render_factored(&self) -> String {
        let mut out = String::new();
        if self.residual.degree() == Some(0) {
            let c = self.residual.leading();
            if c == -Gauss::one() {
                out.push('-');
            } else if c != Gauss::one() {
                let _ = write!(out, "{}*", Expression::gauss(c).render());
            }
        } else {
            let _ = write!(out, "({})", self.residual.render());
        }
        let mut roots: Vec<i64> = self.roots.clone();
        roots.sort_by(|a, b| b.cmp(a).reverse());
        let mut i = 0;
        while i < roots.len() {
            let r = roots[i];
            let mult = roots[i..].iter().take_while(|x| **x == r).count();
            let factor = match r {
                0 => "n".to_string(),
                r if r < 0 => format!("(n+{})", -r),
                r => format!("(n-{r})"),
            };
            out.push_str(&factor);
            if mult > 1 {
                let _ = write!(out, "^{mult}");
            }
            i += mult;
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

/// Exact determinant of a recursion matrix (polynomial in `n`), reduced to
/// its body, with integer roots extracted.
pub fn resonance_polynomial(matrix: &[Vec<Expression>]) -> Result<ResonancePolynomial, EngineError> {
    let det = determinant(matrix).filter_terms(|m| m.odd_degree() == 0);
    let poly = GaussPoly::from_expression(&det, n_symbol()).ok_or_else(|| EngineError::SymbolicMatrix(det.render()))?;
    if poly.is_zero() {
        return Err(EngineError::Degenerate);
    }
    Ok(ResonancePolynomial::from_poly(poly))
}

/// A fermionic lead admitted at level 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeadCandidate {
    pub r: i32,
    pub relation: FermionRelation,
    pub k: KRelation,
}

fn common_integer_roots(polys: &[GaussPoly]) -> Vec<i64> {
    let nonzero: Vec<&GaussPoly> = polys.iter().filter(|p| !p.is_zero()).collect();
    let Some(first) = nonzero.first() else { return Vec::new() };
    let mut roots = integer_roots(first).0;
    roots.dedup();
    roots.retain(|r| nonzero.iter().all(|p| p.eval(&Gauss::int(*r)).is_zero()));
    roots.sort_unstable_by(|a, b| b.cmp(a));
    roots
}

/// Fermionic leads `r` for which level 0 admits nonzero `xi_0`, for a
/// system with two odd fields. Values of `w_0` are read with `k = i`; for
/// `xi2_0 = k_0 xi1_0` the relation `Plus` takes `k_0 = i` and `Minus`
/// takes `k_0 = -i`. Type 1 leaves both `xi_0` free and needs the whole
/// level-0 matrix to vanish.
pub fn fermionic_leading_candidates(
    sys: &EvolutionSystem,
    level0: &HashMap<Symbol, Expression>,
) -> Result<Vec<LeadCandidate>, EngineError> {
    if sector_fields(sys, Sector::Fermionic).len() != 2 {
        return Ok(Vec::new());
    }
    let m = fermion_matrix_in_r(sys, level0)?;
    let b0: Vec<Vec<GaussPoly>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let body = at(e, n_symbol(), 0).filter_terms(|m| m.odd_degree() == 0);
                    GaussPoly::from_expression(&body, r_symbol()).ok_or_else(|| EngineError::SymbolicMatrix(body.render()))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (k, k0) in [(KRelation::Plus, Gauss::k()), (KRelation::Minus, -Gauss::k())] {
        let rows: Vec<GaussPoly> = b0.iter().map(|row| &row[0] + &row[1].scale(&k0)).collect();
        for r in common_integer_roots(&rows) {
            out.push(LeadCandidate { r: r as i32, relation: FermionRelation::Type2, k });
        }
    }
    let all: Vec<GaussPoly> = b0.iter().flatten().cloned().collect();
    for r in common_integer_roots(&all) {
        out.push(LeadCandidate { r: r as i32, relation: FermionRelation::Type1, k: KRelation::None });
    }
    Ok(out)
}
