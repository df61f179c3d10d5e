use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};

use super::resonance::sector_fields;
use super::EngineError;
use crate::kernel::{rational_roots, Expression, GaussPoly, Sector, Symbol};
use crate::model::EvolutionSystem;
use crate::ring::{Gauss, Rational};

/// One leading-order solution: level-0 value per even field.
pub type Level0Seed = BTreeMap<String, Expression>;

fn exact_sqrt(v: &Rational) -> Option<Rational> {
    let (n, d) = (v.numer().abs(), v.denom().clone());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == n && &sd * &sd == d).then(|| Rational::new(sn, sd))
}

fn univariate(e: &Expression, var: Symbol) -> Result<GaussPoly, EngineError> {
    GaussPoly::from_expression(e, var).ok_or_else(|| EngineError::SymbolicMatrix(e.render()))
}

fn bind(var: Symbol, value: &Expression) -> HashMap<Symbol, Expression> {
    [(var, value.clone())].into_iter().collect()
}

/// Rewrites `b^(2k)` as `big^k`, after dividing by `b^drop`. `None` when an
/// odd power remains.
fn even_in(e: &Expression, b: Symbol, drop: u32, big: Symbol) -> Option<Expression> {
    let mut out = Expression::zero();
    for (m, c) in e.terms() {
        let d = m.degree_in(b).checked_sub(drop)?;
        if d % 2 == 1 {
            return None;
        }
        let rest = Expression::term(c.clone(), m.without(b));
        out.add_assign_ref(&(&rest * &Expression::symbol(big).pow(d / 2)));
    }
    Some(out)
}

/// Nonzero rational solutions of the level-0 relations of a bosonic system
/// with one or two evolving fields and numeric parameters. For two fields
/// the second must enter its own relation through a factor `b_0`, and
/// only through `b_0^2` otherwise; `b_0 = s` or `b_0 = s i` with `s`
/// rational and positive.
pub fn level0_seeds(sys: &EvolutionSystem) -> Result<Vec<Level0Seed>, EngineError> {
    let fields = sector_fields(sys, Sector::Bosonic);
    let mut out: Vec<Level0Seed> = Vec::new();
    match fields.as_slice() {
        [a] => {
            let sa = sys.fields[*a].coeff(0);
            for root in rational_roots(&univariate(&sys.relation(*a, 0), sa)?) {
                if !root.is_zero() {
                    out.push([(sys.fields[*a].name.clone(), Expression::rational(root))].into_iter().collect());
                }
            }
        }
        [a, b] => {
            let (fa, fb) = (&sys.fields[*a], &sys.fields[*b]);
            let (sa, sb) = (fa.coeff(0), fb.coeff(0));
            let (ra, rb) = (sys.relation(*a, 0), sys.relation(*b, 0));
            let mut push = |va: Expression, vb: Expression| {
                if va.is_zero() && vb.is_zero() {
                    return;
                }
                out.push([(fa.name.clone(), va), (fb.name.clone(), vb)].into_iter().collect());
            };
            // b_0 = 0
            let zero_b = bind(sb, &Expression::zero());
            if rb.substitute_unchecked(&zero_b).is_zero() {
                for root in rational_roots(&univariate(&ra.substitute_unchecked(&zero_b), sa)?) {
                    push(Expression::rational(root), Expression::zero());
                }
            }
            // b_0 != 0, in terms of W = b_0^2
            let big = Symbol::param("W");
            let (Some(q), Some(p)) = (even_in(&rb, sb, 1, big), even_in(&ra, sb, 0, big)) else {
                return Ok(out);
            };
            let mut pairs: Vec<(Rational, Rational)> = Vec::new();
            let w_coeff = q.partial(big);
            if !q.partial(big).is_zero() && w_coeff.partial(big).is_zero() && w_coeff.as_gauss().is_some() {
                // W = -q0(a_0) / c
                let c = w_coeff.as_gauss().unwrap();
                let q0 = q.substitute_unchecked(&bind(big, &Expression::zero()));
                let w_of_a = q0.scale(&-c.inv().map_err(crate::kernel::KernelError::from)?);
                let reduced = p.substitute_unchecked(&bind(big, &w_of_a));
                for root in rational_roots(&univariate(&reduced, sa)?) {
                    let w = w_of_a.substitute_unchecked(&bind(sa, &Expression::rational(root.clone())));
                    if let Some(g) = w.as_gauss().filter(Gauss::is_real) {
                        pairs.push((root, g.re));
                    }
                }
            } else if q.partial(big).is_zero() {
                for root in rational_roots(&univariate(&q, sa)?) {
                    let pw = p.substitute_unchecked(&bind(sa, &Expression::rational(root.clone())));
                    for w in rational_roots(&univariate(&pw, big)?) {
                        pairs.push((root.clone(), w));
                    }
                }
            }
            for (va, w) in pairs {
                if w.is_zero() {
                    continue;
                }
                let Some(s) = exact_sqrt(&w) else { continue };
                let vb = if w.is_negative() { Gauss::new(Rational::zero(), s) } else { Gauss::real(s) };
                push(Expression::rational(va), Expression::gauss(vb));
            }
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_skdv;

    fn skdv_core(c: i64, alpha: i64, beta: i64) -> EvolutionSystem {
        build_skdv(Some(Expression::int(c)), Some(Expression::int(alpha)), Some(Expression::int(beta))).bosonic_core()
    }

    #[test]
    fn skdv1_core_has_the_known_seeds() {
        let seeds = level0_seeds(&skdv_core(3, 1, 3)).unwrap();
        let has = |u: Expression, w: Expression| seeds.iter().any(|s| s["u"] == u && s["w"] == w);
        assert!(has(Expression::int(1), Expression::gauss(Gauss::k())));
        assert!(has(Expression::int(2), Expression::zero()));
    }

    #[test]
    fn skdv4_core_has_half_seed() {
        let seeds = level0_seeds(&skdv_core(3, 4, 12)).unwrap();
        let half = Expression::rational(crate::ring::rat(1, 2));
        assert!(seeds.iter().any(|s| s["u"] == half && s["w"] == Expression::gauss(Gauss::k().scale(&crate::ring::rat(1, 2)))));
    }
}
