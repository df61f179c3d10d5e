use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::kernel::Parity;
use crate::model::EvolutionSystem;
use crate::ring::Rational;

/// Outcome of the dominant-balance analysis for the even fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeadBalance {
    /// Pole orders in field order.
    Poles(Vec<(String, i32)>),
    NonInteger { field: String, value: Rational },
    /// The weights are inconsistent or underdetermined, or some weight is
    /// not a positive pole order.
    NoBalance(String),
}

impl LeadBalance {
    pub fn pole(&self, field: &str) -> Option<i32> {
        match self {
            LeadBalance::Poles(p) => p.iter().find(|(f, _)| f == field).map(|(_, v)| *v),
            _ => None,
        }
    }
}

/// Pole orders of the even fields from degree homogeneity: with
/// `deg d/dx = 1` and `deg d/dt = 3`, every even-only monomial of the
/// equation for `F` must have degree `deg F + 3`. The pole order of `F` is
/// its degree.
pub fn leading_exponents_bosonic(sys: &EvolutionSystem) -> LeadBalance {
    let even: Vec<usize> = (0..sys.fields.len()).filter(|i| sys.fields[*i].parity == Parity::Even).collect();
    let col = |field: usize| even.iter().position(|e| *e == field);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (fi, f) in sys.evolving() {
        if f.parity != Parity::Even {
            continue;
        }
        let Some(target) = col(fi) else { continue };
        for (m, _) in sys.equations[fi].as_ref().unwrap().terms() {
            let mut row = vec![Rational::zero(); even.len() + 1];
            let mut usable = m.odd().is_empty();
            for (s, e) in m.even() {
                match sys.jet_of(*s).and_then(|(i, k)| col(i).map(|c| (c, k))) {
                    Some((c, k)) => {
                        row[c] += Rational::from_integer((*e as i64).into());
                        row[even.len()] -= Rational::from_integer((k as i64 * *e as i64).into());
                    }
                    None if s.is_constant() => {}
                    None => usable = false,
                }
            }
            if !usable {
                continue;
            }
            row[target] -= Rational::one();
            row[even.len()] += Rational::from_integer(3.into());
            if row.iter().any(|v| !v.is_zero()) {
                rows.push(row);
            }
        }
    }
    let n = even.len();
    let solution = match solve_rational(rows, n) {
        Ok(s) => s,
        Err(reason) => return LeadBalance::NoBalance(reason),
    };
    let mut out = Vec::new();
    for (c, v) in solution.into_iter().enumerate() {
        let name = sys.fields[even[c]].name.clone();
        if !v.is_integer() {
            return LeadBalance::NonInteger { field: name, value: v };
        }
        match v.to_integer().to_i32() {
            Some(p) if p > 0 => out.push((name, p)),
            _ => return LeadBalance::NoBalance(format!("`{name}` has no pole (weight {v})")),
        }
    }
    LeadBalance::Poles(out)
}

/// Solves `sum_j a_ij x_j = b_i` (row layout `[a_i0 .. a_in-1, b_i]`) for a
/// unique solution.
fn solve_rational(mut rows: Vec<Vec<Rational>>, n: usize) -> Result<Vec<Rational>, String> {
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).max_by_key(|i| rows[*i][c].abs()) else { break };
        if rows[p][c].is_zero() {
            continue;
        }
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=n {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return Err("inconsistent weights".into());
    }
    if pivot_cols.len() < n {
        return Err("no nonlinear balance fixes every weight".into());
    }
    Ok((0..n).map(|i| rows[i][n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Expression, Symbol};
    use crate::model::{build_osp22, build_skdv, dx, FieldSpec};

    #[test]
    fn skdv_and_osp_balances() {
        let sys = build_skdv(None, None, None);
        assert_eq!(leading_exponents_bosonic(&sys), LeadBalance::Poles(vec![("u".into(), 2), ("w".into(), 1)]));
        let osp = leading_exponents_bosonic(&build_osp22());
        assert_eq!(osp.pole("u"), Some(2));
        assert_eq!(osp.pole("w"), Some(1));
    }

    #[test]
    fn linear_system_has_no_balance() {
        let mut sys = EvolutionSystem::new("heat", &[], vec![FieldSpec::new("u", Parity::Even, 1)]);
        let u = Expression::symbol(Symbol::jet("u", 0, Parity::Even));
        sys.set_equation("u", dx(&dx(&u))).unwrap();
        assert!(matches!(leading_exponents_bosonic(&sys), LeadBalance::NoBalance(_)));
    }

    #[test]
    fn fractional_weight_is_reported() {
        // u_t = u_xxx + u^3 gives 3 deg u = deg u + 3
        let mut sys = EvolutionSystem::new("frac", &[], vec![FieldSpec::new("u", Parity::Even, 1)]);
        let u = Expression::symbol(Symbol::jet("u", 0, Parity::Even));
        let eq = &Expression::symbol(Symbol::jet("u", 3, Parity::Even)) + &u.pow(3);
        sys.set_equation("u", eq).unwrap();
        assert_eq!(
            leading_exponents_bosonic(&sys),
            LeadBalance::NonInteger { field: "u".into(), value: crate::ring::rat(3, 2) }
        );
    }
}
