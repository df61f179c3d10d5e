use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use super::{EvolutionSystem, ModelError};
use crate::kernel::{Expression, Parity, Sector, Symbol};
use crate::ring::{Gauss, Rational};

/// Kruskal manifold `phi = x - f(t)`; `phi_t = -f'`.
pub fn manifold_fn() -> Symbol {
    Symbol::function("f", Parity::Even)
}

fn falling(x: i64, k: u32) -> i64 {
    (0..k as i64).map(|i| x - i).product()
}

fn gint(v: i64) -> Gauss {
    Gauss::real(Rational::from_integer(BigInt::from(v)))
}

/// One factor of a jet monomial: field index, x-order.
type Factor = (usize, u32);

/// Expands a monomial into its jet factors (repeated by multiplicity) and
/// the non-jet remainder, keeping the monomial's own factor order.
fn split_monomial(sys: &EvolutionSystem, m: &crate::kernel::Monomial) -> (Vec<Factor>, Expression) {
    let mut factors = Vec::new();
    let mut rest = Expression::one();
    for (s, e) in m.even() {
        match sys.jet_of(*s) {
            Some(j) => factors.extend(std::iter::repeat_n(j, *e as usize)),
            None => rest = &rest * &Expression::symbol(*s).pow(*e),
        }
    }
    for s in m.odd() {
        match sys.jet_of(*s) {
            Some(j) => factors.push(j),
            None => rest = &rest * &Expression::symbol(*s),
        }
    }
    (factors, rest)
}

/// Calls `visit` with every tuple of nonnegative integers of the given
/// length summing to `total`.
fn compositions(len: usize, total: i64, visit: &mut dyn FnMut(&[i64])) {
    fn go(buf: &mut Vec<i64>, len: usize, left: i64, visit: &mut dyn FnMut(&[i64])) {
        if buf.len() + 1 == len {
            buf.push(left);
            visit(buf);
            buf.pop();
            return;
        }
        for v in 0..=left {
            buf.push(v);
            go(buf, len, left - v, visit);
            buf.pop();
        }
    }
    if total < 0 {
        return;
    }
    if len == 0 {
        if total == 0 {
            visit(&[]);
        }
        return;
    }
    go(&mut Vec::with_capacity(len), len, total, visit);
}

impl EvolutionSystem {
    /// Lowest level at which some relation can be nonzero:
    /// `min(0, min over monomials of sum(-p - k) + p_F + 3)`.
    pub fn start_level(&self) -> i32 {
        let mut start = 0i32;
        for (idx, f) in self.evolving() {
            let eq = self.equations[idx].as_ref().unwrap();
            for (m, _) in eq.terms() {
                let (factors, _) = split_monomial(self, m);
                let lowest: i32 = factors.iter().map(|(i, k)| -self.fields[*i].lead - *k as i32).sum();
                start = start.min(lowest + f.lead + 3);
            }
        }
        start
    }

    /// Coefficient of `phi^(n - p_F - 3)` in `rhs_F - F_t` after the series
    /// substitution; symbols are the series coefficients `F_m`, `m >= 0`,
    /// and `f'`.
    pub fn relation(&self, field: usize, n: i32) -> Expression {
        let spec = &self.fields[field];
        let Some(eq) = &self.equations[field] else { return Expression::zero() };
        let mut out = Expression::zero();
        for (m, c) in eq.terms() {
            let (factors, rest) = split_monomial(self, m);
            let shift: i64 = factors.iter().map(|(i, k)| (self.fields[*i].lead + *k as i32) as i64).sum();
            let total = n as i64 - spec.lead as i64 - 3 + shift;
            let base = &Expression::term(c.clone(), crate::kernel::Monomial::one()) * &rest;
            compositions(factors.len(), total, &mut |idx| {
                let mut coeff = 1i64;
                let mut prod = base.clone();
                for ((fi, k), mi) in factors.iter().zip(idx) {
                    let fs = &self.fields[*fi];
                    coeff *= falling(*mi - fs.lead as i64, *k);
                    if coeff == 0 {
                        return;
                    }
                    prod = &prod * &Expression::symbol(fs.coeff(*mi as i32));
                }
                out.add_scaled(&prod, &gint(coeff));
            });
        }
        // - F_t = -(F_{n-3}' - (n - 2 - p) f' F_{n-2})
        if n - 3 >= 0 {
            out = &out - &Expression::symbol(spec.coeff(n - 3).dt().unwrap());
        }
        if n - 2 >= 0 {
            let fp = Expression::symbol(manifold_fn().dt().unwrap());
            let t = &fp * &Expression::symbol(spec.coeff(n - 2));
            out.add_scaled(&t, &gint((n - 2 - spec.lead) as i64));
        }
        out
    }
}

/// All relations of one level, tagged with field and sector.
#[derive(Clone, Debug)]
pub struct LevelRelations {
    pub level: i32,
    pub entries: Vec<(usize, Sector, Expression)>,
}

impl LevelRelations {
    pub fn sector(&self, s: Sector) -> impl Iterator<Item = &(usize, Sector, Expression)> {
        self.entries.iter().filter(move |e| e.1 == s)
    }
}

pub fn sector_of(p: Parity) -> Sector {
    match p {
        Parity::Even => Sector::Bosonic,
        Parity::Odd => Sector::Fermionic,
    }
}

/// Mechanically generated level-`n` relations for every evolving field.
pub fn recursion_at_level(sys: &EvolutionSystem, n: i32) -> Result<LevelRelations, ModelError> {
    let start = sys.start_level();
    if n < start {
        return Err(ModelError::LevelBelowStart { level: n, start });
    }
    let entries = sys
        .evolving()
        .map(|(i, f)| (i, sector_of(f.parity), sys.relation(i, n)))
        .collect();
    Ok(LevelRelations { level: n, entries })
}

/// `d R_G(n) / d F_n` for `G`, `F` ranging over `fields` (rows, columns).
pub fn jacobian_at_level(sys: &EvolutionSystem, n: i32, fields: &[usize]) -> Vec<Vec<Expression>> {
    fields
        .iter()
        .map(|g| {
            let r = sys.relation(*g, n);
            fields.iter().map(|f| r.partial(sys.fields[*f].coeff(n))).collect()
        })
        .collect()
}

/// Laurent polynomial in `phi` with expression coefficients.
#[derive(Clone, Debug, Default)]
struct Laurent(BTreeMap<i64, Expression>);

impl Laurent {
    fn add_term(&mut self, p: i64, e: &Expression) {
        if e.is_zero() {
            return;
        }
        let slot = self.0.entry(p).or_default();
        slot.add_assign_ref(e);
        if slot.is_zero() {
            self.0.remove(&p);
        }
    }

    fn dx(&self) -> Laurent {
        let mut out = Laurent::default();
        for (p, c) in &self.0 {
            out.add_term(p - 1, &c.scale(&gint(*p)));
        }
        out
    }

    fn dt(&self) -> Laurent {
        let fp = Expression::symbol(manifold_fn().dt().unwrap());
        let mut out = Laurent::default();
        for (p, c) in &self.0 {
            out.add_term(*p, &c.formal_dt());
            out.add_term(p - 1, &(&fp * c).scale(&gint(-p)));
        }
        out
    }

    /// Product keeping only powers strictly below `cap`.
    fn mul(&self, o: &Laurent, cap: i64) -> Laurent {
        let mut out = Laurent::default();
        for (p, a) in &self.0 {
            for (q, b) in &o.0 {
                if p + q < cap {
                    out.add_term(p + q, &(a * b));
                }
            }
        }
        out
    }
}

/// Rewrites `t`-derivatives of static-field coefficients. A field without
/// an equation depends on `x` alone, so its expansion obeys
/// `w_k' = (k - p + 1) f' w_{k+1}`; applying this to every derived
/// coefficient leaves only underived ones.
pub fn reduce_static_derivatives(sys: &EvolutionSystem, e: &Expression) -> Expression {
    let statics: HashMap<String, (i32, Parity)> = sys
        .fields
        .iter()
        .zip(&sys.equations)
        .filter(|(_, eq)| eq.is_none())
        .map(|(f, _)| (f.name.clone(), (f.lead, f.parity)))
        .collect();
    if statics.is_empty() {
        return e.clone();
    }
    let is_static = |s: Symbol| s.kind() == crate::kernel::SymbolKind::Series && statics.contains_key(&s.desc().name);
    let derived: Vec<Symbol> = e.symbols().into_iter().filter(|s| is_static(*s) && s.dt_order() > 0).collect();
    if derived.is_empty() {
        return e.clone();
    }
    let fp = Expression::symbol(manifold_fn().dt().expect("function"));
    let first = |s: Symbol| -> Expression {
        let name = s.desc().name.clone();
        let (lead, parity) = statics[&name];
        let k = s.level().unwrap_or(0);
        let next = Expression::symbol(Symbol::series(&name, k + 1, parity));
        (&fp * &next).scale(&gint((k - lead + 1) as i64))
    };
    let mut bindings = HashMap::new();
    for s in derived {
        let mut v = Expression::symbol(s.base());
        for _ in 0..s.dt_order() {
            let d = v.formal_dt();
            let firsts: HashMap<Symbol, Expression> = d.symbols().into_iter().filter(|t| is_static(*t) && t.dt_order() == 1).map(|t| (t, first(t.base()))).collect();
            v = d.substitute_unchecked(&firsts);
        }
        bindings.insert(s, v);
    }
    e.substitute_unchecked(&bindings)
}

/// One checkable coefficient of the direct substitution.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleEntry {
    pub field: String,
    pub level: i32,
    pub value: Expression,
}

/// Substitutes the series truncated at level `n_max` directly into every
/// equation and returns the coefficients of all `phi` powers that the
/// truncation cannot affect. `values` maps series coefficients to their
/// solved form; coefficients without an entry stay symbolic.
pub fn residual_oracle(
    sys: &EvolutionSystem,
    values: &HashMap<Symbol, Expression>,
    n_max: i32,
) -> Vec<OracleEntry> {
    let series: Vec<Laurent> = sys
        .fields
        .iter()
        .map(|f| {
            let mut l = Laurent::default();
            for m in 0..=n_max {
                let s = f.coeff(m);
                let v = values.get(&s).cloned().unwrap_or_else(|| Expression::symbol(s));
                l.add_term((m - f.lead) as i64, &v);
            }
            l
        })
        .collect();
    let mut jets: HashMap<(usize, u32), Laurent> = HashMap::new();
    let mut out = Vec::new();
    for (fi, f) in sys.evolving() {
        let eq = sys.equations[fi].as_ref().unwrap();
        // lowest power reached when one factor moves to level n_max + 1
        let mut cap = (n_max - f.lead) as i64; // from F_t
        for (m, _) in eq.terms() {
            let (factors, _) = split_monomial(sys, m);
            let low: i64 = factors.iter().map(|(i, k)| -(sys.fields[*i].lead as i64) - *k as i64).sum();
            if !factors.is_empty() {
                cap = cap.min(low + n_max as i64 + 1);
            }
        }
        let mut total = Laurent::default();
        for (m, c) in eq.terms() {
            let (factors, rest) = split_monomial(sys, m);
            let mut prod = Laurent::default();
            prod.add_term(0, &(&Expression::term(c.clone(), crate::kernel::Monomial::one()) * &rest));
            let mins: Vec<i64> = factors.iter().map(|(i, k)| -(sys.fields[*i].lead as i64) - *k as i64).collect();
            for (pos, (i, k)) in factors.iter().enumerate() {
                let j = jets.entry((*i, *k)).or_insert_with(|| {
                    let mut l = series[*i].clone();
                    for _ in 0..*k {
                        l = l.dx();
                    }
                    l
                });
                let later: i64 = mins[pos + 1..].iter().sum();
                prod = prod.mul(j, cap - later);
            }
            for (p, e) in prod.0 {
                total.add_term(p, &e);
            }
        }
        for (p, e) in series[fi].dt().0 {
            total.add_term(p, &-&e);
        }
        let lowest = (sys.start_level() - f.lead - 3) as i64;
        for p in lowest..cap {
            let v = total.0.get(&p).cloned().unwrap_or_default();
            let value = reduce_static_derivatives(sys, &v);
            out.push(OracleEntry { field: f.name.clone(), level: (p + f.lead as i64 + 3) as i32, value });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_skdv;

    #[test]
    fn start_level_follows_fermion_lead() {
        let sys = build_skdv(Some(Expression::int(3)), None, None);
        assert_eq!(sys.start_level(), -1);
        assert_eq!(sys.with_fermion_lead(0).start_level(), 0);
        assert_eq!(sys.with_fermion_lead(3).start_level(), -3);
    }

    #[test]
    fn kdv_relation_matches_hand_expansion() {
        // u_t = -u_xxx + 6 u u_x with u = sum u_m phi^(m-2)
        let mut sys = EvolutionSystem::new("kdv", &[], vec![crate::model::FieldSpec::new("u", Parity::Even, 2)]);
        let u = Expression::symbol(Symbol::jet("u", 0, Parity::Even));
        let eq = -Expression::symbol(Symbol::jet("u", 3, Parity::Even)) + Expression::int(6) * u.clone() * crate::model::dx(&u);
        sys.set_equation("u", eq).unwrap();
        let u0 = Expression::symbol(Symbol::series("u", 0, Parity::Even));
        let r0 = sys.relation(0, 0);
        // 24 u0 - 12 u0^2
        assert_eq!(r0, &u0.scale(&gint(24)) - &(&u0 * &u0).scale(&gint(12)));
        let jac = jacobian_at_level(&sys, 5, &[0]);
        // -(n-2)(n-3)(n-4) + 6 u0 (n-4) at n = 5, u0 = 2
        let bind: HashMap<_, _> = [(Symbol::series("u", 0, Parity::Even), Expression::int(2))].into_iter().collect();
        assert_eq!(jac[0][0].substitute_unchecked(&bind), Expression::int(6));
    }
}
