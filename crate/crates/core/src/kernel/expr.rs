use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use smallvec::SmallVec;

use super::symbol::{Parity, Symbol};
use super::KernelError;
use crate::ring::{Gauss, GrassmannScalar, Rational};

/// Product of symbols: a sorted multiset of even symbols and a strictly
/// increasing list of odd symbols (any sign is kept in the coefficient).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    even: SmallVec<[(Symbol, u32); 4]>,
    odd: SmallVec<[Symbol; 4]>,
}

/// Sorts `list`, returning `None` if it has a repeated entry and otherwise
/// whether the sorting permutation was odd.
fn sort_odd(list: &mut SmallVec<[Symbol; 4]>) -> Option<bool> {
    let mut swaps = 0usize;
    for i in 1..list.len() {
        let mut j = i;
        while j > 0 && list[j - 1] > list[j] {
            list.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if list.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(swaps % 2 == 1)
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut m = Monomial::default();
        if s.is_odd() {
            m.odd.push(s);
        } else {
            m.even.push((s, 1));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    pub fn even(&self) -> &[(Symbol, u32)] {
        &self.even
    }

    pub fn odd(&self) -> &[Symbol] {
        &self.odd
    }

    pub fn odd_degree(&self) -> usize {
        self.odd.len()
    }

    pub fn parity_odd(&self) -> bool {
        self.odd.len() % 2 == 1
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        if s.is_odd() {
            self.odd.contains(&s) as u32
        } else {
            self.even.iter().find(|e| e.0 == s).map_or(0, |e| e.1)
        }
    }

    /// The monomial with every power of the even symbol `s` removed.
    pub fn without(&self, s: Symbol) -> Monomial {
        let mut m = self.clone();
        m.even.retain(|e| e.0 != s);
        m
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.even.iter().map(|e| e.0).chain(self.odd.iter().copied())
    }

    /// Product `self * other`; `None` when an odd symbol repeats, otherwise
    /// the sign flag from reordering the odd symbols.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let mut odd: SmallVec<[Symbol; 4]> = self.odd.clone();
        odd.extend(other.odd.iter().copied());
        // both halves are sorted: count inversions by merging
        let mut neg = false;
        if !self.odd.is_empty() && !other.odd.is_empty() {
            let mut inv = 0usize;
            for b in other.odd.iter() {
                let greater = self.odd.iter().filter(|a| *a > b).count();
                if self.odd.contains(b) {
                    return None;
                }
                inv += greater;
            }
            neg = inv % 2 == 1;
            odd.sort();
        }
        let mut even: SmallVec<[(Symbol, u32); 4]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.even.len() || j < other.even.len() {
            match (self.even.get(i), other.even.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    even.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    even.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    even.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    even.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    even.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Some((Monomial { even, odd }, neg))
    }

    /// Rendering with symbols in descriptor order; returns the sign flip
    /// needed relative to the canonical (interned) odd order.
    fn render(&self) -> (String, bool) {
        let mut even: Vec<(String, u32)> = self.even.iter().map(|(s, e)| (s.name(), *e)).collect();
        even.sort();
        let mut odd: SmallVec<[Symbol; 4]> = self.odd.clone();
        let descs: HashMap<Symbol, _> = odd.iter().map(|s| (*s, s.desc())).collect();
        let mut swaps = 0;
        for i in 1..odd.len() {
            let mut j = i;
            while j > 0 && descs[&odd[j - 1]] > descs[&odd[j]] {
                odd.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        let mut parts: Vec<String> = even
            .into_iter()
            .map(|(n, e)| if e == 1 { n } else { format!("{n}^{e}") })
            .collect();
        parts.extend(odd.iter().map(|s| s.name()));
        (parts.join("*"), swaps % 2 == 1)
    }
}

/// Polynomial over [`GrassmannScalar`] in even and odd symbols. Each term is
/// `coefficient * even part * odd symbols` with the coefficient leftmost.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Expression {
    terms: BTreeMap<Monomial, GrassmannScalar>,
}

fn odd_mask_parity_split(c: &GrassmannScalar) -> (GrassmannScalar, GrassmannScalar) {
    let even = GrassmannScalar::from_terms(
        c.registry(),
        c.terms().iter().filter(|t| t.0.count_ones() % 2 == 0).cloned(),
    );
    let odd = GrassmannScalar::from_terms(
        c.registry(),
        c.terms().iter().filter(|t| t.0.count_ones() % 2 == 1).cloned(),
    );
    (even, odd)
}

impl Expression {
    pub fn zero() -> Self {
        Expression::default()
    }

    pub fn one() -> Self {
        Expression::constant(GrassmannScalar::one())
    }

    pub fn int(v: i64) -> Self {
        Expression::constant(GrassmannScalar::int(v))
    }

    pub fn rational(r: Rational) -> Self {
        Expression::constant(GrassmannScalar::from_rational(r))
    }

    pub fn gauss(g: Gauss) -> Self {
        Expression::constant(GrassmannScalar::from_gauss(g))
    }

    pub fn constant(c: GrassmannScalar) -> Self {
        let mut e = Expression::zero();
        if !c.is_zero() {
            e.terms.insert(Monomial::one(), c);
        }
        e
    }

    pub fn symbol(s: Symbol) -> Self {
        Expression::term(GrassmannScalar::one(), Monomial::symbol(s))
    }

    pub fn term(c: GrassmannScalar, m: Monomial) -> Self {
        let mut e = Expression::zero();
        if !c.is_zero() {
            e.terms.insert(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GrassmannScalar)> {
        self.terms.iter()
    }

    /// Returns the coefficient when the expression contains no symbols.
    pub fn as_scalar(&self) -> Option<GrassmannScalar> {
        match self.terms.len() {
            0 => Some(GrassmannScalar::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn as_gauss(&self) -> Option<Gauss> {
        self.as_scalar().and_then(|s| s.as_gauss())
    }

    /// Symbol-free, generator-free part.
    pub fn constant_term(&self) -> GrassmannScalar {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: GrassmannScalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Expression) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Expression, factor: &Gauss) {
        if factor.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.scale(factor));
        }
    }

    pub fn scale(&self, g: &Gauss) -> Expression {
        if g.is_zero() {
            return Expression::zero();
        }
        Expression { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(g))).collect() }
    }

    pub fn scale_rational(&self, r: &Rational) -> Expression {
        self.scale(&Gauss::real(r.clone()))
    }

    /// Left multiplication by a scalar.
    pub fn scalar_mul(&self, c: &GrassmannScalar) -> Expression {
        &Expression::constant(c.clone()) * self
    }

    pub fn mul_ref(&self, other: &Expression) -> Expression {
        let mut out = Expression::zero();
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            let a_odd = ma.parity_odd();
            for (mb, cb) in &other.terms {
                let Some((m, neg)) = ma.mul(mb) else { continue };
                // move cb's odd generators left across ma's odd symbols
                let cb_eff = if a_odd && !cb.is_even() {
                    let (e, o) = odd_mask_parity_split(cb);
                    &e - &o
                } else {
                    cb.clone()
                };
                let mut c = ca * &cb_eff;
                if neg {
                    c = -c;
                }
                out.add_term(m, c);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Expression {
        let mut acc = Expression::one();
        for _ in 0..e {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// All symbols occurring in the expression.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            out.extend(m.symbols());
        }
        out
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.keys().any(|m| m.degree_in(s) > 0)
    }

    pub fn any_symbol(&self, mut pred: impl FnMut(Symbol) -> bool) -> bool {
        self.terms.keys().any(|m| m.symbols().any(&mut pred))
    }

    /// Parity if homogeneous (coefficient generators and odd symbols both
    /// counted); `None` for the zero expression or mixed parity.
    pub fn parity(&self) -> Option<Parity> {
        let mut seen: Option<bool> = None;
        for (m, c) in &self.terms {
            for (mask, _) in c.terms() {
                let p = (mask.count_ones() as usize + m.odd_degree()) % 2 == 1;
                match seen {
                    None => seen = Some(p),
                    Some(q) if q != p => return None,
                    _ => {}
                }
            }
        }
        seen.map(Parity::from_odd)
    }

    /// Simultaneous substitution of symbols by expressions. Each binding's
    /// parity must match the symbol's (a zero value is allowed for either).
    pub fn substitute(&self, bindings: &HashMap<Symbol, Expression>) -> Result<Expression, KernelError> {
        for (s, v) in bindings {
            if let Some(p) = v.parity() {
                if p != s.parity() {
                    return Err(KernelError::ParityMismatch { symbol: s.name(), expected: s.parity() });
                }
            }
        }
        Ok(self.substitute_unchecked(bindings))
    }

    /// [`Expression::substitute`] without the parity check.
    pub fn substitute_unchecked(&self, bindings: &HashMap<Symbol, Expression>) -> Expression {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = Expression::zero();
        let mut pow_cache: HashMap<(Symbol, u32), Expression> = HashMap::new();
        for (m, c) in &self.terms {
            if !m.symbols().any(|s| bindings.contains_key(&s)) {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let mut acc = Expression::constant(c.clone());
            let mut keep = Monomial::one();
            for (s, e) in m.even.iter() {
                match bindings.get(s) {
                    Some(v) => {
                        let p = pow_cache.entry((*s, *e)).or_insert_with(|| v.pow(*e)).clone();
                        acc = acc.mul_ref(&p);
                    }
                    None => keep.even.push((*s, *e)),
                }
            }
            if !keep.even.is_empty() {
                acc = acc.mul_ref(&Expression::term(GrassmannScalar::one(), keep));
            }
            for s in m.odd.iter() {
                let v = match bindings.get(s) {
                    Some(v) => v.clone(),
                    None => Expression::symbol(*s),
                };
                acc = acc.mul_ref(&v);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign_ref(&acc);
        }
        out
    }

    /// Substitution keyed by underived symbols: a binding for `s` also
    /// replaces every `d^k s / dt^k` by the k-th formal derivative of the
    /// bound value.
    pub fn substitute_towers(&self, bindings: &HashMap<Symbol, Expression>) -> Expression {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut full: HashMap<Symbol, Expression> = HashMap::new();
        for s in self.symbols() {
            let d = s.dt_order();
            if let Some(v) = bindings.get(&s.base()) {
                let mut val = v.clone();
                for _ in 0..d {
                    val = val.formal_dt();
                }
                full.insert(s, val);
            }
        }
        self.substitute_unchecked(&full)
    }

    /// Formal `d/dt`: constants (parameters, ring elements) differentiate to
    /// zero; every other symbol moves one step up its derivative tower.
    pub fn formal_dt(&self) -> Expression {
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            for (idx, (s, e)) in m.even.iter().enumerate() {
                let Some(ds) = s.dt() else { continue };
                let mut rest = m.clone();
                if *e == 1 {
                    rest.even.remove(idx);
                } else {
                    rest.even[idx].1 -= 1;
                }
                let factor = Monomial::symbol(ds);
                if let Some((nm, neg)) = rest.mul(&factor) {
                    let mut cc = c.scale(&Gauss::int(*e as i64));
                    if neg {
                        cc = -cc;
                    }
                    out.add_term(nm, cc);
                }
            }
            for idx in 0..m.odd.len() {
                let Some(ds) = m.odd[idx].dt() else { continue };
                let mut nm = m.clone();
                nm.odd[idx] = ds;
                let Some(neg) = sort_odd(&mut nm.odd) else { continue };
                out.add_term(nm, if neg { -c } else { c.clone() });
            }
        }
        out
    }

    /// Partial derivative. For an odd symbol this is the right derivative:
    /// the symbol is moved to the far right before removal, so that
    /// `X * s` differentiates to `X`.
    pub fn partial(&self, s: Symbol) -> Expression {
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            if s.is_odd() {
                let Some(pos) = m.odd.iter().position(|o| *o == s) else { continue };
                let mut nm = m.clone();
                nm.odd.remove(pos);
                let moves = m.odd.len() - 1 - pos;
                out.add_term(nm, if moves % 2 == 1 { -c } else { c.clone() });
            } else {
                let Some(pos) = m.even.iter().position(|e| e.0 == s) else { continue };
                let e = m.even[pos].1;
                let mut nm = m.clone();
                if e == 1 {
                    nm.even.remove(pos);
                } else {
                    nm.even[pos].1 -= 1;
                }
                out.add_term(nm, c.scale(&Gauss::int(e as i64)));
            }
        }
        out
    }

    /// Body of the coefficient of the bare monomial `s`.
    pub fn linear_body(&self, s: Symbol) -> Gauss {
        self.terms.get(&Monomial::symbol(s)).map(|c| c.body()).unwrap_or_else(Gauss::zero)
    }

    /// Keeps only terms whose monomial satisfies `pred`.
    pub fn filter_terms(&self, mut pred: impl FnMut(&Monomial) -> bool) -> Expression {
        Expression { terms: self.terms.iter().filter(|(m, _)| pred(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Number of odd symbols plus coefficient generators in the lowest term.
    pub fn min_odd_degree(&self) -> Option<u32> {
        self.terms
            .iter()
            .flat_map(|(m, c)| c.terms().iter().map(move |(mask, _)| mask.count_ones() + m.odd_degree() as u32))
            .min()
    }

    /// Canonical text form: terms ordered by their rendered monomial, odd
    /// symbols listed in descriptor order with the sign adjusted.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut items: Vec<(String, GrassmannScalar)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let (text, flip) = m.render();
                (text, if flip { -c } else { c.clone() })
            })
            .collect();
        items.sort_by(|a, b| (!a.0.is_empty(), &a.0).cmp(&(!b.0.is_empty(), &b.0)));
        let mut out = String::new();
        for (i, (mono, c)) in items.iter().enumerate() {
            let piece = render_term(c, mono);
            if i > 0 {
                if let Some(rest) = piece.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                    continue;
                }
                out.push_str(" + ");
            }
            out.push_str(&piece);
        }
        out
    }
}

fn render_term(c: &GrassmannScalar, mono: &str) -> String {
    let coeff = match c.as_gauss() {
        Some(g) => {
            let r = g.render();
            if !g.is_real() && !g.re.is_zero() {
                format!("({r})")
            } else {
                r
            }
        }
        None => format!("({})", c.render(None)),
    };
    if mono.is_empty() {
        return coeff;
    }
    match coeff.as_str() {
        "1" => mono.to_string(),
        "-1" => format!("-{mono}"),
        _ => format!("{coeff}*{mono}"),
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<Symbol> for Expression {
    fn from(s: Symbol) -> Self {
        Expression::symbol(s)
    }
}

impl From<i64> for Expression {
    fn from(v: i64) -> Self {
        Expression::int(v)
    }
}

impl From<Gauss> for Expression {
    fn from(g: Gauss) -> Self {
        Expression::gauss(g)
    }
}

impl From<Rational> for Expression {
    fn from(r: Rational) -> Self {
        Expression::rational(r)
    }
}

impl Add<&Expression> for &Expression {
    type Output = Expression;
    fn add(self, o: &Expression) -> Expression {
        let mut out = self.clone();
        out.add_assign_ref(o);
        out
    }
}

impl Add for Expression {
    type Output = Expression;
    fn add(mut self, o: Expression) -> Expression {
        self.add_assign_ref(&o);
        self
    }
}

impl Sub<&Expression> for &Expression {
    type Output = Expression;
    fn sub(self, o: &Expression) -> Expression {
        let mut out = self.clone();
        out.add_scaled(o, &Gauss::int(-1));
        out
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, o: Expression) -> Expression {
        &self - &o
    }
}

impl Mul<&Expression> for &Expression {
    type Output = Expression;
    fn mul(self, o: &Expression) -> Expression {
        self.mul_ref(o)
    }
}

impl Mul for Expression {
    type Output = Expression;
    fn mul(self, o: Expression) -> Expression {
        self.mul_ref(&o)
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        self.scale(&Gauss::int(-1))
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi(i: u32, n: i32) -> Symbol {
        Symbol::series(&format!("xi{i}"), n, Parity::Odd)
    }

    #[test]
    fn odd_symbols_anticommute() {
        let a = Expression::symbol(xi(1, 0));
        let b = Expression::symbol(xi(2, 0));
        assert!((&a * &a).is_zero());
        assert_eq!(&b * &a, -(&a * &b));
        assert_eq!((&b * &a).render(), "-xi1_0*xi2_0");
    }

    #[test]
    fn binomial_square() {
        let u = Expression::symbol(Symbol::series("u", 0, Parity::Even));
        let w = Expression::symbol(Symbol::series("w", 0, Parity::Even));
        let s = (&u + &w).pow(2);
        assert_eq!(s, &(&(&u * &u) + &(&u * &w).scale(&Gauss::int(2))) + &(&w * &w));
    }

    #[test]
    fn substitution_examples() {
        let x2 = xi(2, 0);
        let k0 = Expression::gauss(Gauss::k());
        let mut b = HashMap::new();
        b.insert(x2, &k0 * &Expression::symbol(xi(1, 0)));
        assert_eq!(Expression::symbol(x2).substitute(&b).unwrap(), &k0 * &Expression::symbol(xi(1, 0)));

        let alpha = Symbol::param("alpha");
        let w0 = Symbol::series("w", 0, Parity::Even);
        let mut b = HashMap::new();
        b.insert(alpha, Expression::int(1));
        b.insert(w0, -&k0);
        let e = &Expression::symbol(alpha) * &Expression::symbol(w0);
        assert_eq!(e.substitute(&b).unwrap(), -&k0);

        let mut bad = HashMap::new();
        bad.insert(w0, Expression::symbol(xi(1, 0)));
        assert!(e.substitute(&bad).is_err());
    }

    #[test]
    fn formal_dt_examples() {
        let u4 = Symbol::series("u", 4, Parity::Even);
        assert_eq!(Expression::symbol(u4).formal_dt(), Expression::symbol(u4.dt().unwrap()));
        assert!(Expression::symbol(Symbol::param("alpha")).formal_dt().is_zero());
        let x = xi(1, 0);
        let w1 = Symbol::series("w", 1, Parity::Even);
        let e = &Expression::symbol(x) * &Expression::symbol(w1);
        let expect = &(&Expression::symbol(x.dt().unwrap()) * &Expression::symbol(w1))
            + &(&Expression::symbol(x) * &Expression::symbol(w1.dt().unwrap()));
        assert_eq!(e.formal_dt(), expect);
    }

    #[test]
    fn right_derivative() {
        let a = Expression::symbol(xi(1, 3));
        let b = Expression::symbol(xi(2, 3));
        let e = &a * &b;
        assert_eq!(e.partial(xi(2, 3)), a);
        assert_eq!(e.partial(xi(1, 3)), -&b);
    }

    #[test]
    fn tower_substitution() {
        let f = Symbol::function("f", Parity::Even);
        let u2 = Symbol::series("u", 2, Parity::Even);
        let e = Expression::symbol(u2.dt().unwrap());
        let mut b = HashMap::new();
        b.insert(u2, &Expression::symbol(f) * &Expression::symbol(f));
        let got = e.substitute_towers(&b);
        assert_eq!(got, (&Expression::symbol(f) * &Expression::symbol(f.dt().unwrap())).scale(&Gauss::int(2)));
    }
}
