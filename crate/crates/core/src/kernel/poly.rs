use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{Expression, Symbol};
use crate::ring::{Gauss, Rational};

/// Univariate polynomial in `n` with Gaussian-rational coefficients, lowest
/// degree first and no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GaussPoly {
    coeffs: Vec<Gauss>,
}

impl GaussPoly {
    pub fn new(mut coeffs: Vec<Gauss>) -> Self {
        while coeffs.last().is_some_and(Gauss::is_zero) {
            coeffs.pop();
        }
        GaussPoly { coeffs }
    }

    pub fn zero() -> Self {
        GaussPoly::default()
    }

    pub fn constant(c: Gauss) -> Self {
        GaussPoly::new(vec![c])
    }

    /// `n - a`
    pub fn linear_root(a: Gauss) -> Self {
        GaussPoly::new(vec![-a, Gauss::one()])
    }

    pub fn from_roots(roots: &[i64]) -> Self {
        roots.iter().fold(GaussPoly::constant(Gauss::one()), |acc, r| &acc * &GaussPoly::linear_root(Gauss::int(*r)))
    }

    pub fn coeffs(&self) -> &[Gauss] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Gauss {
        self.coeffs.last().cloned().unwrap_or_else(Gauss::zero)
    }

    pub fn eval(&self, x: &Gauss) -> Gauss {
        let mut acc = Gauss::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn scale(&self, g: &Gauss) -> GaussPoly {
        GaussPoly::new(self.coeffs.iter().map(|c| c * g).collect())
    }

    pub fn monic(&self) -> GaussPoly {
        match self.leading().inv() {
            Ok(inv) => self.scale(&inv),
            Err(_) => GaussPoly::zero(),
        }
    }

    /// Division by `n - a`, returning quotient and remainder.
    pub fn synthetic_div(&self, a: &Gauss) -> (GaussPoly, Gauss) {
        if self.coeffs.is_empty() {
            return (GaussPoly::zero(), Gauss::zero());
        }
        let mut q = vec![Gauss::zero(); self.coeffs.len() - 1];
        let mut carry = Gauss::zero();
        for i in (0..self.coeffs.len()).rev() {
            let v = &self.coeffs[i] + &(&carry * a);
            if i == 0 {
                return (GaussPoly::new(q), v);
            }
            q[i - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Lagrange interpolation through `(x_i, y_i)`.
    pub fn interpolate(points: &[(i64, Gauss)]) -> GaussPoly {
        let mut acc = GaussPoly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = GaussPoly::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    let d = Rational::from_integer(BigInt::from(xi - xj));
                    basis = (&basis * &GaussPoly::linear_root(Gauss::int(*xj))).scale(&Gauss::real(d.recip()));
                }
            }
            acc = &acc + &basis;
        }
        acc
    }

    pub fn render(&self) -> String {
        let e = self.to_expression(Symbol::param("n"));
        e.render()
    }

    pub fn to_expression(&self, var: Symbol) -> Expression {
        let n = Expression::symbol(var);
        let mut acc = Expression::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &n) + &Expression::gauss(c.clone());
        }
        acc
    }

    /// Reads a polynomial in `var` whose coefficients are symbol-free.
    pub fn from_expression(e: &Expression, var: Symbol) -> Option<GaussPoly> {
        let mut coeffs: Vec<Gauss> = Vec::new();
        for (m, c) in e.terms() {
            let d = m.degree_in(var) as usize;
            if m.symbols().any(|s| s != var) {
                return None;
            }
            let g = c.as_gauss()?;
            if coeffs.len() <= d {
                coeffs.resize(d + 1, Gauss::zero());
            }
            coeffs[d] = g;
        }
        Some(GaussPoly::new(coeffs))
    }
}

impl std::ops::Add<&GaussPoly> for &GaussPoly {
    type Output = GaussPoly;
    fn add(self, o: &GaussPoly) -> GaussPoly {
        let len = self.coeffs.len().max(o.coeffs.len());
        let z = Gauss::zero();
        GaussPoly::new((0..len).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }
}

impl std::ops::Sub<&GaussPoly> for &GaussPoly {
    type Output = GaussPoly;
    fn sub(self, o: &GaussPoly) -> GaussPoly {
        self + &o.scale(&Gauss::int(-1))
    }
}

impl std::ops::Mul<&GaussPoly> for &GaussPoly {
    type Output = GaussPoly;
    fn mul(self, o: &GaussPoly) -> GaussPoly {
        if self.is_zero() || o.is_zero() {
            return GaussPoly::zero();
        }
        let mut out = vec![Gauss::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        GaussPoly::new(out)
    }
}

impl fmt::Display for GaussPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn lcm_denoms(p: &GaussPoly) -> BigInt {
    p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.re.denom()).lcm(c.im.denom()))
}

fn positive_divisors(v: &BigInt) -> Option<Vec<i64>> {
    let v = v.abs().to_u64()?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(d as i64);
            if d * d != v {
                out.push((v / d) as i64);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    Some(out)
}

/// Integer roots with multiplicity (ascending) and the cofactor left after
/// dividing them out. Candidates come from the rational-root theorem applied
/// to the integer-coefficient multiple of the polynomial; a constant term
/// beyond 64 bits is not searched.
pub fn integer_roots(p: &GaussPoly) -> (Vec<i64>, GaussPoly) {
    let mut roots = Vec::new();
    let mut rest = p.clone();
    if rest.is_zero() {
        return (roots, rest);
    }
    // zero roots
    while rest.coeffs.len() > 1 && rest.coeffs[0].is_zero() {
        rest = GaussPoly::new(rest.coeffs[1..].to_vec());
        roots.push(0);
    }
    loop {
        if rest.degree().unwrap_or(0) == 0 {
            break;
        }
        let scaled = rest.scale(&Gauss::real(Rational::from_integer(lcm_denoms(&rest))));
        let c0 = &scaled.coeffs[0];
        let g = c0.re.numer().gcd(c0.im.numer());
        let Some(divs) = positive_divisors(&g) else { break };
        let mut found = None;
        for d in divs {
            for cand in [d, -d] {
                let (q, r) = rest.synthetic_div(&Gauss::int(cand));
                if r.is_zero() {
                    found = Some((cand, q));
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        match found {
            Some((root, q)) => {
                roots.push(root);
                rest = q;
            }
            None => break,
        }
    }
    roots.sort_unstable();
    (roots, rest)
}

/// Distinct rational roots, descending. Coefficients with imaginary parts
/// admit only roots common to the real and imaginary parts.
pub fn rational_roots(p: &GaussPoly) -> Vec<Rational> {
    let re = GaussPoly::new(p.coeffs.iter().map(|c| Gauss::real(c.re.clone())).collect());
    let im = GaussPoly::new(p.coeffs.iter().map(|c| Gauss::real(c.im.clone())).collect());
    let (base, other) = if re.is_zero() { (im, GaussPoly::zero()) } else { (re, im) };
    if base.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut start = 0;
    while base.coeffs[start].is_zero() {
        start += 1;
    }
    if start > 0 {
        out.push(Rational::from_integer(BigInt::from(0)));
    }
    let trimmed = GaussPoly::new(base.coeffs[start..].to_vec());
    if trimmed.degree().unwrap_or(0) > 0 {
        let scaled = trimmed.scale(&Gauss::real(Rational::from_integer(lcm_denoms(&trimmed))));
        let a0 = scaled.coeffs[0].re.numer().clone();
        let an = scaled.leading().re.numer().clone();
        if let (Some(ps), Some(qs)) = (positive_divisors(&a0), positive_divisors(&an)) {
            for p in &ps {
                for q in &qs {
                    for sign in [1i64, -1] {
                        let cand = Rational::new(BigInt::from(sign * p), BigInt::from(*q));
                        if !out.contains(&cand) && trimmed.eval(&Gauss::real(cand.clone())).is_zero() {
                            out.push(cand);
                        }
                    }
                }
            }
        }
    }
    out.retain(|r| other.eval(&Gauss::real(r.clone())).is_zero());
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Quotient of two expressions, compared by cross multiplication. No
/// cancellation of common factors is attempted.
#[derive(Clone, Debug)]
pub struct RatFunc {
    pub num: Expression,
    pub den: Expression,
}

impl RatFunc {
    pub fn new(num: Expression, den: Expression) -> Self {
        let mut r = RatFunc { num, den };
        r.normalize();
        r
    }

    pub fn poly(e: Expression) -> Self {
        RatFunc { num: e, den: Expression::one() }
    }

    fn normalize(&mut self) {
        if let Some(g) = self.den.as_gauss() {
            if let Ok(inv) = g.inv() {
                self.num = self.num.scale(&inv);
                self.den = Expression::one();
            }
        }
        if self.num.is_zero() {
            self.den = Expression::one();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_polynomial(&self) -> Option<&Expression> {
        if self.den == Expression::one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }

    /// `None` when dividing by zero.
    pub fn div(&self, o: &RatFunc) -> Option<RatFunc> {
        if o.is_zero() {
            return None;
        }
        Some(RatFunc::new(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        RatFunc::new(self.num.pow(e), self.den.pow(e))
    }

    pub fn equals(&self, o: &RatFunc) -> bool {
        (&self.num * &o.den) == (&o.num * &self.den)
    }

    /// Substitutes rational functions for symbols (no derivative towers).
    pub fn substitute(&self, bindings: &HashMap<Symbol, RatFunc>) -> RatFunc {
        let n = subst_expr(&self.num, bindings);
        let d = subst_expr(&self.den, bindings);
        n.div(&d).unwrap_or_else(|| RatFunc::poly(Expression::zero()))
    }

    /// Rewrites every `s^2` as `value`, leaving at most a linear power of `s`.
    pub fn reduce_square(&self, s: Symbol, value: &RatFunc) -> RatFunc {
        let n = reduce_square_expr(&self.num, s, value);
        let d = reduce_square_expr(&self.den, s, value);
        n.div(&d).unwrap_or_else(|| RatFunc::poly(Expression::zero()))
    }
}

impl From<Expression> for RatFunc {
    fn from(e: Expression) -> Self {
        RatFunc::poly(e)
    }
}

fn subst_expr(e: &Expression, bindings: &HashMap<Symbol, RatFunc>) -> RatFunc {
    let mut acc = RatFunc::poly(Expression::zero());
    for (m, c) in e.terms() {
        let mut t = RatFunc::poly(Expression::term(c.clone(), super::Monomial::one()));
        for (s, k) in m.even() {
            let f = match bindings.get(s) {
                Some(v) => v.pow(*k),
                None => RatFunc::poly(Expression::symbol(*s).pow(*k)),
            };
            t = t.mul(&f);
        }
        for s in m.odd() {
            let f = bindings.get(s).cloned().unwrap_or_else(|| RatFunc::poly(Expression::symbol(*s)));
            t = t.mul(&f);
        }
        acc = acc.add(&t);
    }
    acc
}

fn reduce_square_expr(e: &Expression, s: Symbol, value: &RatFunc) -> RatFunc {
    let mut acc = RatFunc::poly(Expression::zero());
    for (m, c) in e.terms() {
        let k = m.degree_in(s);
        let rest = Expression::term(c.clone(), m.without(s));
        let mut t = RatFunc::poly(&rest * &Expression::symbol(s).pow(k % 2));
        t = t.mul(&value.pow(k / 2));
        acc = acc.add(&t);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots_of_quadratic() {
        // (2n - 1)(n + 3)
        let p = GaussPoly::new(vec![Gauss::int(-3), Gauss::int(5), Gauss::int(2)]);
        assert_eq!(rational_roots(&p), vec![crate::ring::rat(1, 2), crate::ring::rat(-3, 1)]);
    }

    #[test]
    fn roots_of_product() {
        let p = &GaussPoly::from_roots(&[-1, 2, 2, 4, 6]) * &GaussPoly::new(vec![Gauss::int(-2), Gauss::int(-3), Gauss::int(1)]);
        let (roots, rest) = integer_roots(&p);
        assert_eq!(roots, vec![-1, 2, 2, 4, 6]);
        assert_eq!(rest.degree(), Some(2));
    }

    #[test]
    fn roots_with_fractions() {
        // (n - 3)(12 n^2 - 108 n + 211) / 12
        let q = GaussPoly::new(vec![Gauss::real(crate::ring::rat(211, 12)), Gauss::int(-9), Gauss::int(1)]);
        let p = &GaussPoly::from_roots(&[3]) * &q;
        let (roots, rest) = integer_roots(&p);
        assert_eq!(roots, vec![3]);
        assert_eq!(rest, q);
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = GaussPoly::new(vec![Gauss::int(3), Gauss::k(), Gauss::int(0), Gauss::int(-2)]);
        let pts: Vec<_> = (0..4).map(|x| (x, p.eval(&Gauss::int(x)))).collect();
        assert_eq!(GaussPoly::interpolate(&pts), p);
    }

    #[test]
    fn ratfunc_cross_equality() {
        let a = Expression::symbol(Symbol::param("a"));
        let one = Expression::one();
        let lhs = RatFunc::new(one.clone(), a.clone()).add(&RatFunc::new(one.clone(), &a + &one));
        let rhs = RatFunc::new(&(&a * &Expression::int(2)) + &one, &a * &(&a + &one));
        assert!(lhs.equals(&rhs));
    }
}
