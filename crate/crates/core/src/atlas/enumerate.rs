//! Brute-force enumeration of the integer-resonance members of every
//! one- and two-index branch family of the bosonic core.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::kernel::Expression;
use crate::model::BranchSeed;
use crate::ring::{rat, Gauss, Rational};

/// Default half-width of the integer window scanned per index.
pub const WINDOW: i64 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    /// Resonances `-1` (once) and nonnegative otherwise, none at `0`.
    Principal,
    /// A resonance below `-1`, or `-1` more than once.
    NonPrincipal,
    /// A resonance at level `0`, where the seed fixes every coefficient.
    MovableLog,
    /// `u_0 = 0` or a parameter diverges: no singular branch.
    Degenerate,
}

/// One integer member of a family.
#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub family: &'static str,
    pub index: Vec<i64>,
    pub c: i64,
    pub alpha: Rational,
    /// `None` when the resonances do not depend on `beta`.
    pub beta: Option<Rational>,
    pub u0: Rational,
    pub w0: Gauss,
    pub roots: Vec<i64>,
    pub class: Class,
}

impl Candidate {
    fn new(family: &'static str, index: Vec<i64>, c: i64, data: Option<(Rational, Option<Rational>, Rational, Gauss)>, mut roots: Vec<i64>) -> Self {
        roots.sort_unstable();
        let (alpha, beta, u0, w0, class) = match data {
            Some((a, b, u0, w0)) if !u0.is_zero() => {
                let class = classify(&roots);
                (a, b, u0, w0, class)
            }
            _ => (Rational::zero(), None, Rational::zero(), Gauss::zero(), Class::Degenerate),
        };
        Candidate { family, index, c, alpha, beta, u0, w0, roots, class }
    }

    /// Bosonic-core seed; a free `beta` takes the value `beta_free`.
    pub fn seed(&self, beta_free: &Rational) -> BranchSeed {
        let idx: Vec<String> = self.index.iter().map(|k| k.to_string()).collect();
        let beta = self.beta.clone().unwrap_or_else(|| beta_free.clone());
        BranchSeed::new(&format!("{}[{}]", self.family, idx.join(",")))
            .param("c", Expression::int(self.c))
            .param("alpha", Expression::rational(self.alpha.clone()))
            .param("beta", Expression::rational(beta))
            .level0("u", Expression::rational(self.u0.clone()))
            .level0("w", Expression::gauss(self.w0.clone()))
            .core()
    }
}

pub fn classify(roots: &[i64]) -> Class {
    let minus_one = roots.iter().filter(|&&r| r == -1).count();
    if roots.iter().any(|&r| r < -1) || minus_one > 1 {
        Class::NonPrincipal
    } else if roots.contains(&0) {
        Class::MovableLog
    } else {
        Class::Principal
    }
}

fn q(n: i64) -> Rational {
    rat(n, 1)
}

/// Integer roots `a <= b` of `n^2 - s n + p`.
fn int_pair(s: &Rational, p: &Rational) -> Option<(i64, i64)> {
    if !s.is_integer() || !p.is_integer() {
        return None;
    }
    let disc = s * s - p * q(4);
    if disc.is_negative() {
        return None;
    }
    let d = disc.to_integer();
    let r = d.sqrt();
    if &r * &r != d {
        return None;
    }
    let s = s.to_integer();
    if (&s - &r).is_odd() {
        return None;
    }
    let (a, b) = ((&s - &r) / 2, (&s + &r) / 2);
    Some((i64::try_from(a).ok()?, i64::try_from(b).ok()?))
}

fn ku(u0: &Rational) -> Gauss {
    Gauss::new(Rational::zero(), u0.clone())
}

/// c = 3, `u_0 = 2`, `w_0 = 0`: quadratic factor roots `j >= 2` and
/// `3 - j`.
pub fn c3_ii(window: i64) -> Vec<Candidate> {
    (2..=window)
        .map(|j| {
            let alpha = q(j * (j - 3)) / q(2) - Rational::one();
            Candidate::new("c3.ii", vec![j], 3, Some((alpha, None, q(2), Gauss::zero())), vec![-1, 3, 4, 6, j, 3 - j])
        })
        .collect()
}

/// c = 3, `w_0 = k u_0`, two free roots `3 + k2`, `2 + k1 - k2` and
/// `m = 4 - k1`.
pub fn c3_vii(window: i64) -> Vec<Candidate> {
    let mut out = Vec::new();
    for k2 in -window..=window {
        for k1 in (2 * k2 + 1).max(-window)..=window {
            let d = q(k1 * (3 - k2) + k2 * (k2 + 1) - 6);
            let data = (!d.is_zero()).then(|| {
                let u0 = &d / q(6);
                let alpha = q(6 * k1) / &d - q(2);
                let beta = q(108 * (k1 - 2)) / (&d * &d);
                (alpha, Some(beta), u0.clone(), ku(&u0))
            });
            out.push(Candidate::new("c3.vii", vec![k1, k2], 3, data, vec![-1, 3, 4, 4 - k1, 3 + k2, 2 + k1 - k2]));
        }
    }
    out
}

/// c = 3, `beta = (alpha + 2)^2 / 3`, roots `4 -+ k1`.
pub fn c3_viii(window: i64) -> Vec<Candidate> {
    (0..=window)
        .map(|k| {
            let s = q(2 + k * k);
            let u0 = &s / q(6);
            let alpha = q(2 * (7 - k * k)) / &s;
            let beta = (&alpha + q(2)) * (&alpha + q(2)) / q(3);
            Candidate::new("c3.viii", vec![k], 3, Some((alpha, Some(beta), u0.clone(), ku(&u0))), vec![-1, 1, 3, 4, 4 - k, 4 + k])
        })
        .collect()
}

/// c = 3, `beta = -9/8 alpha (5 alpha + 4)`, roots `2 - k1`, `6 + k1`.
pub fn c3_ix(window: i64) -> Vec<Candidate> {
    (-window..=window)
        .map(|k| {
            let u0 = q(5 * k) / q(6) + Rational::one();
            let alpha = q(-4 * k) / q(5 * k + 6);
            let beta = q(108 * k) / q((5 * k + 6) * (5 * k + 6));
            Candidate::new("c3.ix", vec![k], 3, Some((alpha, Some(beta), u0.clone(), ku(&u0))), vec![-1, 1, 3, 4, 2 - k, 6 + k])
        })
        .collect()
}

/// c = 0, `u_0 = 2`, `w_0 = 0`: the cubic `n^3 - 6n^2 + n - 2 alpha (n-3)`
/// with three integer roots, one of them `j`.
pub fn c0_ii(window: i64) -> Vec<Candidate> {
    let mut seen: Vec<Rational> = Vec::new();
    let mut out = Vec::new();
    for j in -window..=window {
        if j == 3 {
            continue;
        }
        let alpha = q(j * j * j - 6 * j * j + j) / q(2 * (j - 3));
        if seen.contains(&alpha) {
            continue;
        }
        // n^3 - 6 n^2 + (1 - 2 alpha) n + 6 alpha = (n - j)(n^2 + (j - 6) n + e)
        let e = q(j * j - 6 * j + 1) - q(2) * &alpha;
        if let Some((a, b)) = int_pair(&q(6 - j), &e) {
            seen.push(alpha.clone());
            out.push(Candidate::new("c0.ii", vec![a, j, b], 0, Some((alpha, None, q(2), Gauss::zero())), vec![-1, 4, 6, j, a, b]));
        }
    }
    out
}

/// c = 0, `w_0 = k u_0`, `m = 3 (u_0 + 1)`.
pub fn c0_vii(window: i64) -> Vec<Candidate> {
    let mut out = Vec::new();
    for m in -window..=window {
        let u0 = q(m) / q(3) - Rational::one();
        let Some((a, b)) = int_pair(&q(11 - m), &q(-2 * (2 * m - 15))) else { continue };
        let data = (!u0.is_zero()).then(|| {
            let alpha = (q(3) - q(2) * &u0) / &u0;
            let beta = q(-3) * (&u0 - Rational::one()) / (&u0 * &u0);
            (alpha, Some(beta), u0.clone(), ku(&u0))
        });
        out.push(Candidate::new("c0.vii", vec![m], 0, data, vec![-1, 1, 4, m, a, b]));
    }
    out
}

/// c = 0, `w_0 = k u_0`, `m = 6 (4 - u_0) / 5`.
pub fn c0_viii(window: i64) -> Vec<Candidate> {
    let mut out = Vec::new();
    for m in -window..=window {
        let u0 = q(4) - q(5 * m) / q(6);
        let Some((a, b)) = int_pair(&q(11 - m), &q(2 * m)) else { continue };
        let alpha = (q(4) - &u0) / (q(5) * &u0);
        let beta = q(6) * (q(2) * &u0 - q(3)) / (q(5) * &u0 * &u0);
        out.push(Candidate::new("c0.viii", vec![m], 0, Some((alpha, Some(beta), u0.clone(), ku(&u0))), vec![-1, 1, 4, m, a, b]));
    }
    out
}

/// c = 0, `beta = 0`, `w_0 = k u_0`, `m = 2 (2 - u_0)`.
pub fn c0_x(window: i64) -> Vec<Candidate> {
    let mut out = Vec::new();
    for m in -window..=window {
        let u0 = q(2) - q(m) / q(2);
        let Some((a, b)) = int_pair(&q(9 - m), &q(6)) else { continue };
        let data = (!u0.is_zero()).then(|| (q(2) / &u0 - Rational::one(), Some(Rational::zero()), u0.clone(), ku(&u0)));
        out.push(Candidate::new("c0.x", vec![m], 0, data, vec![-1, 3, 4, m, a, b]));
    }
    out
}

/// c = 0, `w_0 = k u_0`, `alpha = ((beta u_0 - 3) u_0 + 6) / (3 u_0)`: two
/// quadratic factors, all four roots integer. The scan runs over the
/// first pair `j1 <= j2`; the second pair follows from it.
pub fn c0_vi(window: i64) -> Vec<Candidate> {
    let mut out = Vec::new();
    for j1 in -window..=window {
        for j2 in j1..=window {
            let (k2, k1) = (j1 + j2 - 5, 6 - j1 * j2);
            let Some((j3, j4)) = int_pair(&q(7 - k2), &q(12 + k1 - 3 * k2)) else { continue };
            let u0 = q(k2) / q(2) + q(k1) / q(6);
            let data = (!u0.is_zero()).then(|| {
                let beta = q(k1) / (&u0 * &u0);
                let alpha = (q(k1) - q(3) * &u0 + q(6)) / (q(3) * &u0);
                (alpha, Some(beta), u0.clone(), ku(&u0))
            });
            out.push(Candidate::new("c0.vi", vec![j1, j2, j3, j4], 0, data, vec![-1, 4, j1, j2, j3, j4]));
        }
    }
    out
}

/// Every family, scanned over `[-window, window]`.
pub fn enumerate_all(window: i64) -> Vec<Candidate> {
    let mut out = enumerate_c3_branches(window);
    out.extend(enumerate_c0_branches(window));
    out
}

pub fn enumerate_c3_branches(window: i64) -> Vec<Candidate> {
    [c3_ii(window), c3_vii(window), c3_viii(window), c3_ix(window)].concat()
}

pub fn enumerate_c0_branches(window: i64) -> Vec<Candidate> {
    [c0_ii(window), c0_vi(window), c0_vii(window), c0_viii(window), c0_x(window)].concat()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(v: &'a [Candidate], index: &[i64]) -> &'a Candidate {
        v.iter().find(|c| c.index == index).unwrap()
    }

    #[test]
    fn quadratic_pairs() {
        assert_eq!(int_pair(&q(5), &q(6)), Some((2, 3)));
        assert_eq!(int_pair(&q(1), &q(1)), None);
        assert_eq!(int_pair(&q(0), &q(-4)), Some((-2, 2)));
    }

    #[test]
    fn vii_table_rows() {
        let v = c3_vii(10);
        let a = find(&v, &[2, -1]);
        assert_eq!((a.alpha.clone(), a.u0.clone()), (q(4), rat(1, 3)));
        let f = find(&v, &[-1, -1]);
        assert_eq!(f.beta, Some(rat(-81, 25)));
        assert_eq!(find(&v, &[2, 0]).class, Class::Degenerate);
    }

    #[test]
    fn c0_viii_has_four_members() {
        let ms: Vec<i64> = c0_viii(WINDOW).iter().map(|c| c.index[0]).collect();
        assert_eq!(ms, vec![-12, 0, 30, 42]);
    }

    #[test]
    fn c0_ii_multisets() {
        let v = c0_ii(WINDOW);
        let alphas: Vec<Rational> = v.iter().map(|c| c.alpha.clone()).collect();
        assert_eq!(v.len(), 2);
        assert!(alphas.contains(&q(1)) && alphas.contains(&q(7)));
    }
}
