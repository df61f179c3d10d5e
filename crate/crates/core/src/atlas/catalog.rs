//! The published list (I)-(XVII) of bosonic-core branches: the five with
//! nonnegative resonances and the non-principal families.

use num_traits::{One, Zero};
use serde::Serialize;

use super::enumerate::Candidate;
use crate::ring::{rat, Gauss, Rational};

/// One listed member: `beta == None` leaves `beta` free.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Listed {
    pub label: &'static str,
    /// Integer indices of a family member; empty for isolated points.
    pub index: Vec<i64>,
    pub c: i64,
    pub alpha: Rational,
    pub beta: Option<Rational>,
    pub u0: Rational,
    pub w0: Gauss,
}

impl Listed {
    /// Same point of parameter space as `cand` up to `w -> -w`, a free
    /// `beta` on either side matching anything.
    pub fn covers(&self, cand: &Candidate) -> bool {
        let beta_ok = match (&self.beta, &cand.beta) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        };
        self.c == cand.c && self.alpha == cand.alpha && beta_ok && self.u0 == cand.u0 && &self.w0 * &self.w0 == &cand.w0 * &cand.w0
    }
}

fn q(n: i64) -> Rational {
    rat(n, 1)
}

fn k_times(u0: &Rational) -> Gauss {
    Gauss::new(Rational::zero(), u0.clone())
}

fn point(label: &'static str, c: i64, alpha: Rational, beta: Option<Rational>, u0: Rational, w0: Gauss) -> Listed {
    Listed { label, index: Vec::new(), c, alpha, beta, u0, w0 }
}

/// A `c = 3` family member with `w_0 = k u_0`.
fn member(label: &'static str, index: Vec<i64>, alpha: Rational, beta: Option<Rational>, u0: Rational) -> Listed {
    let w0 = k_times(&u0);
    Listed { label, index, c: 3, alpha, beta, u0, w0 }
}

/// The five branches with nonnegative resonances, `k = i`.
pub fn principal_list() -> Vec<Listed> {
    vec![
        point("I", 3, q(-2), Some(q(-6)), q(-1), Gauss::k()),
        point("II", 3, q(1), Some(q(3)), q(1), Gauss::k()),
        point("III", 3, q(4), Some(q(12)), rat(1, 2), k_times(&rat(1, 2))),
        point("IV", 0, q(1), Some(q(0)), q(1), Gauss::k()),
        point("V", 3, q(-2), Some(q(-6)), q(2), Gauss::zero()),
    ]
}

/// Members of (VI)-(XVII) with every integer index in `[-window, window]`.
///
/// (VI) leaves `beta` free: its resonances do not involve it.
pub fn non_principal_list(window: i64) -> Vec<Listed> {
    let mut out = Vec::new();
    for j in 4..=window {
        let alpha = q(j * (j - 3)) / q(2) - Rational::one();
        out.push(Listed { index: vec![j], ..point("VI", 3, alpha, None, q(2), Gauss::zero()) });
    }
    for k2 in -window..=window {
        for k1 in -window..=window {
            let label = if k2 >= -1 && k1 >= 5.max(2 * k2 + 1) {
                "VII"
            } else if k1 >= 5 && k2 <= -4 {
                "VIII"
            } else {
                continue;
            };
            let d = q(k1 * (3 - k2) + k2 * (k2 + 1) - 6);
            if d.is_zero() {
                continue;
            }
            let u0 = &d / q(6);
            let alpha = q(6 * k1) / &d - q(2);
            let beta = q(108 * (k1 - 2)) / (&d * &d);
            out.push(member(label, vec![k1, k2], alpha, Some(beta), u0));
        }
    }
    for k in 5..=window {
        let s = q(2 + k * k);
        let u0 = &s / q(6);
        out.push(member("IX", vec![k], q(2 * (7 - k * k)) / &s, Some(q(108) / (&s * &s)), u0));
    }
    for k in (-window..=-7).chain(3..=window) {
        let label = if k < 0 { "X" } else { "XI" };
        let u0 = q(5 * k) / q(6) + Rational::one();
        let alpha = q(-4 * k) / q(5 * k + 6);
        let beta = q(108 * k) / q((5 * k + 6) * (5 * k + 6));
        out.push(member(label, vec![k], alpha, Some(beta), u0));
    }
    out.push(point("XII", 0, q(7), None, q(2), Gauss::zero()));
    out.push(point("XIII", 0, q(1), None, q(2), Gauss::zero()));
    for (label, a, b, u0) in [
        ("XIV", rat(-7, 31), rat(-78, 961), q(-31)),
        ("XV", rat(-5, 21), rat(-6, 49), q(-21)),
        ("XVI", rat(-1, 7), rat(15, 98), q(14)),
        ("XVII", rat(-7, 5), q(0), q(-5)),
    ] {
        out.push(point(label, 0, a, Some(b), u0.clone(), k_times(&u0)));
    }
    out
}

/// The listed label covering `cand`, if any.
pub fn listed_label(list: &[Listed], cand: &Candidate) -> Option<&'static str> {
    list.iter().find(|l| l.covers(cand)).map(|l| l.label)
}
