use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{fmt_rational, parse_rational, Rational};
use super::RingError;

/// Element `re + im*k` of Q(k), `k*k = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gauss {
    pub re: Rational,
    pub im: Rational,
}

impl Gauss {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gauss { re, im: Rational::zero() }
    }

    pub fn int(v: i64) -> Self {
        Gauss::real(Rational::from_integer(v.into()))
    }

    /// The imaginary unit `k`.
    pub fn k() -> Self {
        Gauss { re: Rational::zero(), im: Rational::one() }
    }

    pub fn zero() -> Self {
        Gauss::default()
    }

    pub fn one() -> Self {
        Gauss::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re^2 + im^2`.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::NotInvertible);
        }
        let n = self.norm_sq();
        Ok(Gauss { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Gauss { re: &self.re * r, im: &self.im * r }
    }

    /// Returns the value as an integer when it is a real integer.
    pub fn as_integer(&self) -> Option<num_bigint::BigInt> {
        if self.im.is_zero() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }

    /// Renders with `i` as the imaginary unit (`"3/2"`, `"-i"`, `"1-2/3i"`).
    pub fn render(&self) -> String {
        let im_part = |im: &Rational| -> String {
            if im.is_one() {
                "i".to_string()
            } else if (-im.clone()).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", fmt_rational(im))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => "0".into(),
            (false, true) => fmt_rational(&self.re),
            (true, false) => im_part(&self.im),
            (false, false) => {
                let im = im_part(&self.im);
                if self.im.is_positive() {
                    format!("{}+{}", fmt_rational(&self.re), im)
                } else {
                    format!("{}{}", fmt_rational(&self.re), im)
                }
            }
        }
    }

    /// Parses forms such as `3`, `-1/2`, `i`, `-k`, `1/2k`, `1 - 2/3i`.
    /// Both `i` and `k` denote the imaginary unit.
    pub fn parse(text: &str) -> Result<Self, RingError> {
        let err = || RingError::Parse(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        // split into signed chunks
        let mut parts = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for idx in 1..bytes.len() {
            if (bytes[idx] == b'+' || bytes[idx] == b'-') && bytes[idx - 1] != b'/' {
                parts.push(&s[start..idx]);
                start = idx;
            }
        }
        parts.push(&s[start..]);
        let mut out = Gauss::zero();
        for p in parts {
            let (sign, body) = match p.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, p.strip_prefix('+').unwrap_or(p)),
            };
            let body = body.strip_suffix('*').unwrap_or(body);
            let (imag, num) = match body.strip_suffix('i').or_else(|| body.strip_suffix('k')) {
                Some(n) => (true, n.strip_suffix('*').unwrap_or(n)),
                None => (false, body),
            };
            let mut value = if num.is_empty() {
                if !imag {
                    return Err(err());
                }
                Rational::one()
            } else {
                parse_rational(num).map_err(|_| err())?
            };
            if sign < 0 {
                value = -value;
            }
            if imag {
                out.im += value;
            } else {
                out.re += value;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<Rational> for Gauss {
    fn from(r: Rational) -> Self {
        Gauss::real(r)
    }
}

impl From<i64> for Gauss {
    fn from(v: i64) -> Self {
        Gauss::int(v)
    }
}

impl Add<&Gauss> for &Gauss {
    type Output = Gauss;
    fn add(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Add for Gauss {
    type Output = Gauss;
    fn add(self, o: Gauss) -> Gauss {
        &self + &o
    }
}

impl AddAssign<&Gauss> for Gauss {
    fn add_assign(&mut self, o: &Gauss) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl Sub<&Gauss> for &Gauss {
    type Output = Gauss;
    fn sub(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Sub for Gauss {
    type Output = Gauss;
    fn sub(self, o: Gauss) -> Gauss {
        &self - &o
    }
}

impl Mul<&Gauss> for &Gauss {
    type Output = Gauss;
    fn mul(self, o: &Gauss) -> Gauss {
        if self.im.is_zero() && o.im.is_zero() {
            return Gauss::real(&self.re * &o.re);
        }
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Mul for Gauss {
    type Output = Gauss;
    fn mul(self, o: Gauss) -> Gauss {
        &self * &o
    }
}

impl Neg for Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re, im: -self.im }
    }
}

impl Neg for &Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Serialize for Gauss {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Gauss {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Gauss::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn k_squared_is_minus_one() {
        assert_eq!(&Gauss::k() * &Gauss::k(), Gauss::int(-1));
        assert_eq!(Gauss::k().inv().unwrap(), -Gauss::k());
    }

    #[test]
    fn conj_involution() {
        let z = Gauss::new(rat(3, 4), rat(-5, 2));
        assert_eq!(z.conj().conj(), z);
        assert_eq!(&z * &z.conj(), Gauss::real(z.norm_sq()));
    }

    #[test]
    fn render_parse_round_trip() {
        for text in ["0", "3/2", "-i", "i", "1/2i", "1-2/3i", "-7/31+5i"] {
            let g = Gauss::parse(text).unwrap();
            assert_eq!(g.render(), text);
            assert_eq!(Gauss::parse(&g.render()).unwrap(), g);
        }
        assert_eq!(Gauss::parse("-k").unwrap(), -Gauss::k());
        assert_eq!(Gauss::parse("1/2 k").unwrap(), Gauss::new(rat(0, 1), rat(1, 2)));
        assert!(Gauss::parse("").is_err());
        assert!(Gauss::parse("x").is_err());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(Gauss::zero().inv(), Err(RingError::NotInvertible));
    }
}
