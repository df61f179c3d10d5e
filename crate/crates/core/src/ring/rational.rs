use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RingError;

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(text: &str) -> Result<Rational, RingError> {
    let t = text.trim();
    let err = || RingError::Parse(text.to_string());
    if t.is_empty() {
        return Err(err());
    }
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| err())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-81/25").unwrap(), rat(-81, 25));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("0/7").unwrap(), Rational::zero());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn canonical_zero_and_sign() {
        let z = rat(0, -5);
        assert_eq!(z.numer(), &BigInt::zero());
        assert!(z.denom().is_one());
        let r = rat(3, -6);
        assert_eq!(fmt_rational(&r), "-1/2");
    }
}
