use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Gauss, Rational, RingError};

/// Generator subsets are stored as bitmasks.
pub const MAX_GENERATORS: usize = 64;

/// Identifies a generator registry. `0` is reserved for pure Gaussian
/// scalars, which are compatible with every registry.
pub type RegistryId = u32;

static NEXT_REGISTRY: AtomicU32 = AtomicU32::new(1);

/// Names of the odd generators of one computation. Canonical generator order
/// is registration order.
#[derive(Clone, Debug)]
pub struct GeneratorRegistry {
    id: RegistryId,
    names: Vec<String>,
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl GeneratorRegistry {
    pub fn new() -> Self {
        GeneratorRegistry { id: NEXT_REGISTRY.fetch_add(1, Ordering::Relaxed), names: Vec::new() }
    }

    pub fn id(&self) -> RegistryId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Registers a generator (or returns the existing index for `name`).
    pub fn register(&mut self, name: &str) -> Result<usize, RingError> {
        if let Some(i) = self.index_of(name) {
            return Ok(i);
        }
        if self.names.len() == MAX_GENERATORS {
            return Err(RingError::RegistryFull);
        }
        self.names.push(name.to_string());
        Ok(self.names.len() - 1)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    /// The scalar consisting of the single generator `index`.
    pub fn generator(&self, index: usize) -> GrassmannScalar {
        assert!(index < self.names.len(), "generator {index} not registered");
        GrassmannScalar { registry: self.id, terms: vec![(1u64 << index, Gauss::one())] }
    }
}

/// Element of Q(k) tensored with the exterior algebra on the registry's
/// generators. Terms are kept sorted by bitmask with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GrassmannScalar {
    registry: RegistryId,
    terms: Vec<(u64, Gauss)>,
}

/// Sign of the permutation that merges the sorted generator lists `a` and `b`.
fn merge_sign(a: u64, b: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    swaps % 2 == 1
}

fn combine(a: RegistryId, b: RegistryId) -> Result<RegistryId, RingError> {
    match (a, b) {
        (0, x) | (x, 0) => Ok(x),
        (x, y) if x == y => Ok(x),
        (x, y) => Err(RingError::RegistryMismatch(x, y)),
    }
}

impl GrassmannScalar {
    pub fn zero() -> Self {
        GrassmannScalar::default()
    }

    pub fn one() -> Self {
        GrassmannScalar::from_gauss(Gauss::one())
    }

    pub fn int(v: i64) -> Self {
        GrassmannScalar::from_gauss(Gauss::int(v))
    }

    pub fn from_gauss(g: Gauss) -> Self {
        if g.is_zero() {
            GrassmannScalar::zero()
        } else {
            GrassmannScalar { registry: 0, terms: vec![(0, g)] }
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        GrassmannScalar::from_gauss(Gauss::real(r))
    }

    pub fn registry(&self) -> RegistryId {
        self.registry
    }

    pub fn terms(&self) -> &[(u64, Gauss)] {
        &self.terms
    }

    /// Builds a scalar from arbitrary (mask, coefficient) pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms(registry: RegistryId, terms: impl IntoIterator<Item = (u64, Gauss)>) -> Self {
        let mut v: Vec<(u64, Gauss)> = terms.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(u64, Gauss)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        let registry = if out.iter().any(|t| t.0 != 0) { registry } else { 0 };
        GrassmannScalar { registry, terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// The coefficient of the empty generator subset.
    pub fn body(&self) -> Gauss {
        match self.terms.first() {
            Some((0, c)) => c.clone(),
            _ => Gauss::zero(),
        }
    }

    /// Everything except the body.
    pub fn soul(&self) -> GrassmannScalar {
        let terms: Vec<_> = self.terms.iter().filter(|t| t.0 != 0).cloned().collect();
        let registry = if terms.is_empty() { 0 } else { self.registry };
        GrassmannScalar { registry, terms }
    }

    /// Returns the body when the scalar has no soul.
    pub fn as_gauss(&self) -> Option<Gauss> {
        match self.terms.as_slice() {
            [] => Some(Gauss::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|t| t.0.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|t| t.0.count_ones() % 2 == 1)
    }

    /// Parity of a homogeneous element, `None` for mixed elements.
    pub fn parity(&self) -> Option<bool> {
        if self.is_even() {
            Some(false)
        } else if self.is_odd() {
            Some(true)
        } else {
            None
        }
    }

    pub fn scale(&self, g: &Gauss) -> Self {
        if g.is_zero() {
            return GrassmannScalar::zero();
        }
        GrassmannScalar {
            registry: self.registry,
            terms: self.terms.iter().map(|(m, c)| (*m, c * g)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, RingError> {
        let registry = combine(self.registry, other.registry)?;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    let c = &a.1 + &b.1;
                    if !c.is_zero() {
                        out.push((a.0, c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let registry = if out.iter().any(|t| t.0 != 0) { registry } else { 0 };
        Ok(GrassmannScalar { registry, terms: out })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, RingError> {
        let registry = combine(self.registry, other.registry)?;
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return Ok(other.scale(&self.terms[0].1));
        }
        if other.terms.len() == 1 && other.terms[0].0 == 0 {
            return Ok(self.scale(&other.terms[0].1));
        }
        let mut raw = Vec::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca * cb;
                raw.push((ma | mb, if merge_sign(*ma, *mb) { -c } else { c }));
            }
        }
        Ok(GrassmannScalar::from_terms(registry, raw))
    }

    /// Exact inverse `b^-1 * sum_j (-s b^-1)^j` for `a = b + s`.
    pub fn invert(&self) -> Result<Self, RingError> {
        let body = self.body();
        let binv = body.inv()?;
        let soul = self.soul();
        let step = soul.scale(&-binv.clone());
        let mut term = GrassmannScalar::one();
        let mut acc = GrassmannScalar::one();
        loop {
            term = term.try_mul(&step)?;
            if term.is_zero() {
                break;
            }
            acc = acc.try_add(&term)?;
        }
        Ok(acc.scale(&binv))
    }

    /// Number of generators in the largest subset carrying a nonzero term.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.count_ones()).max().unwrap_or(0)
    }

    /// Canonical text form; generator names are taken from `registry` when
    /// given, otherwise generators print as `g0`, `g1`, ...
    pub fn render(&self, registry: Option<&GeneratorRegistry>) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (mask, c)) in self.terms.iter().enumerate() {
            let gens: Vec<String> = (0..64)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| match registry {
                    Some(r) if (b as usize) < r.len() => r.name(b as usize).to_string(),
                    _ => format!("g{b}"),
                })
                .collect();
            let coeff = c.render();
            let wrapped = if !c.re.is_zero_ref() && !c.im.is_zero_ref() { format!("({coeff})") } else { coeff };
            let piece = if gens.is_empty() {
                wrapped
            } else if c.is_one() {
                gens.join("*")
            } else if (-c).is_one() {
                format!("-{}", gens.join("*"))
            } else {
                format!("{}*{}", wrapped, gens.join("*"))
            };
            if idx > 0 && !piece.starts_with('-') {
                out.push('+');
            }
            out.push_str(&piece);
        }
        out
    }

    /// Exact serialization as (bitmask, real, imaginary) records.
    pub fn to_records(&self) -> Vec<ScalarRecord> {
        self.terms
            .iter()
            .map(|(m, c)| ScalarRecord {
                mask: *m,
                re: (c.re.numer().to_string(), c.re.denom().to_string()),
                im: (c.im.numer().to_string(), c.im.denom().to_string()),
            })
            .collect()
    }

    pub fn from_records(registry: RegistryId, records: &[ScalarRecord]) -> Result<Self, RingError> {
        let part = |p: &(String, String)| -> Result<Rational, RingError> {
            let n: BigInt = p.0.parse().map_err(|_| RingError::Parse(p.0.clone()))?;
            let d: BigInt = p.1.parse().map_err(|_| RingError::Parse(p.1.clone()))?;
            if d == BigInt::from(0) {
                return Err(RingError::Parse(p.1.clone()));
            }
            Ok(Rational::new(n, d))
        };
        let mut terms = Vec::new();
        for r in records {
            terms.push((r.mask, Gauss::new(part(&r.re)?, part(&r.im)?)));
        }
        Ok(GrassmannScalar::from_terms(registry, terms))
    }
}

trait ZeroRef {
    fn is_zero_ref(&self) -> bool;
}

impl ZeroRef for Rational {
    fn is_zero_ref(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// One term of a serialized [`GrassmannScalar`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarRecord {
    pub mask: u64,
    pub re: (String, String),
    pub im: (String, String),
}

impl fmt::Display for GrassmannScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

impl From<Gauss> for GrassmannScalar {
    fn from(g: Gauss) -> Self {
        GrassmannScalar::from_gauss(g)
    }
}

// The operator forms panic on a registry mismatch; use `try_add` / `try_mul`
// when mixing scalars from different sessions.
impl Add<&GrassmannScalar> for &GrassmannScalar {
    type Output = GrassmannScalar;
    fn add(self, o: &GrassmannScalar) -> GrassmannScalar {
        self.try_add(o).expect("registry mismatch")
    }
}

impl Add for GrassmannScalar {
    type Output = GrassmannScalar;
    fn add(self, o: GrassmannScalar) -> GrassmannScalar {
        &self + &o
    }
}

impl Sub<&GrassmannScalar> for &GrassmannScalar {
    type Output = GrassmannScalar;
    fn sub(self, o: &GrassmannScalar) -> GrassmannScalar {
        self.try_add(&-o).expect("registry mismatch")
    }
}

impl Sub for GrassmannScalar {
    type Output = GrassmannScalar;
    fn sub(self, o: GrassmannScalar) -> GrassmannScalar {
        &self - &o
    }
}

impl Mul<&GrassmannScalar> for &GrassmannScalar {
    type Output = GrassmannScalar;
    fn mul(self, o: &GrassmannScalar) -> GrassmannScalar {
        self.try_mul(o).expect("registry mismatch")
    }
}

impl Mul for GrassmannScalar {
    type Output = GrassmannScalar;
    fn mul(self, o: GrassmannScalar) -> GrassmannScalar {
        &self * &o
    }
}

impl Neg for &GrassmannScalar {
    type Output = GrassmannScalar;
    fn neg(self) -> GrassmannScalar {
        GrassmannScalar {
            registry: self.registry,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for GrassmannScalar {
    type Output = GrassmannScalar;
    fn neg(self) -> GrassmannScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn reg(n: usize) -> (GeneratorRegistry, Vec<GrassmannScalar>) {
        let mut r = GeneratorRegistry::new();
        for i in 0..n {
            r.register(&format!("t{}", i + 1)).unwrap();
        }
        let gens = (0..n).map(|i| r.generator(i)).collect();
        (r, gens)
    }

    #[test]
    fn additive_cancellation() {
        let (_, g) = reg(2);
        let a = GrassmannScalar::one() + &g[0] * &g[1];
        let sum = a + GrassmannScalar::int(-1);
        assert_eq!(sum, &g[0] * &g[1]);
        let k = GrassmannScalar::from_gauss(Gauss::k());
        assert_eq!(&k + &k, GrassmannScalar::from_gauss(Gauss::new(rat(0, 1), rat(2, 1))));
    }

    #[test]
    fn nilpotent_and_anticommuting() {
        let (_, g) = reg(2);
        assert!((&g[0] * &g[0]).is_zero());
        assert_eq!(&g[1] * &g[0], -(&g[0] * &g[1]));
        let k = GrassmannScalar::from_gauss(Gauss::k());
        assert_eq!(&k * &k, GrassmannScalar::int(-1));
    }

    #[test]
    fn soul_squares_away() {
        let (_, g) = reg(2);
        // lambda0 * theta1, both odd
        let s = &g[0] * &g[1];
        let a = GrassmannScalar::one() + s.clone();
        let b = GrassmannScalar::one() - s;
        assert!((a * b).is_one());
    }

    #[test]
    fn inverses() {
        let (_, g) = reg(2);
        assert_eq!(GrassmannScalar::int(2).invert().unwrap(), GrassmannScalar::from_rational(rat(1, 2)));
        let a = GrassmannScalar::one() + &g[0] * &g[1];
        assert_eq!(a.invert().unwrap(), GrassmannScalar::one() - &g[0] * &g[1]);
        let k = GrassmannScalar::from_gauss(Gauss::k());
        assert_eq!(k.invert().unwrap(), -k);
        assert_eq!((&g[0] * &g[1]).scale(&Gauss::k()).invert(), Err(RingError::NotInvertible));
    }

    #[test]
    fn body_and_soul() {
        let (_, g) = reg(2);
        let u0 = GrassmannScalar::one() - (&g[0] * &g[1]).scale(&Gauss::real(rat(2, 3)));
        assert_eq!(u0.body(), Gauss::one());
        assert!(GrassmannScalar::int(5).soul().is_zero());
        let x = (&g[0] * &g[1]).scale(&Gauss::k());
        assert!(x.body().is_zero());
        assert_eq!(&GrassmannScalar::from_gauss(x.body()) + &x.soul(), x);
    }

    #[test]
    fn registry_mismatch_is_reported() {
        let (_, a) = reg(1);
        let (_, b) = reg(1);
        assert!(matches!(a[0].try_add(&b[0]), Err(RingError::RegistryMismatch(_, _))));
        assert!(matches!(a[0].try_mul(&b[0]), Err(RingError::RegistryMismatch(_, _))));
        // pure numbers mix with anything
        assert!(a[0].try_mul(&GrassmannScalar::int(3)).is_ok());
    }

    #[test]
    fn records_round_trip() {
        let (r, g) = reg(3);
        let x = GrassmannScalar::from_gauss(Gauss::new(rat(-7, 31), rat(5, 2)))
            + (&g[0] * &g[2]).scale(&Gauss::real(rat(-78, 961)));
        let back = GrassmannScalar::from_records(r.id(), &x.to_records()).unwrap();
        assert_eq!(back, x);
        assert_eq!(x.render(Some(&r)), "(-7/31+5/2i)-78/961*t1*t3");
    }
}
