//! Exact coefficient arithmetic: rationals, Gaussian rationals (the imaginary
//! unit `k`, with `k*k = -1`) and a finitely generated Grassmann algebra over
//! them.

mod gauss;
mod grassmann;
mod rational;

pub use gauss::Gauss;
pub use grassmann::{GeneratorRegistry, GrassmannScalar, RegistryId, MAX_GENERATORS};
pub use rational::{parse_rational, rat, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operands belong to different generator registries ({0} vs {1})")]
    RegistryMismatch(u32, u32),
    #[error("element is not invertible: its body is zero")]
    NotInvertible,
    #[error("generator registry is full ({MAX_GENERATORS} generators)")]
    RegistryFull,
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
}
