//! Symbolic expressions over the coefficient ring, with the small amount of
//! linear algebra and univariate polynomial work the engine needs.

mod expr;
mod linear;
mod parse;
mod poly;
mod symbol;

pub use expr::{Expression, Monomial};
pub use linear::{solve_level, solve_relations, LevelSolution, LinearSystem2, Sector};
pub use parse::{line_col, parse_expression, parse_ratfunc, ExprResolver, NameTable};
pub use poly::{integer_roots, rational_roots, GaussPoly, RatFunc};
pub use symbol::{Parity, Symbol, SymbolDescriptor, SymbolKind};

use thiserror::Error;

use crate::ring::RingError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("value bound to `{symbol}` does not have {expected} parity")]
    ParityMismatch { symbol: String, expected: Parity },
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("division by a non-constant or zero expression")]
    Division,
    #[error("relation is not linear in the level unknowns")]
    NonLinear,
    #[error("matrix body contains symbols")]
    SymbolicBody,
    #[error("linear solve did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
}
