//! Leading orders, resonances and the level-by-level test of a branch.

mod lead;
mod resonance;
mod run;
mod scan;

pub use lead::{leading_exponents_bosonic, LeadBalance};
pub use resonance::{
    determinant, fermion_matrix_in_r, fermionic_leading_candidates, interpolate_expr, n_symbol, r_symbol,
    recursion_matrix, resonance_polynomial, LeadCandidate, ResonancePolynomial,
};
pub use run::{
    movable_log_guard, prepare_system, run_branch, run_branch_full, probe_branch, BranchRun, FailureSite, LedgerEntry, Status,
    TestVerdict, DEFERRAL_CAP,
};
pub use scan::{level0_seeds, Level0Seed};

use thiserror::Error;

use crate::kernel::{KernelError, Sector};
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("seed: {0}")]
    Seed(String),
    #[error("recursion matrix is not numeric: {0}")]
    SymbolicMatrix(String),
    #[error("recursion matrix entries are not polynomial in n")]
    NotPolynomial,
    #[error("resonance determinant vanishes identically")]
    Degenerate,
    #[error("max level {given} is below the last resonance {needed}")]
    MaxLevelTooLow { needed: i32, given: i32 },
    #[error("{sector} condition from level {level} still open after the deferral window")]
    Inconclusive { level: i32, sector: Sector },
    #[error("ledger has {found} arbitrary functions but {expected} resonances")]
    LedgerMismatch { expected: usize, found: usize },
}
