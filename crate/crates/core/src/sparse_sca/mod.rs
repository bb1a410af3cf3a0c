//! Sparse ternary coding with ambiguation: projection matrices, the
//! ternary/binary/sign encoders, the ambiguation mechanism, verification
//! scoring with purification, and the support-enumeration attack on
//! overcomplete projections.

mod attack;
mod cohort;
mod encode;
mod projection;
mod template;

pub use attack::{binomial, enumeration_attack, AttackCandidate};
pub use cohort::{
    enroll_cohort, reconstruction_error_counts, reconstruction_error_rate, Cohort, EnrolledUser,
    Hypothesis,
};
pub use encode::{
    ambiguate, bc_encode, purify_and_reconstruct, sbc_encode, stc_encode, stc_threshold_encode,
    verify_score, ProbeRule, TernaryCodeword,
};
pub use projection::{pca_projection, Projection, ProjectionKind};
pub use template::ProtectedTemplate;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScaError {
    #[error("sparsity {s_t} out of range for codeword length {l}")]
    SparsityOutOfRange { s_t: usize, l: usize },
    #[error("ambiguation count {s_n} exceeds available zeros {zeros}")]
    AmbiguationTooLarge { s_n: usize, zeros: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("projection matrix is rank deficient")]
    RankDeficient,
    #[error("need at least as many samples as dimensions ({cols} < {rows})")]
    NotEnoughSamples { rows: usize, cols: usize },
    #[error("identity projection requires L = N")]
    IdentityNotSquare,
    #[error("candidate count {count} exceeds budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("codeword is not ternary at position {0}")]
    NotTernary(usize),
    #[error("template format error: {0}")]
    Format(String),
}
