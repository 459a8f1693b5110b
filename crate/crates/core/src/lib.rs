//! Exact arithmetic for Shimura curves of Γ₀(p)-type: exceptional prime
//! sets, effective height bounds, and rational-point certificates.
//!
//! The crate is organised around a pipeline:
//!
//! * [`arith`] — big-integer number theory (Kronecker symbols, deterministic
//!   primality, budgeted factoring, exact divisibility).
//! * [`interval`] — certified dyadic interval arithmetic with outward
//!   rounding (`exp`, `ln`, roots), used wherever a real inequality has to
//!   be certified rather than approximated.
//! * [`field`] — exact arithmetic in the ring of integers of a Galois number
//!   field described by a [`field::FieldCard`], including absolute heights.
//! * [`quadratic`] — fully automatic field cards for quadratic fields:
//!   class groups, fundamental units, regulators, prime ideals, generators.
//! * [`weil`] — quadratic Weil numbers β with β² + aβ + n = 0, |a| ≤ 2√n.
//! * [`exceptional`] — the exceptional prime set N₁ⁿᵉʷ(k) with exact
//!   membership queries, and the a-priori bound constants C₁, C₂, C(k, a).
//! * [`quaternion`] — local splitting of an indefinite quaternion algebra of
//!   discriminant d and the search for an admissible split prime q.
//! * [`gate`] — the combined applicability certificate.
//! * [`schema`] — versioned JSON formats for cards, reports, certificates.

pub mod arith;
pub mod config;
pub mod exceptional;
pub mod field;
pub mod gate;
pub mod interval;
pub mod quadratic;
pub mod quaternion;
pub mod schema;
pub mod weil;

pub use config::Config;
pub use exceptional::{BoundConstants, ExceptionalReport, ExponentVector, M2Entry, SplitPrimeDatum};
pub use field::{FieldCard, RingElement};
pub use gate::Certificate;
pub use interval::{Dyadic, Interval};
pub use quadratic::{QuadForm, QuadIdeal};
pub use quaternion::QuaternionDisc;
pub use weil::WeilNumber;

use num_bigint::BigInt;

/// Errors shared across the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("Kronecker symbol is undefined for modulus 0")]
    ZeroModulus,
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("{0} is not squarefree")]
    NotSquarefree(BigInt),
    #[error("{0} is not a valid quadratic field generator")]
    InvalidQuadraticD(BigInt),
    #[error("quaternion discriminant {0} is invalid: {1}")]
    InvalidDiscriminant(BigInt, String),
    #[error("coordinate vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Galois element index {0} out of range")]
    GaloisIndexOutOfRange(usize),
    #[error("prime {0} is inert; no degree-1 prime lies above it")]
    InertPrime(BigInt),
    #[error("precision cap {cap} bits reached; comparison undecided at place {place:?}")]
    PrecisionExhausted { cap: u32, place: Option<usize> },
    #[error("exponent enumeration refused: degree {degree} gives 5^{degree} = {estimate} vectors (cap {cap})")]
    EnumerationRefused { degree: usize, estimate: String, cap: usize },
    #[error("search exhausted while {what} (limit {limit})")]
    SearchExhausted { what: String, limit: u64 },
    #[error("unit reduction could not certify the height bound: {0}")]
    ReductionUncertified(String),
    #[error("field card is invalid: {0}")]
    CardValidation(String),
    #[error("operation unsupported for this card: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
