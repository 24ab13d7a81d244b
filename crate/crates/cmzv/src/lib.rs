//! Exact arithmetic for colored multizeta values over `F_q[theta]`.
//!
//! The crate computes power sums and colored multizeta values (CMZVs) in the
//! function-field setting, generates and verifies their sum-shuffle relations,
//! and constructs the level-`r` Frobenius difference systems (`Phi`, `Psi`,
//! `Upsilon` matrices) whose entries realize CMZVs under specialization.
//! All arithmetic is exact: finite-field towers, rational functions in
//! `theta`, and truncated Laurent/Tate series with sound precision tracking.
//!
//! Module map:
//! - [`gf`]: finite field towers `F_p ⊂ F_q ⊂ F_{q^r} ⊂ ...` with
//!   deterministic moduli, embeddings, and Frobenius twists.
//! - [`scalars`]: truncated Laurent series in a uniformizer `v` with
//!   `v^{(q-1)q^r} = -1/theta`; the computational model of the completion
//!   at infinity and the fractional `theta`-powers the twists need.
//! - [`ringa`]: exact arithmetic in `A = F_q[theta]` and its fraction field,
//!   monic enumeration, Carlitz gamma/factorial values.
//! - [`powersum`]: power sums, twisted and nested power sums, CMZV
//!   evaluation with certified truncation and the leading-degree certificate.
//! - [`stuffle`]: the symbolic sum-shuffle engine and relation verifier.
//! - [`tmotive`]: Omega, Anderson-Thakur polynomials, deformation series,
//!   the level-`r` matrices and the difference-equation checker.
//! - [`relmine`]: F_p-linear relation mining over digit matrices.

pub mod gf;
pub mod powersum;
pub mod relmine;
pub mod ringa;
pub mod scalars;
pub mod stuffle;
pub mod tmotive;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field size {0} exceeds the configured guard {1}")]
    FieldTooLarge(u128, u64),
    #[error("{0} is not a power of the field characteristic {1}")]
    NotCharPower(u64, u64),
    #[error("field spec mismatch: expected {expected}, got {got}")]
    SpecMismatch { expected: String, got: String },
    #[error("element is zero (or indistinguishable from zero at the current precision)")]
    DivisionByZero,
    #[error("exponent {exp} not divisible by q^{n} in inverse twist")]
    TwistIndivisible { exp: i64, n: u32 },
    #[error("theta-root index {0} exceeds the twist depth r = {1}")]
    RootDepthExceeded(u32, u32),
    #[error("enumeration of {0} monic polynomials exceeds the guard {1}")]
    EnumerationTooLarge(u128, u64),
    #[error("precision budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("empty word")]
    EmptyWord,
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("chen delta index j={j} out of range (0, {hi})")]
    ChenIndexRange { j: u32, hi: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reads the maximum admissible field size from `CMZV_MAX_FIELD`,
/// defaulting to `2^20` elements.
pub(crate) fn max_field_size() -> u64 {
    std::env::var("CMZV_MAX_FIELD")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1 << 20)
}

/// Guard for monic-enumeration sizes (`q^d` polynomials).
pub(crate) const MAX_ENUMERATION: u64 = 1 << 22;
