//! Exact arithmetic over `Z_d` and linear algebra over it.

mod howell;
mod local;
mod matrix;
mod ring;

pub use howell::{
    howell_basis, howell_form, in_row_span, kernel, row_span_contains, same_row_span, solve_linear,
    HowellForm,
};
pub use local::{
    free_summand_basis, idempotent_rank, is_free_summand, residue_rank, smith_valuations,
    span_valuations,
};
pub use matrix::ModMatrix;
pub use ring::{gcd, mod_inverse, xgcd, PrimePower, RingSpec, MAX_MODULUS};

pub(crate) use ring::unit_normalizer;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("modulus {0} is outside the supported range 2..=2^31-1")]
    InvalidModulus(u64),
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("entry {value} is not reduced modulo {modulus}")]
    UnreducedEntry { value: u64, modulus: u64 },
    #[error("linear system has no solution; certificate {certificate:?}")]
    NoSolution { certificate: Vec<u64> },
    #[error("matrix is not idempotent")]
    NotIdempotent,
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}
