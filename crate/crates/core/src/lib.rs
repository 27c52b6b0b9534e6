//! Exact and certified computations around Vinogradov's mean value theorem:
//! admissible exponents, the efficient-congruencing recursions, solution
//! censuses for the Vinogradov system, the congruence-class auditor and the
//! downstream Waring and Tarry bounds.

pub mod applications;
pub mod arith;
pub mod congruences;
pub mod error;
pub mod exponents;
pub mod meanvalue;
pub mod recurrences;

pub use error::{Error, Result};

/// Serialize a big integer as a decimal string.
pub(crate) fn ser_big<S: serde::Serializer>(x: &num_bigint::BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
