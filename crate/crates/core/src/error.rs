use thiserror::Error;

use crate::sequence::Violation;

/// Errors reported by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `f_j` does not fit in 64 bits.
    #[error("f_{index} exceeds the 64-bit width")]
    FOverflow { index: usize },

    /// A derived quantity (a sum, an anchor, a diagonal index) left the 64-bit range.
    #[error("64-bit overflow while computing {what}")]
    Overflow { what: &'static str },

    #[error("invalid f-representation: {0}")]
    InvalidRepresentation(Violation),

    /// The odd-shift comparison criterion is only established for k >= 1.
    #[error("odd-shift criterion is undefined for k = {k} (requires k >= 1)")]
    ShiftDomain { k: u32 },

    #[error("Hankel order must be at least 1 (got n = {n})")]
    InvalidOrder { n: u64 },

    #[error("cell ({m}, {n}) does not lie in {region}")]
    NotInRegion { m: u64, n: u64, region: String },

    /// The cell is covered by zero or by several parallelograms.
    #[error("cell ({m}, {n}) is covered by {count} parallelograms")]
    Coverage { m: u64, n: u64, count: usize },

    /// The CRT prime pool cannot certify a determinant of this order.
    #[error("prime pool certifies orders up to {max_order}, requested {order}")]
    InsufficientPrimes { order: usize, max_order: usize },

    #[error("word prefix of length {len} is too large to materialize")]
    PrefixTooLong { len: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
