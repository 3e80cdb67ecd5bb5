use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact value of a Hankel determinant `H_{m,n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HankelValue(pub BigInt);

impl HankelValue {
    pub fn zero() -> Self {
        HankelValue(BigInt::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }

    /// `min(|v|, cap)`.
    pub fn magnitude_capped(&self, cap: u64) -> u64 {
        self.0.magnitude().to_u64().map_or(cap, |v| v.min(cap))
    }

    pub fn as_bigint(&self) -> &BigInt {
        &self.0
    }
}

impl From<i64> for HankelValue {
    fn from(v: i64) -> Self {
        HankelValue(BigInt::from(v))
    }
}

impl From<BigInt> for HankelValue {
    fn from(v: BigInt) -> Self {
        HankelValue(v)
    }
}

impl PartialEq<i64> for HankelValue {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigInt::from(*other)
    }
}

impl fmt::Display for HankelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}
