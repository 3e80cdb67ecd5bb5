//! The `f` numeration system and the fixed point `s` of the substitution
//! `1 -> 101, 0 -> 1`.
//!
//! The length sequence is `f_{2j} = |τ^j(1)|`, `f_{2j+1} = |τ^j(10)|`, i.e.
//! `1, 2, 3, 4, 7, 10, 17, 24, 41, 58, ...`. Every `n >= 0` has a unique
//! representation `n = Σ a_i f_i` with binary digits, no two adjacent ones,
//! and no ones at both `i` and `i + 2` for even `i`. The word itself is
//! decided by the lowest digit: `s_n = 0` exactly when `a_0(n) = 1`.

use std::fmt;
use std::sync::{LazyLock, PoisonError, RwLock};

use crate::error::{Error, Result};

static F_TABLE: LazyLock<Vec<u64>> = LazyLock::new(|| {
    let mut f = vec![1u64, 2];
    loop {
        let j = f.len();
        let next = if j % 2 == 0 {
            f[j - 2].checked_add(f[j - 1])
        } else {
            f[j - 3].checked_add(f[j - 1])
        };
        match next {
            Some(v) => f.push(v),
            None => break,
        }
    }
    f
});

/// Every `f_j` that fits in a `u64`, indexed by `j`.
pub fn f_table() -> &'static [u64] {
    &F_TABLE
}

/// `f_j`, or [`Error::FOverflow`] once the value no longer fits in 64 bits.
pub fn f(j: usize) -> Result<u64> {
    F_TABLE.get(j).copied().ok_or(Error::FOverflow { index: j })
}

/// `f_j` extended to `j = -2, -1` by `f_{-2} = 1`, `f_{-1} = 0`, which keeps
/// both recurrences valid and lets the generation `k = -1` parallelograms
/// close the `n = 1` row.
pub(crate) fn f_ext(j: i64) -> Result<u64> {
    match j {
        -2 => Ok(1),
        -1 => Ok(0),
        j if j >= 0 => f(j as usize),
        _ => unreachable!("f is only extended down to index -2"),
    }
}

/// `f_j mod 4`, from the period-8 residue pattern rather than from `f_j`
/// itself, so it is defined for every `j`.
pub fn f_mod4(j: usize) -> u8 {
    let k = j / 2;
    if j % 2 == 0 {
        match k % 4 {
            0 | 3 => 1,
            _ => 3,
        }
    } else if k % 2 == 0 {
        2
    } else {
        0
    }
}

/// First digit constraint broken by a raw digit vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// A digit other than 0 or 1.
    NonBinary { index: usize, value: u8 },
    /// `a_i = a_{i+1} = 1`.
    Adjacent { index: usize },
    /// `a_i = a_{i+2} = 1` with `i` even.
    EvenSkip { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonBinary { index, value } => {
                write!(f, "digit a_{index} = {value} is not binary")
            }
            Violation::Adjacent { index } => {
                write!(f, "a_{index} and a_{} are both 1", index + 1)
            }
            Violation::EvenSkip { index } => {
                write!(
                    f,
                    "a_{index} and a_{} are both 1 with {index} even",
                    index + 2
                )
            }
        }
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validation {
    pub first_violation: Option<Violation>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks a raw digit vector `(a_0, a_1, ...)` against the two digit
/// constraints, reporting the violation with the smallest index.
pub fn validate(digits: &[u8]) -> Validation {
    let at = |i: usize| digits.get(i).copied().unwrap_or(0);
    let first_violation = (0..digits.len()).find_map(|i| {
        let a = digits[i];
        if a > 1 {
            Some(Violation::NonBinary { index: i, value: a })
        } else if a == 1 && at(i + 1) == 1 {
            Some(Violation::Adjacent { index: i })
        } else if a == 1 && i % 2 == 0 && at(i + 2) == 1 {
            Some(Violation::EvenSkip { index: i })
        } else {
            None
        }
    });
    Validation { first_violation }
}

/// The f-representation of a nonnegative integer, stored as a digit mask
/// (bit `i` is `a_i`). Always satisfies both digit constraints.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FRep(u128);

impl FRep {
    pub const ZERO: FRep = FRep(0);

    /// Builds a representation from raw digits after validating them.
    pub fn from_digits(digits: &[u8]) -> Result<FRep> {
        if let Some(v) = validate(digits).first_violation {
            return Err(Error::InvalidRepresentation(v));
        }
        let mut mask = 0u128;
        for (i, &a) in digits.iter().enumerate() {
            if a == 1 {
                if i >= F_TABLE.len() {
                    return Err(Error::FOverflow { index: i });
                }
                mask |= 1 << i;
            }
        }
        Ok(FRep(mask))
    }

    /// Builds a representation from the indices of its nonzero digits.
    pub fn from_indices(indices: &[usize]) -> Result<FRep> {
        let len = indices.iter().map(|&i| i + 1).max().unwrap_or(0);
        let mut digits = vec![0u8; len];
        for &i in indices {
            digits[i] = 1;
        }
        FRep::from_digits(&digits)
    }

    pub fn digit(&self, i: usize) -> u8 {
        if i < 128 {
            ((self.0 >> i) & 1) as u8
        } else {
            0
        }
    }

    /// `(a_0, ..., a_r)` with `a_r = 1`; empty for zero.
    pub fn digits(&self) -> Vec<u8> {
        let len = 128 - self.0.leading_zeros() as usize;
        (0..len).map(|i| self.digit(i)).collect()
    }

    /// Indices `i` with `a_i = 1`, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..128).filter(move |&i| self.digit(i) == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// Keeps digits `a_0 ..= a_{2k+2}`.
    pub fn truncated(&self, k: u32) -> FRep {
        let width = 2 * k as u64 + 3;
        if width >= 128 {
            *self
        } else {
            FRep(self.0 & ((1u128 << width) - 1))
        }
    }

    /// Value of the representation. Infallible for anything produced by
    /// [`encode`]; checked for hand-built digit vectors.
    pub fn value(&self) -> Result<u64> {
        self.indices().try_fold(0u64, |acc, i| {
            acc.checked_add(f(i)?).ok_or(Error::Overflow {
                what: "f-representation value",
            })
        })
    }
}

impl fmt::Debug for FRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("FRep")
            .field(&self.indices().collect::<Vec<_>>())
            .finish()
    }
}

/// Greedy f-representation: repeatedly subtract the largest `f_j` that fits.
pub fn encode(mut n: u64) -> FRep {
    let table = f_table();
    let mut mask = 0u128;
    let mut hi = table.len();
    while n > 0 {
        let j = table[..hi].partition_point(|&v| v <= n) - 1;
        mask |= 1 << j;
        n -= table[j];
        hi = j;
    }
    FRep(mask)
}

/// `Σ a_i f_i`.
pub fn decode(rep: &FRep) -> Result<u64> {
    if let Some(v) = validate(&rep.digits()).first_violation {
        return Err(Error::InvalidRepresentation(v));
    }
    rep.value()
}

/// Truncated representation `Φ_k(n) = Σ_{i <= 2k+2} a_i(n) f_i`.
pub fn phi(k: u32, n: u64) -> u64 {
    encode(n)
        .truncated(k)
        .value()
        .expect("a truncated representation never exceeds the represented value")
}

/// `s_n`, read off the lowest f-digit of `n`.
pub fn s_at(n: u64) -> u8 {
    1 - encode(n).digit(0)
}

/// Whether `s_{n + f_{2k}} != s_n`, decided from `Φ_k(n)` alone.
pub fn shift_even_differs(n: u64, k: u32) -> Result<bool> {
    let half = f(2 * k as usize + 1)? / 2;
    let p = phi(k, n);
    Ok(p == half || p + 1 == half)
}

/// Whether `s_{n + f_{2k+1}} != s_n`, decided from `Φ_k(n)` alone.
///
/// Only established for `k >= 1`; `k = 0` is rejected.
pub fn shift_odd_differs(n: u64, k: u32) -> Result<bool> {
    if k == 0 {
        return Err(Error::ShiftDomain { k });
    }
    let half = f(2 * k as usize + 3)? / 2;
    let even = f(2 * k as usize)?;
    let p = phi(k, n);
    Ok(p == half || p + 1 == half || p == half + even || p + 1 == half + even)
}

/// `(s_{f_{2k+1}/2}, s_{f_{2k+1}/2 - 1})`, which depends only on the parity of `k`.
pub fn s_at_half(k: u32) -> (u8, u8) {
    if k % 2 == 1 {
        (1, 0)
    } else {
        (0, 1)
    }
}

/// One application of the substitution `1 -> 101, 0 -> 1`.
pub fn substitute(word: &[u8]) -> Vec<u8> {
    let ones = word.iter().filter(|&&b| b == 1).count();
    let mut out = Vec::with_capacity(word.len() + 2 * ones);
    for &b in word {
        if b == 1 {
            out.extend_from_slice(&[1, 0, 1]);
        } else {
            out.push(1);
        }
    }
    out
}

/// Lazily grown prefix of the fixed point, always equal to some `τ^j(1)`.
///
/// Readers share the buffer; growth replaces it by its image under `τ`.
#[derive(Debug)]
pub struct SturmianWord {
    prefix: RwLock<Vec<u8>>,
}

impl Default for SturmianWord {
    fn default() -> Self {
        Self::new()
    }
}

impl SturmianWord {
    pub fn new() -> Self {
        SturmianWord {
            prefix: RwLock::new(vec![1]),
        }
    }

    /// Runs `f` on the first `len` letters, growing the buffer first if needed.
    pub fn with_prefix<R>(&self, len: usize, f: impl FnOnce(&[u8]) -> R) -> R {
        {
            let buf = self.prefix.read().unwrap_or_else(PoisonError::into_inner);
            if buf.len() >= len {
                return f(&buf[..len]);
            }
        }
        let mut buf = self.prefix.write().unwrap_or_else(PoisonError::into_inner);
        while buf.len() < len {
            *buf = substitute(&buf);
        }
        f(&buf[..len])
    }

    pub fn prefix(&self, len: usize) -> Vec<u8> {
        self.with_prefix(len, <[u8]>::to_vec)
    }

    /// Length of the currently materialized prefix.
    pub fn generated_len(&self) -> usize {
        self.prefix
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .len()
    }
}

static WORD: LazyLock<SturmianWord> = LazyLock::new(SturmianWord::new);

/// The process-wide word shared by the oracle and the CLI.
pub fn word() -> &'static SturmianWord {
    &WORD
}

/// `(s_0, ..., s_{len-1})` by iterated substitution.
pub fn s_prefix(len: usize) -> Vec<u8> {
    word().prefix(len)
}
