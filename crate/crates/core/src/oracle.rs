//! Exact determinants of `M_{m,n} = (s_{m+i+j})`, built from the word
//! generated by substitution.
//!
//! Nothing here touches the numeration system or the partition, so agreement
//! with [`crate::closed_form`] is an independent check.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sequence::word;
use crate::value::HankelValue;

/// Longest word prefix the oracle will materialize.
pub const MAX_PREFIX: u64 = 1 << 28;

/// An `n × n` Hankel matrix over `{0, 1}`, stored by its `2n - 1` anti-diagonals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HankelMatrix {
    offset: u64,
    diagonals: Vec<u8>,
}

impl HankelMatrix {
    /// `entry(i, j) = diagonals[i + j]`; the length must be odd.
    pub fn from_diagonals(offset: u64, diagonals: Vec<u8>) -> Self {
        assert!(
            diagonals.len() % 2 == 1,
            "a square Hankel matrix has an odd number of anti-diagonals"
        );
        assert!(diagonals.iter().all(|&b| b <= 1), "entries must be 0 or 1");
        HankelMatrix { offset, diagonals }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn order(&self) -> usize {
        self.diagonals.len().div_ceil(2)
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        let n = self.order();
        assert!(i < n && j < n);
        self.diagonals[i + j]
    }

    pub fn diagonals(&self) -> &[u8] {
        &self.diagonals
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let n = self.order();
        (0..n).map(|i| self.diagonals[i..i + n].to_vec()).collect()
    }
}

impl fmt::Display for HankelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn prefix_window(m: u64, len: u64) -> Result<Vec<u8>> {
    let end = m.checked_add(len).filter(|&e| e <= MAX_PREFIX);
    let end = end.ok_or(Error::PrefixTooLong {
        len: m.saturating_add(len),
    })?;
    Ok(word().with_prefix(end as usize, |s| s[m as usize..].to_vec()))
}

/// `M_{m,n}`, from the prefix `s_0 .. s_{m+2n-2}`.
pub fn matrix(m: u64, n: u64) -> Result<HankelMatrix> {
    if n == 0 {
        return Err(Error::InvalidOrder { n });
    }
    let len = n
        .checked_mul(2)
        .map(|l| l - 1)
        .ok_or(Error::PrefixTooLong { len: u64::MAX })?;
    Ok(HankelMatrix::from_diagonals(m, prefix_window(m, len)?))
}

/// Determinant by fraction-free (Bareiss) elimination over big integers.
pub fn det_bareiss(mat: &HankelMatrix) -> HankelValue {
    let mut a: Vec<Vec<BigInt>> = mat
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    HankelValue(bareiss(&mut a))
}

/// Bareiss elimination in place on a square matrix.
pub fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Number of primes in [`prime_pool`].
pub const PRIME_POOL_SIZE: usize = 256;

/// The `PRIME_POOL_SIZE` largest primes below `2^31`, descending
/// (`2147483647, 2147483629, ..., 2147478331`).
pub fn prime_pool() -> &'static [u64] {
    static POOL: LazyLock<Vec<u64>> = LazyLock::new(|| {
        let is_prime = |p: u64| {
            (3..)
                .step_by(2)
                .take_while(|d| d * d <= p)
                .all(|d| p % d != 0)
        };
        ((1u64 << 30)..(1u64 << 31))
            .rev()
            .filter(|p| p % 2 == 1 && is_prime(*p))
            .take(PRIME_POOL_SIZE)
            .collect()
    });
    &POOL
}

/// Leading pool primes whose product `P` satisfies `P > 2 n^{n/2}`, i.e.
/// `P^2 > 4 n^n`, so every `n × n` 0/1 determinant is recovered from its
/// residues by symmetric lifting.
pub fn primes_for_order(n: usize) -> Result<&'static [u64]> {
    let pool = prime_pool();
    let bound = BigUint::from(4u32) * BigUint::from(n.max(1)).pow(n as u32);
    let mut product = BigUint::one();
    for (c, &p) in pool.iter().enumerate() {
        product *= p;
        if &product * &product > bound {
            return Ok(&pool[..=c]);
        }
    }
    Err(Error::InsufficientPrimes {
        order: n,
        max_order: max_crt_order(),
    })
}

/// Largest order the prime pool certifies.
pub fn max_crt_order() -> usize {
    static MAX: LazyLock<usize> = LazyLock::new(|| {
        let product: BigUint = prime_pool().iter().map(|&p| BigUint::from(p)).product();
        let square = &product * &product;
        let fits = |n: usize| BigUint::from(4u32) * BigUint::from(n).pow(n as u32) < square;
        // fits is monotone in n.
        let (mut lo, mut hi) = (1usize, 1usize);
        while fits(hi) {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    });
    *MAX
}

/// Arithmetic modulo a prime below `2^31`, reducing 63-bit values with a
/// precomputed reciprocal.
#[derive(Debug, Clone, Copy)]
struct Modulus {
    p: u64,
    inv: u64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        debug_assert!(p < 1 << 31);
        Modulus {
            p,
            inv: u64::MAX / p,
        }
    }

    #[inline]
    fn reduce(self, x: u64) -> u64 {
        let q = ((u128::from(x) * u128::from(self.inv)) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    /// `a - c·b`
    #[inline]
    fn sub_mul(self, a: u64, c: u64, b: u64) -> u64 {
        self.reduce(a + (self.p - c) * b)
    }

    fn pow(self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn inverse(self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

/// `det mod p` by Gaussian elimination with row swaps.
fn det_mod(mat: &HankelMatrix, md: Modulus) -> u64 {
    let n = mat.order();
    let mut a: Vec<Vec<u64>> = mat
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(u64::from).collect())
        .collect();
    let mut det = 1;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if piv != k {
            a.swap(k, piv);
            det = md.p - det;
        }
        det = md.mul(det, a[k][k]);
        let inv = md.inverse(a[k][k]);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest {
            let c = md.mul(row[k], inv);
            if c == 0 {
                continue;
            }
            for j in k..n {
                row[j] = md.sub_mul(row[j], c, pivot_row[j]);
            }
        }
    }
    det
}

/// Incremental Chinese remaindering with a symmetric final lift.
struct Crt {
    value: BigInt,
    modulus: BigInt,
}

impl Crt {
    fn new() -> Self {
        Crt {
            value: BigInt::zero(),
            modulus: BigInt::one(),
        }
    }

    fn push(&mut self, residue: u64, p: u64) {
        let md = Modulus::new(p);
        let pb = BigInt::from(p);
        let residue_of = |v: &BigInt| v.mod_floor(&pb).to_u64().expect("reduced below p");
        let current = residue_of(&self.value);
        let m_mod = residue_of(&self.modulus);
        let diff = (residue + p - current) % p;
        let t = md.mul(diff, md.inverse(m_mod));
        self.value += &self.modulus * t;
        self.modulus *= p;
    }

    fn lift(self) -> BigInt {
        let half: BigInt = &self.modulus >> 1;
        if self.value > half {
            self.value - self.modulus
        } else {
            self.value
        }
    }
}

/// Determinant from residues modulo enough pool primes to exceed twice the
/// Hadamard bound `n^{n/2}`.
pub fn det_crt(mat: &HankelMatrix) -> Result<HankelValue> {
    let primes = primes_for_order(mat.order())?;
    let mut crt = Crt::new();
    for &p in primes {
        crt.push(det_mod(mat, Modulus::new(p)), p);
    }
    Ok(HankelValue(crt.lift()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    Bareiss,
    #[default]
    Crt,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bareiss" => Ok(Method::Bareiss),
            "crt" => Ok(Method::Crt),
            _ => Err(format!(
                "unknown determinant method `{s}` (expected bareiss or crt)"
            )),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bareiss => "bareiss",
            Method::Crt => "crt",
        })
    }
}

/// `H_{m,n} = det M_{m,n}` by the chosen method.
pub fn eval_oracle(m: u64, n: u64, method: Method) -> Result<HankelValue> {
    let mat = matrix(m, n)?;
    match method {
        Method::Bareiss => Ok(det_bareiss(&mat)),
        Method::Crt => det_crt(&mat),
    }
}

/// All leading principal minors of `mat` modulo `p`, orders `1..=n`.
///
/// Order `t + 1` extends order `t` by one row and one column. Only
/// "add a multiple of one row to another" operations inside the current
/// leading block are used, so each leading minor is preserved. The block is
/// kept in reduced form: every pivot column is zero outside its pivot row,
/// and every pivotless row is zero on the block. The minor is then the
/// signed product of the pivots, or zero while a row is pivotless.
fn leading_minors_mod(mat: &HankelMatrix, md: Modulus) -> Vec<u64> {
    let n = mat.order();
    let mut a: Vec<Vec<u64>> = mat
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(u64::from).collect())
        .collect();
    let mut pivot_col: Vec<Option<usize>> = vec![None; n];
    let mut col_taken = vec![false; n];
    let mut minors = Vec::with_capacity(n);

    // row[dst] -= (row[dst][col] / row[src][col]) * row[src]
    let eliminate = |a: &mut Vec<Vec<u64>>, src: usize, dst: usize, col: usize| {
        let c = md.mul(a[dst][col], md.inverse(a[src][col]));
        if c == 0 {
            return;
        }
        let (s, d) = if src < dst {
            let (lo, hi) = a.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = a.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        for j in 0..n {
            d[j] = md.sub_mul(d[j], c, s[j]);
        }
    };

    #[allow(clippy::needless_range_loop)]
    for t in 0..n {
        // New row: clear it on the existing pivot columns.
        for r in 0..t {
            if let Some(c) = pivot_col[r] {
                if a[t][c] != 0 {
                    eliminate(&mut a, r, t, c);
                }
            }
        }
        // New column: a pivotless old row may pivot on it.
        if let Some(r) = (0..t).find(|&r| pivot_col[r].is_none() && a[r][t] != 0) {
            pivot_col[r] = Some(t);
            col_taken[t] = true;
            for o in 0..=t {
                if o != r && a[o][t] != 0 {
                    eliminate(&mut a, r, o, t);
                }
            }
        }
        // The new row may pivot on any free column of the block.
        if let Some(c) = (0..=t).find(|&c| !col_taken[c] && a[t][c] != 0) {
            pivot_col[t] = Some(c);
            col_taken[c] = true;
            for o in 0..t {
                if a[o][c] != 0 {
                    eliminate(&mut a, t, o, c);
                }
            }
        }

        let cols: Option<Vec<usize>> = pivot_col[..=t].iter().copied().collect();
        let minor = match cols {
            None => 0,
            Some(cols) => {
                let mut det = 1;
                for (r, &c) in cols.iter().enumerate() {
                    det = md.mul(det, a[r][c]);
                }
                if permutation_is_odd(&cols) {
                    (md.p - det) % md.p
                } else {
                    det
                }
            }
        };
        minors.push(minor);
    }
    minors
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        odd ^= len % 2 == 0;
    }
    odd
}

/// `H_{m,1}, ..., H_{m,n_max}` from one incremental elimination of
/// `M_{m,n_max}` per prime.
///
/// The Hadamard bound grows with the order, so the primes certifying order
/// `n_max` certify every smaller order as well.
pub fn oracle_column(m: u64, n_max: u64) -> Result<Vec<HankelValue>> {
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let mat = matrix(m, n_max)?;
    let primes = primes_for_order(mat.order())?;
    let residues: Vec<Vec<u64>> = primes
        .iter()
        .map(|&p| leading_minors_mod(&mat, Modulus::new(p)))
        .collect();
    Ok((0..mat.order())
        .map(|t| {
            let mut crt = Crt::new();
            for (res, &p) in residues.iter().zip(primes) {
                crt.push(res[t], p);
            }
            HankelValue(crt.lift())
        })
        .collect())
}

/// `|det| <= n^{n/2}` for a 0/1 matrix of order `n`; exposed for tests.
pub fn hadamard_exceeds(value: &HankelValue, n: usize) -> bool {
    let mag = value.as_bigint().abs().to_biguint().unwrap_or_default();
    &mag * &mag > BigUint::from(n).pow(n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(diagonals: &[u8]) -> HankelMatrix {
        HankelMatrix::from_diagonals(0, diagonals.to_vec())
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(matrix(0, 2).unwrap().rows(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(
            matrix(2, 3).unwrap().rows(),
            vec![vec![1, 1, 1], vec![1, 1, 0], vec![1, 0, 1]]
        );
        assert_eq!(matrix(0, 1).unwrap().rows(), vec![vec![1]]);
        assert_eq!(matrix(0, 0), Err(Error::InvalidOrder { n: 0 }));
        assert!(matches!(
            matrix(MAX_PREFIX, 1),
            Err(Error::PrefixTooLong { .. })
        ));
    }

    #[test]
    fn anti_diagonal_structure() {
        let mat = matrix(17, 12).unwrap();
        let s = word().prefix(17 + 23);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(mat.entry(i, j), s[17 + i + j]);
                if i > 0 && j + 1 < 12 {
                    assert_eq!(mat.entry(i, j), mat.entry(i - 1, j + 1));
                }
            }
        }
    }

    #[test]
    fn bareiss_examples() {
        assert_eq!(det_bareiss(&m(&[1, 0, 1])), 1);
        assert_eq!(det_bareiss(&m(&[1, 1, 1])), 0);
        assert_eq!(det_bareiss(&matrix(2, 3).unwrap()), -1);
        assert_eq!(det_bareiss(&m(&[0, 1, 0])), -1);
    }

    #[test]
    fn bareiss_generic_matrix() {
        let mut a: Vec<Vec<BigInt>> = [[2, -3, 1], [2, 0, -1], [1, 4, 5]]
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        assert_eq!(bareiss(&mut a), BigInt::from(49));
    }

    #[test]
    fn crt_examples() {
        assert_eq!(det_crt(&matrix(2, 3).unwrap()).unwrap(), -1);
        assert_eq!(det_crt(&matrix(9, 4).unwrap()).unwrap(), 3);
        assert_eq!(det_crt(&matrix(13, 4).unwrap()).unwrap(), 0);
    }

    #[test]
    fn oracle_examples() {
        for method in [Method::Bareiss, Method::Crt] {
            assert_eq!(eval_oracle(0, 1, method).unwrap(), 1);
            assert_eq!(eval_oracle(3, 9, method).unwrap(), 2);
            assert_eq!(eval_oracle(13, 3, method).unwrap(), -2);
        }
    }

    #[test]
    fn prime_pool_is_fixed() {
        let pool = prime_pool();
        assert_eq!(pool.len(), PRIME_POOL_SIZE);
        assert_eq!(pool[0], 2_147_483_647);
        assert_eq!(pool[1], 2_147_483_629);
        assert_eq!(pool[PRIME_POOL_SIZE - 1], 2_147_478_331);
        assert!(pool.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn prime_selection_is_sound() {
        for n in [1usize, 2, 3, 10, 40, 100, 350] {
            let primes = primes_for_order(n).unwrap();
            let product: BigUint = primes.iter().map(|&p| BigUint::from(p)).product();
            let bound = BigUint::from(4u32) * BigUint::from(n).pow(n as u32);
            assert!(&product * &product > bound, "n = {n}");
            let shorter: BigUint = primes[..primes.len() - 1]
                .iter()
                .map(|&p| BigUint::from(p))
                .product();
            assert!(
                &shorter * &shorter <= bound || primes.len() == 1,
                "n = {n} not minimal"
            );
        }
        let max = max_crt_order();
        assert!(primes_for_order(max).is_ok());
        assert_eq!(
            primes_for_order(max + 1),
            Err(Error::InsufficientPrimes {
                order: max + 1,
                max_order: max
            })
        );
    }

    #[test]
    fn crt_recovers_signed_values() {
        // A dense 0/1 Hankel matrix with a large determinant.
        let diag: Vec<u8> = (0..39).map(|i| ((i * 7 + i / 3) % 5 < 2) as u8).collect();
        let mat = m(&diag);
        assert_eq!(det_crt(&mat).unwrap(), det_bareiss(&mat));
        let neg = m(&[0, 1, 0]);
        assert_eq!(det_crt(&neg).unwrap(), -1);
    }

    #[test]
    fn modulus_reduction() {
        for &p in &prime_pool()[..4] {
            let md = Modulus::new(p);
            for x in [0u64, 1, p - 1, p, p + 1, (p - 1) * (p - 1), u64::MAX >> 1] {
                assert_eq!(md.reduce(x), x % p);
            }
            assert_eq!(md.mul(md.inverse(12345), 12345), 1);
        }
    }

    #[test]
    fn leading_minors_match_single_determinants() {
        for m0 in [0u64, 1, 5, 13, 40, 97] {
            let column = oracle_column(m0, 30).unwrap();
            for (i, v) in column.iter().enumerate() {
                let n = i as u64 + 1;
                assert_eq!(*v, det_bareiss(&matrix(m0, n).unwrap()), "({m0}, {n})");
            }
        }
    }

    #[test]
    fn leading_minors_on_arbitrary_hankel() {
        let diag: Vec<u8> = (0..41).map(|i| ((i * i + 3 * i) % 7 < 3) as u8).collect();
        let mat = m(&diag);
        let md = Modulus::new(prime_pool()[0]);
        let minors = leading_minors_mod(&mat, md);
        for n in 1..=21usize {
            let sub = m(&diag[..2 * n - 1]);
            assert_eq!(minors[n - 1], det_mod(&sub, md), "order {n}");
        }
    }

    #[test]
    fn permutation_parity() {
        assert!(!permutation_is_odd(&[0, 1, 2]));
        assert!(permutation_is_odd(&[1, 0, 2]));
        assert!(!permutation_is_odd(&[1, 2, 0]));
    }

    #[test]
    fn values_respect_hadamard() {
        for n in 1..25u64 {
            let v = eval_oracle(7, n, Method::Crt).unwrap();
            assert!(!hadamard_exceeds(&v, n as usize));
        }
    }
}
