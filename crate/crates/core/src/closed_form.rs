//! Constant-time evaluation of `H_{m,n}` from the cell's parallelogram.
//!
//! Every sign is `(-1)^e` with `e` reduced mod 2 before use; the parities of
//! `f_j/2` and `(f_j - 1)/2` come from [`f_mod4`], so no exponent is ever
//! materialized.

use crate::error::{Error, Result};
use crate::partition::{classify, CellFlags, Parallelogram, Region, RegionKind};
use crate::sequence::{f, f_mod4, phi};
use crate::value::HankelValue;

/// Parity of `f_j / 2` (for odd `j`, where `f_j` is even).
fn half_parity(j: usize) -> u64 {
    debug_assert!(f_mod4(j) % 2 == 0);
    u64::from(f_mod4(j) / 2)
}

/// Parity of `(f_j - 1) / 2` (for even `j`, where `f_j` is odd).
fn half_odd_parity(j: usize) -> u64 {
    debug_assert!(f_mod4(j) % 2 == 1);
    u64::from(f_mod4(j) / 2)
}

/// Parity of `e(e - 1) / 2`.
fn tri(e: u64) -> u64 {
    (e >> 1) & 1
}

/// Parity of `e(e + 1) / 2`.
fn tri_succ(e: u64) -> u64 {
    ((e + 1) >> 1) & 1
}

fn signed(parity: u64, magnitude: u64) -> HankelValue {
    let v = num_bigint::BigInt::from(magnitude);
    HankelValue(if parity & 1 == 1 { -v } else { v })
}

fn require(p: &Parallelogram, kind: RegionKind, m: u64, n: u64) -> Result<(usize, u64)> {
    if p.kind() != kind || p.generation() < 0 || !p.contains(m, n) {
        return Err(Error::NotInRegion {
            m,
            n,
            region: p.to_string(),
        });
    }
    Ok((p.generation() as usize, m + n))
}

fn on_side_edge(p: &Parallelogram, d: u64) -> bool {
    let (lo, hi) = p.diagonals();
    d == lo + 1 || d == hi
}

/// `(-1)^{k+1+(f_{2k+2}-1)/2} f_{2k+1}/2`: the bottom row shared by `U_{k,i}` and `V_{k,i}`.
fn uv_bottom(k: usize) -> Result<HankelValue> {
    let parity = k as u64 + 1 + half_odd_parity(2 * k + 2);
    Ok(signed(parity, f(2 * k + 1)? / 2))
}

/// `H_{m,n}` for a cell of `U_{k,i}`, `k >= 0`.
pub fn eval_u(m: u64, n: u64, p: &Parallelogram) -> Result<HankelValue> {
    let (k, d) = require(p, RegionKind::U, m, n)?;
    let ku = k as u64;
    let half = f(2 * k + 1)? / 2;
    if n == p.top_row() {
        let parity = ku + 1 + half_parity(2 * k + 5) + phi(k as u32 + 1, d);
        return Ok(signed(parity, half));
    }
    if n == p.bottom_row() {
        return uv_bottom(k);
    }
    if on_side_edge(p, d) {
        let e = p.top_row() - n;
        return Ok(signed(1 + (e + 1) * ku + tri(e), half));
    }
    Ok(HankelValue::zero())
}

/// `H_{m,n}` for a cell of `V_{k,i}`, `k >= 0`.
pub fn eval_v(m: u64, n: u64, p: &Parallelogram) -> Result<HankelValue> {
    let (k, d) = require(p, RegionKind::V, m, n)?;
    let half = f(2 * k + 1)? / 2;
    // (f_{2k+2} + f_{2k+1} - 3) / 2 mod 2
    let top = u64::from((f_mod4(2 * k + 2) + f_mod4(2 * k + 1) + 1) % 4 / 2);
    if n == p.top_row() {
        return Ok(signed(top, half));
    }
    if n == p.bottom_row() {
        return uv_bottom(k);
    }
    if on_side_edge(p, d) {
        // Both side edges descend from the top-row corners with the
        // factor (-1)^{rk + r(r+1)/2}, r the distance below the top row.
        let r = p.top_row() - n;
        return Ok(signed(top + r * k as u64 + tri_succ(r), half));
    }
    Ok(HankelValue::zero())
}

/// `H_{m,n}` for a cell of `T_{k,i}`, `k >= 0`.
pub fn eval_t(m: u64, n: u64, p: &Parallelogram) -> Result<HankelValue> {
    let (k, d) = require(p, RegionKind::T, m, n)?;
    let ku = k as u64;
    let mag = f(2 * k)?;
    let base = half_odd_parity(2 * k);
    if n == p.top_row() {
        return Ok(signed(base, mag));
    }
    if n == p.bottom_row() {
        let parity = phi(k as u32, d) + half_parity(2 * k + 1) + 1;
        return Ok(signed(parity, mag));
    }
    if on_side_edge(p, d) {
        let e = p.top_row() - n;
        return Ok(signed(e * ku + tri(e) + base, mag));
    }
    Ok(HankelValue::zero())
}

/// `H_{m,n}` via the cell's parallelogram.
///
/// The origin `(0, 1)` is `s_0 = 1`; the degenerate `k = -1` bottom-row cells are 0.
pub fn eval_closed(m: u64, n: u64) -> Result<HankelValue> {
    let class = classify(m, n)?;
    match class.region {
        Region::SpecialOrigin => Ok(HankelValue::from(1)),
        Region::Parallelogram(p) if p.generation() < 0 => Ok(HankelValue::zero()),
        Region::Parallelogram(p) => match p.kind() {
            RegionKind::U => eval_u(m, n, &p),
            RegionKind::V => eval_v(m, n, &p),
            RegionKind::T => eval_t(m, n, &p),
        },
    }
}

/// Interior cells vanish; only the boundary of a parallelogram can be nonzero.
pub fn is_structural_zero(flags: CellFlags) -> bool {
    flags == CellFlags::INTERIOR
}
