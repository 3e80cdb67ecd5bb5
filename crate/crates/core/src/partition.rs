//! Anchor sets and the tiling of `N × N_{>=1}` by the parallelogram families
//! `U_{k,i}`, `V_{k,i}`, `T_{k,i}`.
//!
//! For a generation `k` the anchor sets are defined through the truncated
//! representation `Φ_k`:
//!
//! | set     | members                                   |
//! |---------|-------------------------------------------|
//! | `E'_k`  | `Φ_k(x) = f_{2k+3}/2`                      |
//! | `E''_k` | `Φ_k(x) = f_{2k+3}/2 + f_{2k}`             |
//! | `E_k`   | `E'_k ∪ E''_k`                             |
//! | `F_k`   | `Φ_k(y) = f_{2k+1}/2`                      |
//! | `F'_k`  | `Φ_{k+1}(y) = f_{2k+1}/2`                  |
//! | `F''_k` | `F_k \ F'_k`                               |
//!
//! Members are produced by walking the known gap laws and memoized per
//! `(kind, k)`; the Φ predicate ([`is_member`]) is kept as the independent
//! definition the walk is tested against.
//!
//! With `α_i ∈ E'_{k+1}`, `β_i = β'_i + f_{2k}` for `β'_i ∈ F''_k`, and
//! `γ_i ∈ E'_k`:
//!
//! ```text
//! U_{k,i}: f_{2k}   <= n < f_{2k+3},  α_i - f_{2k+2} < m + n <= α_i
//! V_{k,i}: f_{2k}   <= n < f_{2k+2},  β_i < m + n <= β_i + f_{2k+1}
//! T_{k,i}: f_{2k+1} <= n < f_{2k+2},  γ_i - f_{2k} < m + n <= γ_i
//! ```
//!
//! Generation `k = -1` of `U` uses `f_{-2} = 1, f_{-1} = 0` and degenerates
//! to the single cells `(γ_i - 1, 1)`; together with the origin cell `(0, 1)`
//! it closes the bottom row, which no `k >= 0` family reaches.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock, PoisonError, RwLock};

use bitflags::bitflags;

use crate::error::{Error, Result};
use crate::sequence::{encode, f, f_ext, f_table, phi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnchorKind {
    E,
    EPrime,
    EDoublePrime,
    F,
    FPrime,
    FDoublePrime,
}

impl AnchorKind {
    pub const ALL: [AnchorKind; 6] = [
        AnchorKind::E,
        AnchorKind::EPrime,
        AnchorKind::EDoublePrime,
        AnchorKind::F,
        AnchorKind::FPrime,
        AnchorKind::FDoublePrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnchorKind::E => "E",
            AnchorKind::EPrime => "Eprime",
            AnchorKind::EDoublePrime => "Edoubleprime",
            AnchorKind::F => "F",
            AnchorKind::FPrime => "Fprime",
            AnchorKind::FDoublePrime => "Fdoubleprime",
        }
    }
}

impl fmt::Display for AnchorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnchorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "e" => AnchorKind::E,
            "eprime" | "e'" => AnchorKind::EPrime,
            "edoubleprime" | "e''" => AnchorKind::EDoublePrime,
            "f" => AnchorKind::F,
            "fprime" | "f'" => AnchorKind::FPrime,
            "fdoubleprime" | "f''" => AnchorKind::FDoublePrime,
            _ => {
                return Err(format!(
                    "unknown anchor family `{s}` (expected one of E, Eprime, Edoubleprime, F, Fprime, Fdoubleprime)"
                ))
            }
        };
        Ok(kind)
    }
}

/// The Φ values that define the anchor sets of generation `k`.
#[derive(Debug, Clone, Copy)]
struct Targets {
    /// `f_{2k+3}/2`
    e_prime: u64,
    /// `f_{2k+3}/2 + f_{2k}`
    e_double_prime: u64,
    /// `f_{2k+1}/2`
    f: u64,
}

fn targets(k: u32) -> Result<Targets> {
    let k = k as usize;
    let e_prime = f(2 * k + 3)? / 2;
    Ok(Targets {
        e_prime,
        e_double_prime: e_prime + f(2 * k)?,
        f: f(2 * k + 1)? / 2,
    })
}

/// Membership by the defining Φ predicate.
pub fn is_member(kind: AnchorKind, k: u32, x: u64) -> Result<bool> {
    let t = targets(k)?;
    let p = phi(k, x);
    Ok(match kind {
        AnchorKind::E => p == t.e_prime || p == t.e_double_prime,
        AnchorKind::EPrime => p == t.e_prime,
        AnchorKind::EDoublePrime => p == t.e_double_prime,
        AnchorKind::F => p == t.f,
        AnchorKind::FPrime => phi(k + 1, x) == t.f,
        AnchorKind::FDoublePrime => p == t.f && phi(k + 1, x) != t.f,
    })
}

/// `a_{2k+3}(x) = a_{2k+4}(x) = 0`.
fn high_pair_clear(k: u32, x: u64) -> bool {
    let rep = encode(x);
    let i = 2 * k as usize + 3;
    rep.digit(i) == 0 && rep.digit(i + 1) == 0
}

fn add(x: u64, gap: u64) -> Result<u64> {
    x.checked_add(gap).ok_or(Error::Overflow {
        what: "anchor family member",
    })
}

/// Next member of `E_k` after `x ∈ E_k`: gaps are `f_{2k}` or `f_{2k+2}`.
fn next_in_e(k: u32, t: &Targets, x: u64) -> Result<u64> {
    let k2 = 2 * k as usize;
    if phi(k, x) == t.e_double_prime || !high_pair_clear(k, x) {
        add(x, f(k2 + 2)?)
    } else {
        add(x, f(k2)?)
    }
}

/// Next member of `F_k` after `y ∈ F_k`: `+f_{2k+3}` from `F'_k`, `+f_{2k+2}` from `F''_k`.
fn next_in_f(k: u32, y: u64) -> Result<u64> {
    let k2 = 2 * k as usize;
    if high_pair_clear(k, y) {
        add(y, f(k2 + 3)?)
    } else {
        add(y, f(k2 + 2)?)
    }
}

fn first_member(kind: AnchorKind, k: u32) -> Result<u64> {
    let t = targets(k)?;
    Ok(match kind {
        AnchorKind::E | AnchorKind::EPrime => t.e_prime,
        AnchorKind::EDoublePrime => t.e_double_prime,
        AnchorKind::F | AnchorKind::FPrime => t.f,
        AnchorKind::FDoublePrime => next_in_f(k, t.f)?,
    })
}

fn successor(kind: AnchorKind, k: u32, x: u64) -> Result<u64> {
    let t = targets(k)?;
    match kind {
        AnchorKind::E => next_in_e(k, &t, x),
        AnchorKind::EPrime => {
            // Gaps f_{2k+2} or f_{2k+3} = f_{2k} + f_{2k+2}.
            let k2 = 2 * k as usize;
            if high_pair_clear(k, x) {
                add(x, f(k2 + 3)?)
            } else {
                add(x, f(k2 + 2)?)
            }
        }
        AnchorKind::EDoublePrime => {
            let mut y = next_in_e(k, &t, x)?;
            while phi(k, y) != t.e_double_prime {
                y = next_in_e(k, &t, y)?;
            }
            Ok(y)
        }
        AnchorKind::F => next_in_f(k, x),
        AnchorKind::FPrime => {
            let mut y = next_in_f(k, x)?;
            while phi(k + 1, y) != t.f {
                y = next_in_f(k, y)?;
            }
            Ok(y)
        }
        AnchorKind::FDoublePrime => {
            let mut y = next_in_f(k, x)?;
            while phi(k + 1, y) == t.f {
                y = next_in_f(k, y)?;
            }
            Ok(y)
        }
    }
}

/// Sorted, lazily extended enumeration of one anchor set.
#[derive(Debug)]
pub struct AnchorFamily {
    kind: AnchorKind,
    k: u32,
    members: RwLock<Vec<u64>>,
}

impl AnchorFamily {
    pub fn new(kind: AnchorKind, k: u32) -> Result<Self> {
        let first = first_member(kind, k)?;
        Ok(AnchorFamily {
            kind,
            k,
            members: RwLock::new(vec![first]),
        })
    }

    pub fn kind(&self) -> AnchorKind {
        self.kind
    }

    pub fn generation(&self) -> u32 {
        self.k
    }

    /// Grows the member list until `done` holds, then runs `read` on it.
    fn extended<R>(
        &self,
        done: impl Fn(&[u64]) -> bool,
        read: impl FnOnce(&[u64]) -> R,
    ) -> Result<R> {
        {
            let members = self.members.read().unwrap_or_else(PoisonError::into_inner);
            if done(&members) {
                return Ok(read(&members));
            }
        }
        let mut members = self.members.write().unwrap_or_else(PoisonError::into_inner);
        while !done(&members) {
            let last = *members.last().expect("families start non-empty");
            let next = successor(self.kind, self.k, last)?;
            debug_assert!(next > last);
            debug_assert!(is_member(self.kind, self.k, next).unwrap_or(false));
            members.push(next);
        }
        Ok(read(&members))
    }

    /// The `i`-th smallest member, 1-based.
    pub fn member(&self, i: usize) -> Result<u64> {
        assert!(i >= 1, "family members are 1-indexed");
        self.extended(|m| m.len() >= i, |m| m[i - 1])
    }

    /// All members `<= bound`.
    pub fn upto(&self, bound: u64) -> Result<Vec<u64>> {
        self.extended(
            |m| *m.last().unwrap() > bound,
            |m| m[..m.partition_point(|&x| x <= bound)].to_vec(),
        )
    }
}

type Registry = HashMap<(AnchorKind, u32), Arc<AnchorFamily>>;

static FAMILIES: LazyLock<RwLock<Registry>> = LazyLock::new(Default::default);

/// Shared, memoized enumeration of `(kind, k)`.
pub fn family(kind: AnchorKind, k: u32) -> Result<Arc<AnchorFamily>> {
    if let Some(fam) = FAMILIES
        .read()
        .unwrap_or_else(PoisonError::into_inner)
        .get(&(kind, k))
    {
        return Ok(Arc::clone(fam));
    }
    let fresh = Arc::new(AnchorFamily::new(kind, k)?);
    let mut map = FAMILIES.write().unwrap_or_else(PoisonError::into_inner);
    Ok(Arc::clone(map.entry((kind, k)).or_insert(fresh)))
}

/// The `i`-th smallest member (1-based) of an anchor set.
pub fn family_member(kind: AnchorKind, k: u32, i: usize) -> Result<u64> {
    family(kind, k)?.member(i)
}

/// All members `<= bound` of an anchor set, ascending.
pub fn family_upto(kind: AnchorKind, k: u32, bound: u64) -> Result<Vec<u64>> {
    family(kind, k)?.upto(bound)
}

/// Valid representations whose digits below `base` are all zero, ranked in
/// numeric order (which is the lexicographic order of digit strings).
struct HighDigits {
    base: usize,
    /// `ways[p][a][b]`: valid fillings of positions `base..p` given
    /// `a_p = a`, `a_{p+1} = b`.
    ways: Vec<[[u128; 2]; 2]>,
}

impl HighDigits {
    #[allow(clippy::needless_range_loop)]
    fn new(base: usize) -> Self {
        let top = f_table().len();
        let mut ways = vec![[[0u128; 2]; 2]; top + 1];
        for p in 0..=top {
            for a in 0..2 {
                for b in 0..2 {
                    ways[p][a][b] = if p <= base {
                        1
                    } else {
                        // Position q = p - 1 sits below a_p = a, a_{p+1} = b.
                        let q = p - 1;
                        let one = a == 0 && (q % 2 == 1 || b == 0);
                        ways[q][0][a] + if one { ways[q][1][a] } else { 0 }
                    };
                }
            }
        }
        HighDigits { base, ways }
    }

    fn shared(base: usize) -> &'static HighDigits {
        static TABLES: LazyLock<Vec<HighDigits>> =
            LazyLock::new(|| (0..=f_table().len()).map(HighDigits::new).collect());
        &TABLES[base.min(f_table().len())]
    }

    /// Number of such values `<= x`.
    fn count_le(&self, x: u64) -> u128 {
        let rep = encode(x);
        let mut above = 0usize;
        let mut total = 0;
        for p in (self.base..f_table().len()).rev() {
            let digit = usize::from(rep.digit(p));
            if digit == 1 {
                total += self.ways[p][0][above];
            }
            above = digit;
        }
        // x itself with its digits below `base` cleared.
        total + 1
    }

    /// The `r`-th smallest such value, `r >= 1`.
    fn select(&self, mut r: u128) -> Result<u64> {
        let top = f_table().len();
        let overflow = Error::Overflow {
            what: "anchor family member",
        };
        if r == 0 || r > self.ways[top][0][0] {
            return Err(overflow);
        }
        let (mut a, mut b) = (0usize, 0usize);
        let mut value = 0u64;
        for p in (self.base..top).rev() {
            let zero = self.ways[p][0][a];
            let digit = if r <= zero {
                0
            } else {
                r -= zero;
                debug_assert!(a == 0 && (p % 2 == 1 || b == 0));
                value = value.checked_add(f(p)?).ok_or(overflow.clone())?;
                1
            };
            (a, b) = (digit, a);
        }
        Ok(value)
    }
}

/// `{x : Φ_j(x) = t}`, i.e. `t` plus any representation that starts high
/// enough not to clash with the top digits of `t`.
struct PhiLevel {
    t: u64,
    high: &'static HighDigits,
}

impl PhiLevel {
    fn new(j: u32, t: u64) -> Self {
        let lowest = 2 * j as usize + 3;
        // A top digit of t at the even position 2j+2 also excludes 2j+3 and 2j+4.
        let base = if encode(t).digit(lowest - 1) == 1 {
            lowest + 2
        } else {
            lowest
        };
        PhiLevel {
            t,
            high: HighDigits::shared(base),
        }
    }

    /// Members `< x`.
    fn rank_below(&self, x: u64) -> u128 {
        if x <= self.t {
            0
        } else {
            self.high.count_le(x - self.t - 1)
        }
    }

    fn select(&self, i: u128) -> Result<u64> {
        self.high
            .select(i)?
            .checked_add(self.t)
            .ok_or(Error::Overflow {
                what: "anchor family member",
            })
    }

    /// Smallest member `>= x` and its 1-based rank.
    fn ceil(&self, x: u64) -> Result<(u128, u64)> {
        let i = self.rank_below(x) + 1;
        Ok((i, self.select(i)?))
    }
}

fn to_index(i: u128) -> Result<usize> {
    usize::try_from(i).map_err(|_| Error::Overflow {
        what: "anchor index",
    })
}

/// Smallest member `>= x` of an anchor set with its 1-based index, computed
/// directly from the digit structure (no enumeration of smaller members).
pub fn locate(kind: AnchorKind, k: u32, x: u64) -> Result<(usize, u64)> {
    let t = targets(k)?;
    let (i, member) = match kind {
        AnchorKind::EPrime => PhiLevel::new(k, t.e_prime).ceil(x)?,
        AnchorKind::EDoublePrime => PhiLevel::new(k, t.e_double_prime).ceil(x)?,
        AnchorKind::F => PhiLevel::new(k, t.f).ceil(x)?,
        AnchorKind::FPrime => PhiLevel::new(k + 1, t.f).ceil(x)?,
        AnchorKind::E => {
            let (a, b) = (
                PhiLevel::new(k, t.e_prime),
                PhiLevel::new(k, t.e_double_prime),
            );
            let rank = a.rank_below(x) + b.rank_below(x);
            (rank + 1, a.ceil(x)?.1.min(b.ceil(x)?.1))
        }
        AnchorKind::FDoublePrime => {
            let (all, prime) = (PhiLevel::new(k, t.f), PhiLevel::new(k + 1, t.f));
            let rank = all.rank_below(x) - prime.rank_below(x);
            let mut y = all.ceil(x)?.1;
            while phi(k + 1, y) == t.f {
                y = all.ceil(y + 1)?.1;
            }
            (rank + 1, y)
        }
    };
    Ok((to_index(i)?, member))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionKind {
    U,
    V,
    T,
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionKind::U => "U",
            RegionKind::V => "V",
            RegionKind::T => "T",
        })
    }
}

/// One parallelogram `U_{k,i}`, `V_{k,i}` or `T_{k,i}` with its resolved
/// geometry: rows `row_lo <= n < row_hi`, diagonals `diag_lo < m + n <= diag_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Parallelogram {
    kind: RegionKind,
    k: i32,
    index: usize,
    anchor: u64,
    row_lo: u64,
    row_hi: u64,
    diag_lo: u64,
    diag_hi: u64,
}

fn sub(a: u64, b: u64) -> Result<u64> {
    a.checked_sub(b).ok_or(Error::Overflow {
        what: "parallelogram diagonal",
    })
}

fn fk(j: i64) -> Result<u64> {
    f_ext(j)
}

impl Parallelogram {
    /// Anchor set and offset that locate the family `kind` at generation `k`.
    fn anchor_source(kind: RegionKind, k: i32) -> Result<(AnchorKind, u32, u64)> {
        match kind {
            RegionKind::U => Ok((AnchorKind::EPrime, (k + 1) as u32, 0)),
            RegionKind::V => Ok((AnchorKind::FDoublePrime, k as u32, fk(2 * k as i64)?)),
            RegionKind::T => Ok((AnchorKind::EPrime, k as u32, 0)),
        }
    }

    fn check_generation(kind: RegionKind, k: i32) {
        let min = if kind == RegionKind::U { -1 } else { 0 };
        assert!(k >= min, "{kind} parallelograms start at generation {min}");
    }

    /// Row range `[lo, hi)` of every member of the family.
    pub fn row_range(kind: RegionKind, k: i32) -> Result<(u64, u64)> {
        Self::check_generation(kind, k);
        let k2 = 2 * k as i64;
        Ok(match kind {
            RegionKind::U => (fk(k2)?, fk(k2 + 3)?),
            RegionKind::V => (fk(k2)?, fk(k2 + 2)?),
            RegionKind::T => (fk(k2 + 1)?, fk(k2 + 2)?),
        })
    }

    /// Builds the parallelogram whose defining anchor is `anchor`
    /// (`α_i`, `β_i = β'_i + f_{2k}`, or `γ_i`).
    pub fn from_anchor(kind: RegionKind, k: i32, index: usize, anchor: u64) -> Result<Self> {
        let (row_lo, row_hi) = Self::row_range(kind, k)?;
        let k2 = 2 * k as i64;
        let (diag_lo, diag_hi) = match kind {
            RegionKind::U => (sub(anchor, fk(k2 + 2)?)?, anchor),
            RegionKind::V => (
                anchor,
                anchor.checked_add(fk(k2 + 1)?).ok_or(Error::Overflow {
                    what: "parallelogram diagonal",
                })?,
            ),
            RegionKind::T => (sub(anchor, fk(k2)?)?, anchor),
        };
        Ok(Parallelogram {
            kind,
            k,
            index,
            anchor,
            row_lo,
            row_hi,
            diag_lo,
            diag_hi,
        })
    }

    /// The `index`-th (1-based) parallelogram of a family.
    pub fn nth(kind: RegionKind, k: i32, index: usize) -> Result<Self> {
        Self::check_generation(kind, k);
        let (source, gen, offset) = Self::anchor_source(kind, k)?;
        let anchor = family_member(source, gen, index)?
            .checked_add(offset)
            .ok_or(Error::Overflow { what: "anchor" })?;
        Self::from_anchor(kind, k, index, anchor)
    }

    /// The family member whose diagonal band could contain diagonal `d`:
    /// the one with the smallest `diag_hi >= d`.
    fn covering_candidate(kind: RegionKind, k: i32, d: u64) -> Result<Self> {
        let (source, gen, offset) = Self::anchor_source(kind, k)?;
        let reach = match kind {
            RegionKind::V => fk(2 * k as i64 + 1)? + offset,
            _ => offset,
        };
        let (index, member) = locate(source, gen, d.saturating_sub(reach))?;
        Self::from_anchor(kind, k, index, member + offset)
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    /// Generation; `-1` only for the degenerate bottom-row `U` cells.
    pub fn generation(&self) -> i32 {
        self.k
    }

    /// 1-based position within its family.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn anchor(&self) -> u64 {
        self.anchor
    }

    /// `[lo, hi)`
    pub fn rows(&self) -> (u64, u64) {
        (self.row_lo, self.row_hi)
    }

    /// `(lo, hi]` on `m + n`.
    pub fn diagonals(&self) -> (u64, u64) {
        (self.diag_lo, self.diag_hi)
    }

    pub fn top_row(&self) -> u64 {
        self.row_hi - 1
    }

    pub fn bottom_row(&self) -> u64 {
        self.row_lo
    }

    pub fn contains(&self, m: u64, n: u64) -> bool {
        let Some(d) = m.checked_add(n) else {
            return false;
        };
        (self.row_lo..self.row_hi).contains(&n) && self.diag_lo < d && d <= self.diag_hi
    }

    /// Position flags of a cell known to lie in this parallelogram.
    pub fn flags(&self, m: u64, n: u64) -> CellFlags {
        let d = m + n;
        let mut flags = CellFlags::empty();
        flags.set(CellFlags::TOP_ROW, n == self.top_row());
        flags.set(CellFlags::BOTTOM_ROW, n == self.bottom_row());
        flags.set(CellFlags::LEFT_EDGE, d == self.diag_lo + 1);
        flags.set(CellFlags::RIGHT_EDGE, d == self.diag_hi);
        if flags.is_empty() {
            CellFlags::INTERIOR
        } else {
            flags
        }
    }
}

impl fmt::Display for Parallelogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{{{},{}}}", self.kind, self.k, self.index)
    }
}

bitflags! {
    /// Where a cell sits inside its parallelogram. `INTERIOR` is exclusive.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub struct CellFlags: u8 {
        const INTERIOR = 1;
        const TOP_ROW = 1 << 1;
        const BOTTOM_ROW = 1 << 2;
        const LEFT_EDGE = 1 << 3;
        const RIGHT_EDGE = 1 << 4;
    }
}

impl fmt::Display for CellFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [(CellFlags, &str); 5] = [
            (CellFlags::INTERIOR, "Interior"),
            (CellFlags::TOP_ROW, "TopRow"),
            (CellFlags::BOTTOM_ROW, "BottomRow"),
            (CellFlags::LEFT_EDGE, "LeftEdge"),
            (CellFlags::RIGHT_EDGE, "RightEdge"),
        ];
        let names: Vec<&str> = NAMES
            .iter()
            .filter(|(flag, _)| self.contains(*flag))
            .map(|&(_, name)| name)
            .collect();
        f.write_str(&names.join("|"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Parallelogram(Parallelogram),
    /// The cell `(0, 1)`, which lies in no family.
    SpecialOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellClass {
    pub region: Region,
    pub flags: CellFlags,
}

impl CellClass {
    pub fn parallelogram(&self) -> Option<&Parallelogram> {
        match &self.region {
            Region::Parallelogram(p) => Some(p),
            Region::SpecialOrigin => None,
        }
    }

    /// `true` for the `k = -1` bottom-row cells.
    pub fn is_degenerate(&self) -> bool {
        self.parallelogram().is_some_and(|p| p.generation() < 0)
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.region {
            Region::SpecialOrigin => f.write_str("SpecialOrigin"),
            Region::Parallelogram(p) => write!(f, "{p} {}", self.flags),
        }
    }
}

/// Largest `k` with `f_{2k} <= n`; `n >= 1`.
pub fn generation_of_row(n: u64) -> u32 {
    debug_assert!(n >= 1);
    let j = f_table().partition_point(|&v| v <= n) - 1;
    (j / 2) as u32
}

/// Locates the parallelogram containing `(m, n)`.
///
/// With `k` the row generation (`f_{2k} <= n < f_{2k+2}`) only `U_{k-1}` or
/// `T_k` (depending on whether `n < f_{2k+1}`), `U_k` and `V_k` can reach
/// the row, and each is probed with a single ordered search on its anchors.
pub fn classify(m: u64, n: u64) -> Result<CellClass> {
    if n == 0 {
        return Err(Error::InvalidOrder { n });
    }
    let d = m.checked_add(n).ok_or(Error::Overflow { what: "m + n" })?;
    if d == 1 {
        return Ok(CellClass {
            region: Region::SpecialOrigin,
            flags: CellFlags::empty(),
        });
    }
    let k = generation_of_row(n) as i32;
    let odd = f(2 * k as usize + 1)?;
    let candidates = [
        if n < odd {
            (RegionKind::U, k - 1)
        } else {
            (RegionKind::T, k)
        },
        (RegionKind::U, k),
        (RegionKind::V, k),
    ];
    let mut hits = Vec::with_capacity(1);
    for (kind, gen) in candidates {
        let p = Parallelogram::covering_candidate(kind, gen, d)?;
        if p.contains(m, n) {
            hits.push(p);
        }
    }
    match hits.as_slice() {
        [p] => Ok(CellClass {
            region: Region::Parallelogram(*p),
            flags: p.flags(m, n),
        }),
        _ => Err(Error::Coverage {
            m,
            n,
            count: hits.len(),
        }),
    }
}

/// Rectangular window `0 <= m <= m_max`, `n_min <= n <= n_max` (with `n_min >= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub m_max: u64,
    pub n_min: u64,
    pub n_max: u64,
}

impl Window {
    /// `0 <= m <= m_max`, `1 <= n <= n_max`.
    pub fn new(m_max: u64, n_max: u64) -> Self {
        Window {
            m_max,
            n_min: 1,
            n_max,
        }
    }

    pub fn with_rows(m_max: u64, n_min: u64, n_max: u64) -> Self {
        Window {
            m_max,
            n_min: n_min.max(1),
            n_max,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.n_max < self.n_min
    }

    pub fn width(&self) -> u64 {
        self.m_max + 1
    }

    pub fn height(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            self.n_max - self.n_min + 1
        }
    }

    pub fn cell_count(&self) -> u64 {
        self.width() * self.height()
    }

    /// Cells in row-major order: `n` ascending, then `m` ascending.
    pub fn cells(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let rows = if self.is_empty() {
            1..1
        } else {
            self.n_min..self.n_max + 1
        };
        rows.flat_map(move |n| (0..=self.m_max).map(move |m| (m, n)))
    }
}

/// Every `k >= 0` parallelogram meeting the window, ordered by generation,
/// then kind (`U`, `V`, `T`), then index.
pub fn parallelograms_in_window(window: Window) -> Result<Vec<Parallelogram>> {
    let mut out = Vec::new();
    if window.is_empty() {
        return Ok(out);
    }
    for k in 0.. {
        if f(2 * k as usize)? > window.n_max {
            break;
        }
        for kind in [RegionKind::U, RegionKind::V, RegionKind::T] {
            let (lo, hi) = Parallelogram::row_range(kind, k)?;
            let rlo = lo.max(window.n_min);
            let rhi = (hi - 1).min(window.n_max);
            if rlo > rhi {
                continue;
            }
            // Reachable diagonals are rlo ..= rhi + m_max.
            let dmax = rhi.checked_add(window.m_max).ok_or(Error::Overflow {
                what: "window diagonal",
            })?;
            for index in 1.. {
                let p = Parallelogram::nth(kind, k, index)?;
                if p.diag_lo >= dmax {
                    break;
                }
                if p.diag_hi >= rlo {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// A window cell not covered exactly once by the `k >= 0` families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageAnomaly {
    pub m: u64,
    pub n: u64,
    pub count: u32,
}

impl CoverageAnomaly {
    /// Uncovered bottom-row cells absorbed by the `k = -1` extension or the
    /// origin cell.
    pub fn is_allowlisted(&self) -> Result<bool> {
        if self.n != 1 || self.count != 0 {
            return Ok(false);
        }
        Ok(self.m == 0 || is_member(AnchorKind::EPrime, 0, self.m + 1)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub window: Window,
    pub cells: u64,
    pub anomalies: Vec<CoverageAnomaly>,
}

impl CoverageReport {
    pub fn unexpected(&self) -> Result<Vec<CoverageAnomaly>> {
        let mut out = Vec::new();
        for a in &self.anomalies {
            if !a.is_allowlisted()? {
                out.push(*a);
            }
        }
        Ok(out)
    }
}

/// Counts, for every window cell, the `k >= 0` parallelograms covering it
/// (by painting each parallelogram's cells, independently of [`classify`])
/// and reports every cell whose count is not exactly one.
pub fn verify_partition(window: Window) -> Result<CoverageReport> {
    let cells = window.cell_count();
    if window.is_empty() {
        return Ok(CoverageReport {
            window,
            cells,
            anomalies: Vec::new(),
        });
    }
    let width = window.width() as usize;
    let mut counts = vec![0u32; cells as usize];
    for p in parallelograms_in_window(window)? {
        let (lo, hi) = p.rows();
        for n in lo.max(window.n_min)..hi.min(window.n_max + 1) {
            let first = (p.diag_lo + 1).max(n);
            let last = p.diag_hi.min(n + window.m_max);
            let row = (n - window.n_min) as usize * width;
            for d in first..=last {
                counts[row + (d - n) as usize] += 1;
            }
        }
    }
    let anomalies = window
        .cells()
        .zip(&counts)
        .filter(|(_, &c)| c != 1)
        .map(|((m, n), &count)| CoverageAnomaly { m, n, count })
        .collect();
    Ok(CoverageReport {
        window,
        cells,
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force scan of the Φ predicate.
    fn scan(kind: AnchorKind, k: u32, bound: u64) -> Vec<u64> {
        (0..=bound)
            .filter(|&x| is_member(kind, k, x).unwrap())
            .collect()
    }

    #[test]
    fn member_examples() {
        assert_eq!(family_member(AnchorKind::EPrime, 0, 1), Ok(2));
        assert_eq!(family_member(AnchorKind::F, 0, 2), Ok(5));
        assert_eq!(family_member(AnchorKind::FDoublePrime, 0, 1), Ok(5));
        assert_eq!(phi(1, 5), 5);
    }

    #[test]
    fn upto_examples() {
        assert_eq!(
            family_upto(AnchorKind::EPrime, 0, 20),
            Ok(vec![2, 6, 9, 12, 16, 19])
        );
        assert_eq!(
            family_upto(AnchorKind::EDoublePrime, 0, 15),
            Ok(vec![3, 13])
        );
        assert_eq!(family_upto(AnchorKind::F, 1, 20), Ok(vec![2, 12, 19]));
        assert_eq!(family_upto(AnchorKind::EPrime, 0, 1), Ok(vec![]));
    }

    #[test]
    fn first_values_of_e_and_f() {
        for k in 0..4u32 {
            let f = |j: u32| crate::sequence::f(j as usize).unwrap();
            let h = f(2 * k + 3) / 2;
            let e: Vec<u64> = (1..=8)
                .map(|i| family_member(AnchorKind::E, k, i).unwrap())
                .collect();
            assert_eq!(
                e,
                vec![
                    h,
                    h + f(2 * k),
                    h + f(2 * k + 3),
                    h + f(2 * k + 4),
                    h + f(2 * k + 5),
                    h + f(2 * k) + f(2 * k + 5),
                    h + f(2 * k + 3) + f(2 * k + 5),
                    h + f(2 * k + 6),
                ]
            );
            let g = f(2 * k + 1) / 2;
            let y: Vec<u64> = (1..=6)
                .map(|i| family_member(AnchorKind::F, k, i).unwrap())
                .collect();
            assert_eq!(
                y,
                vec![
                    g,
                    g + f(2 * k + 3),
                    g + f(2 * k + 4),
                    g + f(2 * k + 5),
                    g + f(2 * k + 5) + f(2 * k + 3),
                    g + f(2 * k + 6),
                ]
            );
        }
    }

    #[test]
    fn gap_walk_matches_predicate_scan() {
        const BOUND: u64 = 100_000;
        for k in 0..=4 {
            for kind in AnchorKind::ALL {
                assert_eq!(
                    family_upto(kind, k, BOUND).unwrap(),
                    scan(kind, k, BOUND),
                    "{kind} k = {k}"
                );
            }
        }
    }

    #[test]
    fn locate_finds_next_member() {
        assert_eq!(locate(AnchorKind::EPrime, 0, 0), Ok((1, 2)));
        assert_eq!(locate(AnchorKind::EPrime, 0, 7), Ok((3, 9)));
        assert_eq!(locate(AnchorKind::EPrime, 0, 9), Ok((3, 9)));
        assert_eq!(locate(AnchorKind::FDoublePrime, 1, 0), Ok((1, 12)));
    }

    #[test]
    fn locate_matches_gap_walk() {
        for k in 0..=4u32 {
            for kind in AnchorKind::ALL {
                let walked = family_upto(kind, k, 60_000).unwrap();
                let mut next = 0;
                for x in 0..=walked[walked.len() - 1] {
                    while walked[next] < x {
                        next += 1;
                    }
                    assert_eq!(
                        locate(kind, k, x),
                        Ok((next + 1, walked[next])),
                        "{kind} k = {k} x = {x}"
                    );
                }
            }
        }
    }

    #[test]
    fn locate_far_out_agrees_with_predicate() {
        for kind in AnchorKind::ALL {
            for k in [0u32, 3, 9] {
                for x in [10u64.pow(12), 10u64.pow(15) + 7, 3 * 10u64.pow(17)] {
                    let (i, y) = locate(kind, k, x).unwrap();
                    assert!(y >= x && is_member(kind, k, y).unwrap());
                    let (j, z) = locate(kind, k, y + 1).unwrap();
                    assert_eq!(j, i + 1);
                    let skipped = (y + 1..z)
                        .take(200_000)
                        .any(|v| is_member(kind, k, v).unwrap());
                    assert!(!skipped, "{kind} k = {k}: a member between {y} and {z}");
                }
            }
        }
    }

    #[test]
    fn parse_kinds() {
        for kind in AnchorKind::ALL {
            assert_eq!(kind.name().parse::<AnchorKind>(), Ok(kind));
        }
        assert!("G".parse::<AnchorKind>().is_err());
    }

    #[test]
    fn classify_examples() {
        let c = classify(0, 2).unwrap();
        let p = c.parallelogram().unwrap();
        assert_eq!(
            (p.kind(), p.generation(), p.index(), p.anchor()),
            (RegionKind::T, 0, 1, 2)
        );
        // T_0 is one row tall and one diagonal wide, so every flag applies.
        assert_eq!(
            c.flags,
            CellFlags::TOP_ROW
                | CellFlags::BOTTOM_ROW
                | CellFlags::LEFT_EDGE
                | CellFlags::RIGHT_EDGE
        );

        let c = classify(2, 3).unwrap();
        let p = c.parallelogram().unwrap();
        assert_eq!(
            (p.kind(), p.generation(), p.index(), p.anchor()),
            (RegionKind::U, 0, 1, 5)
        );
        assert_eq!(c.flags, CellFlags::TOP_ROW | CellFlags::RIGHT_EDGE);

        let c = classify(13, 4).unwrap();
        let p = c.parallelogram().unwrap();
        assert_eq!(
            (p.kind(), p.generation(), p.index(), p.anchor()),
            (RegionKind::V, 1, 1, 15)
        );
        assert_eq!(c.flags, CellFlags::INTERIOR);

        assert_eq!(classify(0, 1).unwrap().region, Region::SpecialOrigin);
        assert_eq!(classify(0, 0), Err(Error::InvalidOrder { n: 0 }));
    }

    #[test]
    fn bottom_row_cells_use_degenerate_generation() {
        for m in 0..200u64 {
            let c = classify(m, 1).unwrap();
            let absorbed = m + 1 != 1 && is_member(AnchorKind::EPrime, 0, m + 1).unwrap();
            assert_eq!(c.is_degenerate(), absorbed, "m = {m}");
            if absorbed {
                let p = c.parallelogram().unwrap();
                assert_eq!(p.rows(), (1, 2));
                assert_eq!(p.diagonals(), (m, m + 1));
            }
        }
    }

    #[test]
    fn window_parallelogram_examples() {
        let ps = parallelograms_in_window(Window::new(6, 3)).unwrap();
        let has = |kind, k, anchor| {
            ps.iter()
                .any(|p| p.kind() == kind && p.generation() == k && p.anchor() == anchor)
        };
        assert!(has(RegionKind::U, 0, 5));
        assert!(has(RegionKind::T, 0, 2));
        assert!(parallelograms_in_window(Window::new(0, 0))
            .unwrap()
            .is_empty());
        let ps = parallelograms_in_window(Window::new(20, 7)).unwrap();
        assert!(ps
            .iter()
            .any(|p| p.kind() == RegionKind::V && p.generation() == 1 && p.anchor() == 15));
    }

    #[test]
    fn window_parallelograms_listed_once_and_intersecting() {
        let w = Window::new(60, 30);
        let ps = parallelograms_in_window(w).unwrap();
        let mut seen = std::collections::HashSet::new();
        for p in &ps {
            assert!(
                seen.insert((p.kind(), p.generation(), p.index())),
                "{p} twice"
            );
            assert!(
                w.cells().any(|(m, n)| p.contains(m, n)),
                "{p} misses the window"
            );
        }
        // Every covering parallelogram of every cell is listed.
        for (m, n) in w.cells().filter(|&(_, n)| n >= 2) {
            let c = classify(m, n).unwrap();
            assert!(ps.contains(c.parallelogram().unwrap()), "({m}, {n})");
        }
    }

    #[test]
    fn partition_small_window_exact() {
        let report = verify_partition(Window::with_rows(50, 2, 50)).unwrap();
        assert_eq!(report.cells, 51 * 49);
        assert!(report.anomalies.is_empty(), "{:?}", report.anomalies);
    }

    #[test]
    fn partition_bottom_row_gaps() {
        let report = verify_partition(Window::with_rows(20, 1, 1)).unwrap();
        let uncovered: Vec<u64> = report.anomalies.iter().map(|a| a.m).collect();
        assert!(report.anomalies.iter().all(|a| a.count == 0));
        // m + 1 ∈ E'_0 = {2, 6, 9, 12, 16, 19, ...}, plus the origin.
        assert_eq!(uncovered, vec![0, 1, 5, 8, 11, 15, 18]);
        assert!(report.unexpected().unwrap().is_empty());
    }

    #[test]
    fn partition_empty_window() {
        let report = verify_partition(Window::new(10, 0)).unwrap();
        assert_eq!(report.cells, 0);
        assert!(report.anomalies.is_empty());
    }

    #[test]
    fn classify_agrees_with_painting() {
        let w = Window::new(120, 45);
        for p in parallelograms_in_window(w).unwrap() {
            for (m, n) in w.cells().filter(|&(m, n)| p.contains(m, n)) {
                let c = classify(m, n).unwrap();
                assert_eq!(c.parallelogram(), Some(&p), "({m}, {n})");
            }
        }
    }

    #[test]
    fn interior_flag_is_exclusive() {
        for (m, n) in Window::new(80, 40).cells() {
            let c = classify(m, n).unwrap();
            if c.flags.contains(CellFlags::INTERIOR) {
                assert_eq!(c.flags, CellFlags::INTERIOR);
            }
        }
    }

    #[test]
    fn flag_display() {
        assert_eq!(
            (CellFlags::TOP_ROW | CellFlags::RIGHT_EDGE).to_string(),
            "TopRow|RightEdge"
        );
        assert_eq!(CellFlags::INTERIOR.to_string(), "Interior");
    }

    #[test]
    fn shifted_anchors_stay_in_e_prime() {
        // α_i - f_{2k+2} ∈ E'_k and β'_i + f_{2k} ∈ E'_k.
        for k in 0..=4u32 {
            let f = |j: u32| crate::sequence::f(j as usize).unwrap();
            for i in 1..=200 {
                let alpha = family_member(AnchorKind::EPrime, k + 1, i).unwrap();
                assert!(is_member(AnchorKind::EPrime, k, alpha - f(2 * k + 2)).unwrap());
                let beta = family_member(AnchorKind::FDoublePrime, k, i).unwrap();
                assert!(is_member(AnchorKind::EPrime, k, beta + f(2 * k)).unwrap());
            }
        }
    }

    #[test]
    fn e_gap_laws() {
        for k in 0..=4u32 {
            let f = |j: u32| crate::sequence::f(j as usize).unwrap();
            let e = family_upto(AnchorKind::E, k, 100_000).unwrap();
            for w in e.windows(2) {
                let gap = w[1] - w[0];
                assert!(gap == f(2 * k) || gap == f(2 * k + 2), "k = {k} gap {gap}");
            }
            // Predecessor of a later E'_k member, f_{2k+2} back, lies in E_k.
            let ep = family_upto(AnchorKind::EPrime, k, 100_000).unwrap();
            for w in ep.windows(2) {
                let gap = w[1] - w[0];
                assert!(gap == f(2 * k + 2) || gap == f(2 * k + 3));
            }
            for &x in e.iter().skip(1) {
                if is_member(AnchorKind::EPrime, k, x).unwrap() {
                    let j = e.binary_search(&x).unwrap();
                    assert_eq!(x - f(2 * k + 2), e[j - 1], "k = {k}, x = {x}");
                }
            }
        }
    }

    #[test]
    fn f_gap_law() {
        for k in 0..=4u32 {
            let f = |j: u32| crate::sequence::f(j as usize).unwrap();
            let ys = family_upto(AnchorKind::F, k, 100_000).unwrap();
            let half = f(2 * k + 1) / 2;
            for w in ys.windows(2) {
                let in_prime = phi(k + 1, w[0]) == half;
                let expected = if in_prime { f(2 * k + 3) } else { f(2 * k + 2) };
                assert_eq!(w[1] - w[0], expected, "k = {k}, y = {}", w[0]);
            }
        }
    }

    #[test]
    fn concurrent_family_extension() {
        let fam = AnchorFamily::new(AnchorKind::EPrime, 1).unwrap();
        let expected = scan(AnchorKind::EPrime, 1, 50_000);
        std::thread::scope(|s| {
            for t in 1..=4u64 {
                let fam = &fam;
                let expected = &expected;
                s.spawn(move || {
                    let bound = 12_500 * t;
                    let got = fam.upto(bound).unwrap();
                    let want: Vec<u64> = expected.iter().copied().filter(|&x| x <= bound).collect();
                    assert_eq!(got, want);
                });
            }
        });
    }
}
