//! Cells shared by the benchmarks.

/// Offset used for every order; far enough out that no anchor list is short.
pub const OFFSET: u64 = 1_000;

/// Orders timed by the benchmarks.
pub const ORDERS: [u64; 4] = [10, 50, 100, 200];

/// `(m, n)` cells spread over several generations, for throughput runs.
pub fn sample_cells() -> Vec<(u64, u64)> {
    (1..=400u64)
        .map(|i| (i * 7_919 % 100_000, 1 + i * 13 % 300))
        .collect()
}
