//! Window-wide comparison of the closed form against the determinant oracle,
//! combined with the exactly-once coverage check.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::closed_form::eval_closed;
use crate::error::{Error, Result};
use crate::oracle::{eval_oracle, oracle_column, Method};
use crate::partition::{
    classify, verify_partition, CoverageAnomaly, CoverageReport, Region, Window,
};
use crate::value::HankelValue;

/// How oracle values are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// One determinant per cell.
    Cell(Method),
    /// All orders of one offset `m` from a single incremental elimination.
    #[default]
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub window: Window,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub oracle: OracleMode,
}

impl VerifyConfig {
    pub fn new(window: Window) -> Self {
        VerifyConfig {
            window,
            jobs: None,
            oracle: OracleMode::default(),
        }
    }
}

/// Cells per region label: `U`, `V`, `T`, `U-1` (bottom-row cells) and `origin`.
pub type Census = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub m: u64,
    pub n: u64,
    /// `None` when the cell could not be classified.
    pub closed: Option<HankelValue>,
    pub oracle: HankelValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub window: Window,
    pub census: Census,
    pub coverage: CoverageReport,
    pub unexpected: Vec<CoverageAnomaly>,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn cells(&self) -> u64 {
        self.coverage.cells
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty() && self.unexpected.is_empty()
    }
}

fn region_label(m: u64, n: u64) -> Result<Option<String>> {
    match classify(m, n) {
        Ok(c) => Ok(Some(match c.region {
            Region::SpecialOrigin => "origin".to_string(),
            Region::Parallelogram(p) if p.generation() < 0 => "U-1".to_string(),
            Region::Parallelogram(p) => p.kind().to_string(),
        })),
        Err(Error::Coverage { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn check_column(window: Window, mode: OracleMode, m: u64) -> Result<(Census, Vec<Mismatch>)> {
    let oracle: Vec<HankelValue> = match mode {
        OracleMode::Column => {
            let mut col = oracle_column(m, window.n_max)?;
            col.drain(..(window.n_min - 1) as usize);
            col
        }
        OracleMode::Cell(method) => (window.n_min..=window.n_max)
            .map(|n| eval_oracle(m, n, method))
            .collect::<Result<_>>()?,
    };
    let mut census = Census::new();
    let mut mismatches = Vec::new();
    for (n, expected) in (window.n_min..=window.n_max).zip(oracle) {
        if let Some(label) = region_label(m, n)? {
            *census.entry(label).or_default() += 1;
        }
        let closed = match eval_closed(m, n) {
            Ok(v) => Some(v),
            Err(Error::Coverage { .. }) => None,
            Err(e) => return Err(e),
        };
        if closed.as_ref() != Some(&expected) {
            mismatches.push(Mismatch {
                m,
                n,
                closed,
                oracle: expected,
            });
        }
    }
    Ok((census, mismatches))
}

fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    let window = config.window;
    let coverage = verify_partition(window)?;
    let unexpected = coverage.unexpected()?;
    let columns: Vec<(Census, Vec<Mismatch>)> = if window.is_empty() {
        Vec::new()
    } else {
        (0..=window.m_max)
            .into_par_iter()
            .map(|m| check_column(window, config.oracle, m))
            .collect::<Result<_>>()?
    };
    let mut census = Census::new();
    let mut mismatches = Vec::new();
    for (c, mm) in columns {
        for (k, v) in c {
            *census.entry(k).or_default() += v;
        }
        mismatches.extend(mm);
    }
    mismatches.sort_by_key(|x| (x.n, x.m));
    Ok(VerifyReport {
        window,
        census,
        coverage,
        unexpected,
        mismatches,
    })
}

/// Compares `eval_closed` with the oracle on every window cell and checks
/// the partition. The report does not depend on `jobs` or scheduling.
pub fn verify_window(config: &VerifyConfig) -> Result<VerifyReport> {
    match config.jobs {
        None => run(config),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .expect("thread pool construction")
            .install(|| run(config)),
    }
}
