use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sturmian_hankel::AnchorKind;

#[derive(Debug, Parser)]
#[command(
    name = "sturmian-hankel",
    version,
    about = "Hankel determinants of the fixed point of 1 -> 101, 0 -> 1"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one determinant H_{m,n}
    Eval(EvalArgs),
    /// Compare the closed form with the oracle over a window and check the partition
    Verify(VerifyArgs),
    /// Write a PPM image of a window
    Render(RenderArgs),
    /// Print the word, representations, anchor sets or the partition
    #[command(subcommand)]
    Dump(DumpCommand),
    /// Time the closed form against the CRT oracle
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMethod {
    Closed,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleChoice {
    Crt,
    Bareiss,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: EvalMethod,
    /// Determinant algorithm used by the oracle
    #[arg(long, value_enum, default_value = "crt")]
    pub oracle: OracleChoice,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Largest m (columns 0..=mmax)
    #[arg(long)]
    pub mmax: u64,
    /// Largest n (rows 1..=nmax)
    #[arg(long)]
    pub nmax: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyOracle {
    /// All orders of each m from one incremental elimination
    Column,
    /// One CRT determinant per cell
    Crt,
    /// One Bareiss determinant per cell
    Bareiss,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub window: WindowArgs,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "column")]
    pub oracle: VerifyOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderSource {
    Closed,
    Oracle,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub window: WindowArgs,
    /// Output PPM file
    #[arg(long, short)]
    pub out: PathBuf,
    /// Put n on the horizontal axis
    #[arg(long)]
    pub transpose: bool,
    #[arg(long, value_enum, default_value = "closed")]
    pub source: RenderSource,
}

#[derive(Debug, Subcommand)]
pub enum DumpCommand {
    /// First LEN letters of the word
    Seq {
        #[arg(long)]
        len: usize,
    },
    /// Digits of the representation of N
    Frep {
        #[arg(long)]
        n: u64,
    },
    /// Members of an anchor set up to BOUND
    Family {
        /// E, Eprime, Edoubleprime, F, Fprime or Fdoubleprime
        #[arg(long)]
        kind: AnchorKind,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        bound: u64,
    },
    /// CSV of every window cell with its value and parallelogram
    Partition {
        #[command(flatten)]
        window: WindowArgs,
        /// Write to a file instead of stdout
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Orders to time
    #[arg(long, value_delimiter = ',', default_value = "1,10,50,100")]
    pub n: Vec<u64>,
    /// Offset m used for every order
    #[arg(long, default_value_t = 0)]
    pub m: u64,
    /// Timed repetitions per method (the median is reported)
    #[arg(long, default_value_t = 7)]
    pub reps: usize,
}
