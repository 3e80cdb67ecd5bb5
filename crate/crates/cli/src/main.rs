use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use sturmian_hankel::{
    classify, encode, eval_closed, eval_oracle, family_upto, render_closed, render_oracle,
    s_prefix, verify_window, CellClass, Error, Layout, Method, OracleMode, Region, VerifyConfig,
    Window, PALETTE_VERSION,
};

mod args;

use args::*;

const EXIT_MISMATCH: u8 = 2;
const EXIT_COVERAGE: u8 = 3;
const EXIT_OVERFLOW: u8 = 4;
const EXIT_BAD_ARGS: u8 = 5;

enum Failure {
    Lib(Error),
    Io(io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<u8, Failure>;

fn window(w: &WindowArgs) -> Result<Window, Failure> {
    if w.nmax == 0 {
        return Err(Failure::Usage("--nmax must be at least 1".into()));
    }
    Ok(Window::new(w.mmax, w.nmax))
}

fn oracle_method(o: OracleChoice) -> Method {
    match o {
        OracleChoice::Crt => Method::Crt,
        OracleChoice::Bareiss => Method::Bareiss,
    }
}

fn region_fields(class: &CellClass) -> (String, String, String) {
    match class.region {
        Region::SpecialOrigin => ("origin".into(), String::new(), String::new()),
        Region::Parallelogram(p) => (
            p.kind().to_string(),
            p.generation().to_string(),
            p.index().to_string(),
        ),
    }
}

fn class_name(class: &CellClass) -> String {
    match class.region {
        Region::SpecialOrigin => "SpecialOrigin".into(),
        Region::Parallelogram(_) => class.flags.to_string(),
    }
}

fn cmd_eval(a: &EvalArgs, out: &mut impl Write) -> CmdResult {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let class = classify(a.m, a.n)?;
    let (region, k, i) = region_fields(&class);
    let mut record = format!("m={} n={}", a.m, a.n);
    let mut code = 0;
    match a.method {
        EvalMethod::Closed => record += &format!(" value={}", eval_closed(a.m, a.n)?),
        EvalMethod::Oracle => {
            record += &format!(" value={}", eval_oracle(a.m, a.n, oracle_method(a.oracle))?)
        }
        EvalMethod::Both => {
            let closed = eval_closed(a.m, a.n)?;
            let oracle = eval_oracle(a.m, a.n, oracle_method(a.oracle))?;
            let matched = closed == oracle;
            if !matched {
                code = EXIT_MISMATCH;
            }
            record += &format!(" value={closed} closed={closed} oracle={oracle} match={matched}");
        }
    }
    let k = if k.is_empty() { "-".into() } else { k };
    let i = if i.is_empty() { "-".into() } else { i };
    writeln!(
        out,
        "{record} region={region} k={k} i={i} class={}",
        class_name(&class)
    )?;
    Ok(code)
}

fn cmd_verify(a: &VerifyArgs, out: &mut impl Write) -> CmdResult {
    let window = window(&a.window)?;
    if a.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let oracle = match a.oracle {
        VerifyOracle::Column => OracleMode::Column,
        VerifyOracle::Crt => OracleMode::Cell(Method::Crt),
        VerifyOracle::Bareiss => OracleMode::Cell(Method::Bareiss),
    };
    let report = verify_window(&VerifyConfig {
        window,
        jobs: a.jobs,
        oracle,
    })?;
    writeln!(
        out,
        "window m=0..{} n=1..{} cells={}",
        window.m_max,
        window.n_max,
        report.cells()
    )?;
    let census: Vec<String> = report
        .census
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    writeln!(out, "regions {}", census.join(" "))?;
    writeln!(
        out,
        "coverage anomalies={} allowlisted={} unexpected={}",
        report.coverage.anomalies.len(),
        report.coverage.anomalies.len() - report.unexpected.len(),
        report.unexpected.len()
    )?;
    for a in &report.unexpected {
        writeln!(out, "anomaly m={} n={} count={}", a.m, a.n, a.count)?;
    }
    writeln!(out, "mismatches={}", report.mismatches.len())?;
    for x in &report.mismatches {
        let closed = x
            .closed
            .as_ref()
            .map_or("unclassified".to_string(), ToString::to_string);
        writeln!(
            out,
            "mismatch m={} n={} closed={closed} oracle={}",
            x.m, x.n, x.oracle
        )?;
    }
    Ok(if !report.mismatches.is_empty() {
        EXIT_MISMATCH
    } else if !report.unexpected.is_empty() {
        EXIT_COVERAGE
    } else {
        0
    })
}

fn cmd_render(a: &RenderArgs, out: &mut impl Write) -> CmdResult {
    let window = window(&a.window)?;
    let layout = Layout {
        transpose: a.transpose,
    };
    let raster = match a.source {
        RenderSource::Closed => render_closed(window, layout)?,
        RenderSource::Oracle => render_oracle(window, layout)?,
    };
    raster.write_ppm(BufWriter::new(File::create(&a.out)?))?;
    writeln!(
        out,
        "wrote {} ({}x{}, palette {PALETTE_VERSION})",
        a.out.display(),
        raster.width(),
        raster.height()
    )?;
    Ok(0)
}

fn write_partition(window: Window, out: &mut impl Write) -> CmdResult {
    writeln!(out, "# palette={PALETTE_VERSION}")?;
    writeln!(out, "m,n,value,region,k,i,class")?;
    for (m, n) in window.cells() {
        let class = classify(m, n)?;
        let (region, k, i) = region_fields(&class);
        let value = eval_closed(m, n)?;
        writeln!(
            out,
            "{m},{n},{value},{region},{k},{i},{}",
            class_name(&class)
        )?;
    }
    Ok(0)
}

fn cmd_dump(d: &DumpCommand, out: &mut impl Write) -> CmdResult {
    match d {
        DumpCommand::Seq { len } => {
            let word: String = s_prefix(*len)
                .iter()
                .map(|b| char::from(b'0' + b))
                .collect();
            writeln!(out, "{word}")?;
        }
        DumpCommand::Frep { n } => {
            let rep = encode(*n);
            let digits: String = rep.digits().iter().map(|b| char::from(b'0' + b)).collect();
            let indices: Vec<String> = rep.indices().map(|i| i.to_string()).collect();
            writeln!(out, "n={n} digits={digits} indices=[{}]", indices.join(","))?;
        }
        DumpCommand::Family { kind, k, bound } => {
            let members: Vec<String> = family_upto(*kind, *k, *bound)?
                .iter()
                .map(u64::to_string)
                .collect();
            writeln!(out, "{}", members.join(","))?;
        }
        DumpCommand::Partition {
            window: w,
            out: path,
        } => {
            let window = window(w)?;
            return match path {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(path)?);
                    let code = write_partition(window, &mut file)?;
                    file.flush()?;
                    Ok(code)
                }
                None => write_partition(window, out),
            };
        }
    }
    Ok(0)
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort();
    samples[samples.len() / 2]
}

fn cmd_bench(a: &BenchArgs, out: &mut impl Write) -> CmdResult {
    if a.reps == 0 || a.n.contains(&0) {
        return Err(Failure::Usage(
            "--reps and every --n must be at least 1".into(),
        ));
    }
    writeln!(out, "n,m,value,closed_ns,oracle_ns,speedup")?;
    for &n in &a.n {
        let closed_value = eval_closed(a.m, n)?;
        let oracle_value = eval_oracle(a.m, n, Method::Crt)?;
        if closed_value != oracle_value {
            writeln!(out, "{n},{},{closed_value}!={oracle_value},,,", a.m)?;
            return Ok(EXIT_MISMATCH);
        }
        const BATCH: u32 = 1_000;
        let closed = median(
            (0..a.reps)
                .map(|_| {
                    let start = Instant::now();
                    for _ in 0..BATCH {
                        std::hint::black_box(eval_closed(std::hint::black_box(a.m), n).ok());
                    }
                    start.elapsed() / BATCH
                })
                .collect(),
        );
        let oracle = median(
            (0..a.reps)
                .map(|_| {
                    let start = Instant::now();
                    std::hint::black_box(
                        eval_oracle(std::hint::black_box(a.m), n, Method::Crt).ok(),
                    );
                    start.elapsed()
                })
                .collect(),
        );
        let speedup = oracle.as_secs_f64() / closed.as_secs_f64().max(1e-12);
        writeln!(
            out,
            "{n},{},{closed_value},{},{},{speedup:.0}",
            a.m,
            closed.as_nanos(),
            oracle.as_nanos()
        )?;
    }
    Ok(0)
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Usage(_) => EXIT_BAD_ARGS,
        Failure::Io(_) => 1,
        Failure::Lib(e) => match e {
            Error::Coverage { .. } => EXIT_COVERAGE,
            Error::FOverflow { .. } | Error::Overflow { .. } | Error::PrefixTooLong { .. } => {
                EXIT_OVERFLOW
            }
            Error::InvalidRepresentation(_)
            | Error::ShiftDomain { .. }
            | Error::InvalidOrder { .. }
            | Error::NotInRegion { .. }
            | Error::InsufficientPrimes { .. } => EXIT_BAD_ARGS,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_ARGS } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Render(a) => cmd_render(a, &mut out),
        Command::Dump(d) => cmd_dump(d, &mut out),
        Command::Bench(a) => cmd_bench(a, &mut out),
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(code), Ok(())) => ExitCode::from(code),
        (Ok(_), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        (Err(f), _) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
