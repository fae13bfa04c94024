mod commands;
mod config;
mod report;
mod run;

use clap::{Parser, Subcommand};
use commands::Suite;
use config::{Config, Overrides};
use report::{Format, Report};
use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    Verify(String),
    Io(String),
    Other(String),
}

impl CliError {
    pub fn io(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
    pub fn csv(e: csv::Error) -> CliError {
        CliError::Io(e.to_string())
    }
    fn code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 2,
            CliError::Config(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "config error: {s}"),
            CliError::Budget(s) => write!(f, "budget exceeded: {s}"),
            CliError::Verify(s) => write!(f, "verification failed: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Other(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "asfam", version, about = "Artin-Schreier family experiments over small finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone)]
struct Common {
    #[command(flatten)]
    over: Overrides,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Stop after this many newly computed partitions (resume later).
    #[arg(long, hide = true)]
    max_partitions: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Family averages of N_k against the predicted values.
    AvgPoints(Common),
    /// Local-condition subfamily ratios.
    CountLocal(Common),
    /// Zero counts in an interval and their fluctuation histogram.
    Zeros(Common),
    /// Moments of the Beurling-Selberg linear statistics.
    Moments(Common),
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, required = true)]
        suite: Vec<Suite>,
    },
    /// Cache utilities.
    Cache {
        #[command(subcommand)]
        cmd: CacheCmd,
    },
}

#[derive(Subcommand)]
enum CacheCmd {
    /// Summarize a JSONL cache file.
    Inspect {
        path: PathBuf,
        /// Skip malformed lines instead of failing.
        #[arg(long)]
        lenient: bool,
    },
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn out(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io(e)),
        _ => Ok(()),
    }
}

fn finish(cfg: &Config, rep: Option<Report>, format: Format) -> Result<u8, CliError> {
    let Some(rep) = rep else { return Ok(0) };
    let files = rep.emit(cfg, format)?;
    out(&if format == Format::Json { rep.json() } else { rep.csv()? })?;
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    if rep.failures > 0 {
        eprintln!("{} verification failures", rep.failures);
        return Ok(2);
    }
    Ok(0)
}

fn inspect(path: &PathBuf, lenient: bool) -> Result<u8, CliError> {
    let f = std::fs::File::open(path).map_err(CliError::io)?;
    let read = asfam::cache::read_records(BufReader::new(f), !lenient)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut families: BTreeMap<String, u64> = BTreeMap::new();
    let mut genera: BTreeMap<u32, u64> = BTreeMap::new();
    for (rec, z) in &read.records {
        *families.entry(format!("{} q={}", rec.family, rec.q)).or_default() += 1;
        *genera.entry(z.genus).or_default() += 1;
    }
    let mut text = format!("records: {}\n", read.records.len());
    for (f, n) in families {
        text += &format!("family {f}: {n}\n");
    }
    for (g, n) in genera {
        text += &format!("genus {g}: {n}\n");
    }
    for (line, msg) in &read.skipped {
        text += &format!("skipped line {line}: {msg}\n");
    }
    out(&text)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let load = |c: &Common| Config::load(&c.over).map_err(CliError::Config);
    match &cli.cmd {
        Cmd::AvgPoints(c) => {
            let cfg = load(c)?;
            finish(&cfg, Some(commands::avg_points(&cfg)?), c.format)
        }
        Cmd::CountLocal(c) => {
            let cfg = load(c)?;
            finish(&cfg, Some(commands::count_local(&cfg)?), c.format)
        }
        Cmd::Zeros(c) => {
            let cfg = load(c)?;
            finish(&cfg, commands::zeros(&cfg, c.max_partitions)?, c.format)
        }
        Cmd::Moments(c) => {
            let cfg = load(c)?;
            finish(&cfg, commands::moments(&cfg, c.max_partitions)?, c.format)
        }
        Cmd::Verify { common, suite } => {
            let cfg = load(common)?;
            let mut s = suite.clone();
            s.sort();
            s.dedup();
            finish(&cfg, commands::verify(&cfg, &s, common.max_partitions)?, common.format)
        }
        Cmd::Cache { cmd: CacheCmd::Inspect { path, lenient } } => inspect(path, *lenient),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
