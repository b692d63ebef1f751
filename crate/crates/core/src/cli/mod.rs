//! The `xct` command line.

mod commands;
pub mod output;
pub mod units;

use std::ffi::OsString;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use output::{Format, Report, Table, Value, SCHEMAS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DateSpan(pub NaiveDate, pub NaiveDate);

#[derive(Clone, Debug)]
pub struct ByteList(pub Vec<u64>);

#[derive(Clone, Debug)]
pub struct DurationList(pub Vec<i64>);

fn date_span(s: &str) -> Result<DateSpan, String> {
    units::parse_date_range(s).map(|(a, b)| DateSpan(a, b))
}

fn byte_list(s: &str) -> Result<ByteList, String> {
    units::parse_byte_list(s).map(ByteList)
}

fn duration_list(s: &str) -> Result<DurationList, String> {
    units::parse_duration_list(s).map(DurationList)
}

fn positive_duration(s: &str) -> Result<i64, String> {
    match units::parse_duration_secs(s)? {
        0 => Err("duration must be positive".into()),
        v => Ok(v),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "xct",
    version,
    about = "XRootD cache log mining and LRU cache simulation",
    arg_required_else_help = true
)]
struct Cli {
    /// Output encoding; defaults to JSON for `.json` outputs and CSV otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Print the column layout of every output table and exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded synthetic corpus of daily logs.
    Generate(GenerateArgs),
    /// Access statistics over parsed logs.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Fit f(x) = a*x^b + eps to points or to a lifetime histogram.
    FitPowerlaw(FitArgs),
    /// Cache simulations.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    #[command(subcommand, hide = true)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
enum AnalyzeCommand {
    /// Per-file read counts, read sizes and offsets.
    Reads(ReadsArgs),
    /// Lifetime segmentation, quantiles and histogram.
    Lifetimes(LifetimesArgs),
    /// Transfer totals.
    Transfers(InputOut),
    /// Mean lifetime across a range of thresholds.
    SweepTau(SweepArgs),
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// LRU hit rate for each capacity.
    HitRate(CapacityArgs),
    /// Stochastic content growth under a rising hit rate.
    ContentModel(ContentArgs),
    /// Time until each capacity fills.
    FillTime(CapacityArgs),
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Reference LRU simulation.
    Lru(CapacityArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Directory of `xrootd-YYYYMMDD.log[.gz]` files, or one log file.
    #[arg(long)]
    logs: PathBuf,
    /// Restrict to `YYYY-MM-DD:YYYY-MM-DD` (inclusive).
    #[arg(long, value_parser = date_span)]
    days: Option<DateSpan>,
    /// Skip unreadable files instead of failing.
    #[arg(long)]
    tolerant: bool,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InputOut {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Default,
    #[value(name = "august-2021")]
    August2021,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `YYYY-MM-DD:YYYY-MM-DD` (inclusive); one log per day.
    #[arg(long, value_parser = date_span)]
    days: DateSpan,
    /// Corpus directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "default")]
    preset: Preset,
    /// JSON workload profile; omitted fields take the default profile.
    #[arg(long, conflicts_with = "preset")]
    profile: Option<PathBuf>,
    /// Multiply the file population.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    population: Option<u64>,
    /// Probability of a noise line after each event line.
    #[arg(long)]
    junk_rate: Option<f64>,
    /// Write the run summary here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReadsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Histogram bin width in reads per file.
    #[arg(long, default_value_t = 25.0)]
    bin: f64,
    /// Histogram upper edge in reads per file.
    #[arg(long, default_value_t = 2000.0)]
    max: f64,
}

#[derive(Debug, Args)]
struct LifetimesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Largest gap between opens within one lifetime.
    #[arg(long, default_value = "1.2d", value_parser = positive_duration)]
    tau: i64,
    /// Quantile report thresholds.
    #[arg(long, default_value = "1h,5h,10h", value_parser = duration_list)]
    thresholds: DurationList,
    #[arg(long, default_value = "1h", value_parser = positive_duration)]
    bin: i64,
    #[arg(long, default_value = "240h", value_parser = positive_duration)]
    max: i64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, default_value = "1d:10d:1d", value_parser = duration_list)]
    taus: DurationList,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false, args = ["points", "logs"])]
struct FitArgs {
    /// CSV with `x,y` columns and a header row.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Fit the lifetime histogram of these logs instead.
    #[arg(long)]
    logs: Option<PathBuf>,
    #[arg(long, value_parser = date_span, requires = "logs")]
    days: Option<DateSpan>,
    #[arg(long, default_value = "1.2d", value_parser = positive_duration)]
    tau: i64,
    #[arg(long, default_value = "1h", value_parser = positive_duration)]
    bin: i64,
    #[arg(long, default_value = "240h", value_parser = positive_duration)]
    max: i64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutArgs,
    /// `lo:hi:step`, a comma list, or one size; units B, KB, MB, GB, TB.
    #[arg(long, default_value = "40TB:60TB:2TB", value_parser = byte_list)]
    capacities: ByteList,
}

#[derive(Debug, Args)]
struct ContentArgs {
    #[command(flatten)]
    out: OutArgs,
    /// JSON parameter file; flags override its fields.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = units::parse_bytes)]
    capacity: Option<u64>,
    #[arg(long, conflicts_with = "days")]
    steps: Option<u32>,
    /// One step per day from start to end.
    #[arg(long, value_parser = date_span)]
    days: Option<DateSpan>,
    #[arg(long)]
    access_rate: Option<u64>,
    #[arg(long, value_parser = units::parse_bytes)]
    file_size: Option<u64>,
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    h_cap: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    size_params: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    rate_params: Option<Vec<f64>>,
    /// Treat negative increments as zero.
    #[arg(long)]
    clamp_negative: bool,
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 on usage errors, 2 on data errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let flags: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli, flags) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("xct: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, flags: Vec<String>) -> Result<i32, CliError> {
    let format = cli.format;
    if cli.schema {
        let report = output::schema_report(flags);
        commands::emit(&report, None, format)?;
        return Ok(EXIT_OK);
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage("a subcommand is required (see --help)".into()));
    };
    let ctx = commands::Ctx { format, flags };
    match command {
        Command::Generate(a) => commands::generate(&ctx, a),
        Command::Analyze(AnalyzeCommand::Reads(a)) => commands::analyze_reads(&ctx, a),
        Command::Analyze(AnalyzeCommand::Lifetimes(a)) => commands::analyze_lifetimes(&ctx, a),
        Command::Analyze(AnalyzeCommand::Transfers(a)) => commands::analyze_transfers(&ctx, a),
        Command::Analyze(AnalyzeCommand::SweepTau(a)) => commands::sweep_tau(&ctx, a),
        Command::FitPowerlaw(a) => commands::fit_powerlaw(&ctx, a),
        Command::Simulate(SimulateCommand::HitRate(a)) => commands::hit_rate(&ctx, a, false),
        Command::Simulate(SimulateCommand::ContentModel(a)) => commands::content(&ctx, a),
        Command::Simulate(SimulateCommand::FillTime(a)) => commands::fill(&ctx, a),
        Command::Oracle(OracleCommand::Lru(a)) => commands::hit_rate(&ctx, a, true),
    }
}
