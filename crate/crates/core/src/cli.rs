//! Command-line frontend.
//!
//! Exit codes: 0 success, 1 runtime or numeric failure, 2 usage error.
//! Data goes to stdout (or `--out`), diagnostics to stderr.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversary::{attack_error, check_attack_guard, AttackKind, AttackReport};
use crate::channel::make_params;
use crate::distill::{acceptance_probability, bob_error_after_ad, dump_transcripts, run_session, SessionStats};
use crate::error::Error;
use crate::thresholds::{figure_table, ThresholdRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "advdist", version, about = "Advantage distillation thresholds, attacks and protocol simulation")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form (and optionally numeric) thresholds for a range of n
    Thresholds(ThresholdsArgs),
    /// Eve's error probability for one block size
    Attack(AttackArgs),
    /// Monte Carlo run of the distillation protocol
    Simulate(SimulateArgs),
    /// Threshold curves as CSV (n = 2..25 by default)
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Incoherent,
    Coherent,
}

impl From<KindArg> for AttackKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Incoherent => AttackKind::Incoherent,
            KindArg::Coherent => AttackKind::Coherent,
        }
    }
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    /// Write data here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ThresholdsArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    /// Also bisect for the thresholds numerically where the dimension allows
    #[arg(long)]
    numeric: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct AttackArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta0: f64,
    /// Block size
    #[arg(long = "N")]
    block_size: usize,
    /// Evaluate both attacks when omitted
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta0: f64,
    /// Block size
    #[arg(long = "N")]
    block_size: usize,
    #[arg(long)]
    blocks: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write one transcript line per block to this file
    #[arg(long)]
    dump: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    n_max: usize,
    #[arg(long)]
    numeric: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Thresholds,
    Attack,
    Simulate,
    Figure,
}

/// Fully parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: usize,
    pub n_min: usize,
    pub beta0: Option<f64>,
    pub block_size: Option<usize>,
    pub blocks: Option<u64>,
    pub seed: u64,
    pub kind: Option<AttackKind>,
    pub numeric: bool,
    pub out_format: OutFormat,
    pub out_path: Option<PathBuf>,
    pub dump_path: Option<PathBuf>,
}

impl RunConfig {
    fn base(command: CommandKind, n: usize) -> Self {
        Self {
            command,
            n,
            n_min: 2,
            beta0: None,
            block_size: None,
            blocks: None,
            seed: 0,
            kind: None,
            numeric: false,
            out_format: OutFormat::Csv,
            out_path: None,
            dump_path: None,
        }
    }

    fn from_cli(cli: Cli) -> Self {
        match cli.command {
            Command::Thresholds(a) => Self {
                n_min: a.n_min,
                numeric: a.numeric,
                out_format: a.output.format,
                out_path: a.output.out,
                ..Self::base(CommandKind::Thresholds, a.n_max)
            },
            Command::Attack(a) => Self {
                beta0: Some(a.beta0),
                block_size: Some(a.block_size),
                kind: a.kind.map(Into::into),
                out_format: a.output.format,
                out_path: a.output.out,
                ..Self::base(CommandKind::Attack, a.n)
            },
            Command::Simulate(a) => Self {
                beta0: Some(a.beta0),
                block_size: Some(a.block_size),
                blocks: Some(a.blocks),
                seed: a.seed,
                out_format: a.output.format,
                out_path: a.output.out,
                dump_path: a.dump,
                ..Self::base(CommandKind::Simulate, a.n)
            },
            Command::Figure(a) => Self {
                numeric: a.numeric,
                out_path: a.out,
                ..Self::base(CommandKind::Figure, a.n_max)
            },
        }
    }

    /// Command-specific checks, run before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        match self.command {
            CommandKind::Thresholds | CommandKind::Figure => {
                if self.n_min < 2 {
                    return usage(format!("--n-min must be at least 2 (got {})", self.n_min));
                }
                if self.n < self.n_min {
                    return usage(format!("--n-max must be at least {} (got {})", self.n_min, self.n));
                }
            }
            CommandKind::Attack | CommandKind::Simulate => {
                if self.n < 2 {
                    return usage(format!("--n must be at least 2 (got {})", self.n));
                }
                let beta0 = self.beta0.expect("required by the parser");
                if make_params(self.n, beta0).is_err() {
                    return usage(format!("--beta0 must lie in [1/{}, 1] (got {beta0})", self.n));
                }
                let block_size = self.block_size.expect("required by the parser");
                if block_size == 0 {
                    return usage("--N must be at least 1".into());
                }
                if self.command == CommandKind::Simulate && self.blocks == Some(0) {
                    return usage("--blocks must be at least 1".into());
                }
                if self.command == CommandKind::Attack {
                    self.check_guards(block_size)?;
                }
            }
        }
        Ok(())
    }

    fn check_guards(&self, block_size: usize) -> Result<(), CliError> {
        let kinds = self.kind.map_or(AttackKind::ALL.to_vec(), |k| vec![k]);
        for kind in kinds {
            check_attack_guard(self.n, kind, block_size).map_err(|e| CliError::Usage(format!("{kind} attack: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. }
            | Error::InvalidParams(_)
            | Error::InvalidArgument(_)
            | Error::InvalidBlockSize => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn opt6(x: Option<f64>) -> String {
    x.map(fmt6).unwrap_or_default()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn threshold_rows(records: &[ThresholdRecord], numeric: bool, with_quantum: bool) -> String {
    let mut out = String::from("n,beta_inc,beta_coh");
    if with_quantum {
        out.push_str(",beta_quantum");
    }
    if numeric {
        out.push_str(",beta_inc_numeric,beta_coh_numeric");
    }
    out.push('\n');
    for r in records {
        write!(out, "{},{},{}", r.n, fmt6(r.beta_inc_closed), fmt6(r.beta_coh_closed)).unwrap();
        if with_quantum {
            write!(out, ",{}", fmt6(r.beta_quantum)).unwrap();
        }
        if numeric {
            write!(out, ",{},{}", opt6(r.beta_inc_numeric), opt6(r.beta_coh_numeric)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct AttackOutput<'a> {
    reports: &'a [AttackReport],
    #[serde(skip_serializing_if = "Option::is_none")]
    coherent_dominates: Option<bool>,
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    n: usize,
    beta0: f64,
    block_size: usize,
    seed: u64,
    stats: &'a SessionStats,
    acceptance_analytic: f64,
    bob_error_analytic: f64,
}

fn cmd_thresholds(config: &RunConfig) -> Result<String, CliError> {
    let records = figure_table(config.n_min, config.n, config.numeric)?;
    match config.out_format {
        OutFormat::Csv => Ok(threshold_rows(&records, config.numeric, true)),
        OutFormat::Json => to_json(&records),
    }
}

fn cmd_attack(config: &RunConfig) -> Result<String, CliError> {
    let params = make_params(config.n, config.beta0.expect("validated"))?;
    let block_size = config.block_size.expect("validated");
    let kinds = config.kind.map_or(AttackKind::ALL.to_vec(), |k| vec![k]);
    let reports: Vec<AttackReport> = kinds
        .iter()
        .map(|&k| attack_error(&params, k, block_size))
        .collect::<Result<_, _>>()?;
    // collective measurements can only help Eve
    let dominates = (reports.len() == 2).then(|| reports[1].eve_error <= reports[0].eve_error + 1e-9);
    match config.out_format {
        OutFormat::Json => to_json(&AttackOutput {
            reports: &reports,
            coherent_dominates: dominates,
        }),
        OutFormat::Csv => {
            let mut out = String::from("kind,n,beta0,N,eve_error,dims_used");
            if dominates.is_some() {
                out.push_str(",coherent_dominates");
            }
            out.push('\n');
            for r in &reports {
                write!(
                    out,
                    "{},{},{},{},{},{}",
                    r.kind,
                    r.n,
                    fmt6(r.beta0),
                    r.block_size,
                    fmt6(r.eve_error),
                    r.dims_used
                )
                .unwrap();
                if let Some(d) = dominates {
                    write!(out, ",{d}").unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn cmd_simulate(config: &RunConfig) -> Result<String, CliError> {
    let params = make_params(config.n, config.beta0.expect("validated"))?;
    let block_size = config.block_size.expect("validated");
    let blocks = config.blocks.expect("validated");
    let stats = run_session(&params, block_size, blocks, config.seed)?;
    let acceptance_analytic = acceptance_probability(&params, block_size)?;
    let bob_error_analytic = bob_error_after_ad(&params, block_size)?;
    if let Some(path) = &config.dump_path {
        let file = File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        dump_transcripts(&params, block_size, blocks, config.seed, &mut w).map_err(|e| CliError::Runtime(e.to_string()))?;
        w.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    match config.out_format {
        OutFormat::Json => to_json(&SimulateOutput {
            n: config.n,
            beta0: params.beta0(),
            block_size,
            seed: config.seed,
            stats: &stats,
            acceptance_analytic,
            bob_error_analytic,
        }),
        OutFormat::Csv => Ok(format!(
            "n,beta0,N,blocks,seed,blocks_accepted,bob_errors,acceptance_rate,acceptance_analytic,bob_error_rate,bob_error_analytic\n\
             {},{},{},{},{},{},{},{},{},{},{}\n",
            config.n,
            fmt6(params.beta0()),
            block_size,
            blocks,
            config.seed,
            stats.blocks_accepted,
            stats.bob_errors,
            fmt6(stats.acceptance_rate),
            fmt6(acceptance_analytic),
            opt6(stats.bob_error_rate),
            fmt6(bob_error_analytic)
        )),
    }
}

fn cmd_figure(config: &RunConfig) -> Result<String, CliError> {
    let records = figure_table(2, config.n, config.numeric)?;
    Ok(threshold_rows(&records, config.numeric, false))
}

/// Runs a validated configuration and returns the data it produces.
pub fn execute(config: &RunConfig) -> Result<String, CliError> {
    config.validate()?;
    match config.command {
        CommandKind::Thresholds => cmd_thresholds(config),
        CommandKind::Attack => cmd_attack(config),
        CommandKind::Simulate => cmd_simulate(config),
        CommandKind::Figure => cmd_figure(config),
    }
}

fn emit(data: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, data).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(data.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let config = RunConfig::from_cli(cli);
    match execute(&config).and_then(|data| emit(&data, config.out_path.as_ref())) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("For more information, try '--help'.");
            }
            e.exit_code()
        }
    }
}
