//! `cechain`: check, analyze, simulate and export component-based system models.
//!
//! Exit codes: 0 success, 1 validation errors, 2 latency-spec or containment
//! violations, 3 usage or I/O errors.

mod commands;
mod input;
mod style;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cechain_core::time::{parse_decimal_nanos, NANOS_PER_SEC};
use cechain_core::Nanos;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cechain",
    version,
    about = "Activation, frequency and end-to-end latency analysis for component models"
)]
struct Cli {
    /// Colorize human-readable output. CECHAIN_NO_COLOR overrides it.
    #[arg(long, global = true)]
    color: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, resolve and validate; print diagnostics.
    Check(Files),
    /// Frequencies, sampling classes and chain latencies.
    Analyze {
        #[command(flatten)]
        files: Files,
        /// Only this chain.
        #[arg(long)]
        chain: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Run the discrete-event simulator and report observed chain latencies.
    Simulate {
        #[command(flatten)]
        files: Files,
        /// Simulated time in seconds.
        #[arg(long, default_value = "60", value_parser = parse_duration)]
        duration: Nanos,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only this chain.
        #[arg(long)]
        chain: Option<String>,
        /// Check observed latencies against the analytic bounds.
        #[arg(long)]
        compare: bool,
        /// Write the event trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Phase::Random)]
        phase: Phase,
        #[arg(long, value_enum, default_value_t = Exec::Uniform)]
        exec: Exec,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Write the activation table as JSON.
    ExportTable {
        #[command(flatten)]
        files: Files,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Files {
    /// .ccd and .csys files, or directories containing them.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Phase {
    Zero,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Exec {
    Bcet,
    Wcet,
    Uniform,
}

fn parse_duration(text: &str) -> Result<Nanos, String> {
    parse_decimal_nanos(text, NANOS_PER_SEC).map_err(|e| e.to_string())
}

/// Exit status plus an optional message for standard error.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    pub fn io(path: &Path, e: &std::io::Error) -> Self {
        Failure::usage(format!("{}: {e}", path.display()))
    }
}

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let style = style::Style::new(cli.color && std::env::var_os("CECHAIN_NO_COLOR").is_none());
    let result = match cli.command {
        Command::Check(f) => commands::check(&f.paths, &style),
        Command::Analyze { files, chain, format } => {
            commands::analyze(&files.paths, chain.as_deref(), matches!(format, Format::Json), &style)
        }
        Command::Simulate { files, duration, seed, chain, compare, trace, phase, exec, format } => {
            let cfg = cechain_core::sim::SimConfig {
                duration,
                seed,
                phase_policy: match phase {
                    Phase::Zero => cechain_core::sim::PhasePolicy::Zero,
                    Phase::Random => cechain_core::sim::PhasePolicy::Random,
                },
                exec_policy: match exec {
                    Exec::Bcet => cechain_core::sim::ExecPolicy::Bcet,
                    Exec::Wcet => cechain_core::sim::ExecPolicy::Wcet,
                    Exec::Uniform => cechain_core::sim::ExecPolicy::Uniform,
                },
            };
            let opts = commands::SimulateOptions {
                chain: chain.as_deref(),
                compare,
                trace: trace.as_deref(),
                json: matches!(format, Format::Json),
            };
            commands::simulate(&files.paths, &cfg, &opts, &style)
        }
        Command::ExportTable { files, out } => commands::export_table(&files.paths, out.as_deref(), &style),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("cechain: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
