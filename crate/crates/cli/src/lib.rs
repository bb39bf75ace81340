//! Command-line front end: argument grammar, configuration merge and the
//! per-command drivers. `run` is what the binary calls.

pub mod cache;
pub mod commands;
pub mod config;
pub mod published;
pub mod report;
pub mod tables;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{FileConfig, RunConfig};
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "oscint", version, about = "High-precision evaluation of the oscillatory MRB integral")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Decimal digits of the result (at least 30)
    #[arg(long, global = true)]
    pub digits: Option<u32>,
    /// Output format: text, csv, markdown or json
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// V-table cache file (CSV)
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Append digit-agreement columns against the published values
    #[arg(long, global = true)]
    pub compare: bool,
    /// Include the long-running table rows
    #[arg(long, global = true)]
    pub full: bool,
    /// JSON config file with keys digits, cache_path, format
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// MRB constant by direct, Euler or CVZ summation
    Mrb(commands::MrbArgs),
    /// One estimate of the oscillatory integral M_I
    Mi(commands::MiArgs),
    /// A single V(pi,k,s)
    V(commands::VArgs),
    /// Telescoped table of V(pi,k,s)
    Vtable(commands::VtableArgs),
    /// Exact alpha/beta coefficients of the derivative ladder
    Coeffs(commands::CoeffsArgs),
    /// Error profile of the inverted Euler-Maclaurin estimate
    Em(commands::EmArgs),
    /// Regenerate a published table
    Table(commands::TableArgs),
    /// Samples of the plotted integrands
    Figure(commands::FigureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Mrb(_) => "mrb",
            Self::Mi(_) => "mi",
            Self::V(_) => "v",
            Self::Vtable(_) => "vtable",
            Self::Coeffs(_) => "coeffs",
            Self::Em(_) => "em",
            Self::Table(_) => "table",
            Self::Figure(_) => "figure",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args` (program name first), runs one command and writes the
/// report to `out`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let name = cli.command.name();
    let file = match &cli.global.config {
        Some(path) => match FileConfig::load(path) {
            Ok(f) => f,
            Err(msg) => {
                let _ = writeln!(err, "error: {name}: {msg}");
                return EXIT_USAGE;
            }
        },
        None => FileConfig::default(),
    };
    let g = cli.global;
    let config = RunConfig::merge(file, g.digits, g.cache, g.format, g.compare, g.full);
    match commands::execute(&cli.command, &config) {
        Ok(report) => match report.write_to(out, config.format) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {name}: writing output: {e}");
                EXIT_COMPUTE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {name}: {e}");
            exit_code(&e)
        }
    }
}

/// Bad input maps to the usage status, everything else is a computation
/// failure.
pub fn exit_code(e: &oscint_core::Error) -> i32 {
    use oscint_core::Error::*;
    match e {
        Config(_) | Parameter(_) | UnsupportedOrder { .. } => EXIT_USAGE,
        Domain(_) | Dependency(_) | Precision(_) | InternalConsistency(_) | Parse { .. } => EXIT_COMPUTE,
    }
}
