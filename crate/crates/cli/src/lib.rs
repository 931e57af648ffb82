//! The `posweight` command-line harness.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use posweight::{Error, Result};

use crate::config::Options;

/// Exit status for usage and configuration errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status for unreadable or malformed input data.
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "posweight",
    version,
    about = "POS n-gram term weighting for ad-hoc retrieval"
)]
pub struct Cli {
    /// TOML file with default option values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and save the index and POS n-gram statistics
    Index(Options),
    /// Retrieve topics and write a TREC run
    Search(Options),
    /// Evaluate a grid of integration strengths against the baseline
    Sweep(Options),
    /// Choose w on training topics and report test topics
    Traintest(Options),
    /// MAP and P@10 of a run, optionally tested against a baseline run
    Evaluate(Options),
    /// Spearman correlation of each POS weight with IDF
    Correlate(Options),
    /// Write weight tables as TSV
    WeightsExport(Options),
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_DATA
    }
}

type Handler = fn(&Options, &mut dyn Write) -> Result<()>;

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let (run, flags): (Handler, Options) = match cli.command {
        Command::Index(o) => (commands::cmd_index, o),
        Command::Search(o) => (commands::cmd_search, o),
        Command::Sweep(o) => (commands::cmd_sweep, o),
        Command::Traintest(o) => (commands::cmd_traintest, o),
        Command::Evaluate(o) => (commands::cmd_evaluate, o),
        Command::Correlate(o) => (commands::cmd_correlate, o),
        Command::WeightsExport(o) => (commands::cmd_weights_export, o),
    };
    let file = match &cli.config {
        Some(p) => Options::load(p)?,
        None => Options::default(),
    };
    let opts = flags.over(file);
    opts.check_paths()?;
    if let Some(t) = opts.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        // a pool may already exist when called twice in one process; keep it
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    run(&opts, out)
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
