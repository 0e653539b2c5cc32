use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use clap::{Parser, Subcommand};

use crate::commands;
use crate::config::{RunArgs, RunConfig};
use crate::error::{AppError, AppResult, EXIT_DOMAIN, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "nk-flow", version, about = "Nearly Kähler structures from torus reductions: verification, evolution and export")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for grid evaluations (0 = one per core).
    #[arg(long, env = "NK_FLOW_THREADS", global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every residual check over a grid of levels.
    #[command(allow_negative_numbers = true)]
    Verify(RunArgs),
    /// Integrate the flow and write the trajectory.
    #[command(allow_negative_numbers = true)]
    Evolve(RunArgs),
    /// Compare the integrated flow with the closed forms.
    #[command(allow_negative_numbers = true)]
    Compare(RunArgs),
    /// Write tidy plot data.
    #[command(allow_negative_numbers = true)]
    Export(RunArgs),
}

type CommandFn = fn(&RunConfig, &mut dyn Write) -> AppResult<i32>;

fn execute(cli: Cli, stdout: &mut dyn Write) -> AppResult<i32> {
    let (f, args): (CommandFn, RunArgs) = match cli.command {
        Command::Verify(a) => (commands::verify, a),
        Command::Evolve(a) => (commands::evolve, a),
        Command::Compare(a) => (commands::compare, a),
        Command::Export(a) => (commands::export, a),
    };
    let cfg = RunConfig::from(args);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build().map_err(|e| AppError::Usage(e.to_string()))?;
    // Single writer: the command fills a buffer, written once it returns.
    let mut buffer = Vec::new();
    let result = pool.install(|| f(&cfg, &mut buffer));
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(&buffer)?;
            w.flush()?;
        }
        None => stdout.write_all(&buffer)?,
    }
    result
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "nk-flow: {e}");
            e.exit_code()
        }
    }
}
