//! Command-line driver: config parsing, subcommand dispatch, and the
//! deterministic file formats. Exit codes: 0 success, 1 configuration or
//! validation error, 2 numerical non-convergence, 3 I/O failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod formats;

use commands::CommandContext;
use config::RunConfig;

#[derive(Clone, Debug, PartialEq)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(
    name = "pharmonious",
    about = "Obstacle-problem DPP solver and tug-of-war game simulator on eps-ball lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the obstacle DPP and export field, contact set and report.
    Solve(RunArgs),
    /// Monte Carlo game-value estimate at a probe point.
    Simulate(RunArgs),
    /// eps -> 0 convergence experiment against a reference solution.
    Converge(RunArgs),
    /// Mean-value expansion table for a quadratic test function.
    Meanvalue(RunArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// JSON run configuration.
    pub config: PathBuf,
    /// Override the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the Monte Carlo path count.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Worker threads for path simulation (0 = all cores). Outputs do
    /// not depend on this setting.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Record a wall-clock stamp in the solve report (off by default so
    /// outputs are byte-reproducible).
    #[arg(long)]
    pub stamp: bool,
}

fn load_context(args: &RunArgs) -> Result<CommandContext, CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.output.dir = out.clone();
    }
    if let Some(mc) = config.mc.as_mut() {
        if let Some(seed) = args.seed {
            mc.seed = seed;
        }
        if let Some(paths) = args.paths {
            mc.n_paths = paths;
        }
    }
    config.resolve()?;
    Ok(CommandContext {
        config,
        stamp: args.stamp,
        workers: args.workers,
    })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => commands::cmd_solve(&load_context(args)?),
        Command::Simulate(args) => commands::cmd_simulate(&load_context(args)?),
        Command::Converge(args) => commands::cmd_converge(&load_context(args)?),
        Command::Meanvalue(args) => commands::cmd_meanvalue(&load_context(args)?),
    }
}

/// Entry point shared by the binary and the integration tests.
pub fn main_impl() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprintln!("{e}");
                return 1;
            }
            print!("{e}");
            return 0;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
