//! The `gscqc` experiment runner.
//!
//! Each subcommand reads an optional JSON config (`--config`), applies flag
//! overrides and writes one CSV table, either to `--out` (atomically) or to
//! standard output. Exit codes: 0 success, 1 computation failure, 2 usage
//! or configuration error.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{CommandError, CommandOutput};
use config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(
    name = "gscqc",
    version,
    about = "Ground-state cooling of a Grover oracle: experiment runner"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal fixed (gamma, delta) for an evolution time.
    Optimize(Flags),
    /// Cooling and survival probability against the number of measurements.
    Fig2(Flags),
    /// Worst-case cooling probability under a split excited spectrum.
    Fig4(Flags),
    /// The exact two-step swap protocol.
    Strategy1(Flags),
    /// Monte Carlo shot trajectories on the dense simulator.
    Trajectory(Flags),
    /// Block-formula versus dense-simulator equivalence suite.
    Verify(Flags),
}

impl Command {
    fn flags(&self) -> &Flags {
        match self {
            Command::Optimize(f)
            | Command::Fig2(f)
            | Command::Fig4(f)
            | Command::Strategy1(f)
            | Command::Trajectory(f)
            | Command::Verify(f) => f,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Number of oracle states (scientific notation accepted, e.g. 1e23).
    #[arg(long = "N", value_name = "N")]
    pub n_states: Option<f64>,
    /// Temperature offsets dT/T0, comma separated.
    #[arg(long = "dT-ratio", value_delimiter = ',', value_name = "LIST")]
    pub dt_ratio: Option<Vec<f64>>,
    /// Initial answer population, instead of a temperature.
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Evolution time between measurements.
    #[arg(long)]
    pub t: Option<f64>,
    /// Constraint branch for `optimize`.
    #[arg(long)]
    pub branch: Option<u32>,
    /// Number of measurements (the maximum for fig2).
    #[arg(long = "M", value_name = "M")]
    pub m: Option<u32>,
    #[arg(long = "P-target", value_name = "P")]
    pub p_target: Option<f64>,
    /// Level splittings for fig4, comma separated.
    #[arg(long = "r", value_delimiter = ',', value_name = "LIST")]
    pub r: Option<Vec<f64>>,
    /// 1 for the swap protocol, 2 for fixed parameters.
    #[arg(long)]
    pub strategy: Option<u8>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub delta2: Option<f64>,
    #[arg(long)]
    pub j1: Option<u32>,
    #[arg(long)]
    pub j2: Option<u32>,
    /// Answer state index for the dense simulator.
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dense simulator size for verify.
    #[arg(long = "n", value_name = "N")]
    pub fullsim_n: Option<usize>,
    /// Random cases per verify check.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> ExperimentConfig {
        ExperimentConfig {
            n_states: self.n_states,
            dt_ratio: self.dt_ratio.clone().map(config::OneOrMany::Many),
            p0: self.p0,
            gamma: self.gamma,
            delta: self.delta,
            t: self.t,
            branch: self.branch,
            m_max: self.m,
            strategy: self.strategy,
            delta1: self.delta1,
            delta2: self.delta2,
            j1: self.j1,
            j2: self.j2,
            r_grid: self.r.clone().map(config::OneOrMany::Many),
            trials: self.trials,
            seed: self.seed,
            fullsim_n: self.fullsim_n,
            cases: self.cases,
            w: self.w,
            p_target: self.p_target,
            output_path: self.out.clone(),
        }
    }

    /// The config file, if any, overlaid with these flags.
    pub fn resolve(&self) -> Result<ExperimentConfig, config::ConfigError> {
        let file = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        Ok(file.merge(self.overrides()))
    }
}

fn execute(command: &Command, cfg: &ExperimentConfig) -> Result<CommandOutput, CommandError> {
    match command {
        Command::Optimize(_) => commands::optimize(cfg),
        Command::Fig2(_) => commands::fig2(cfg),
        Command::Fig4(_) => commands::fig4(cfg),
        Command::Strategy1(_) => commands::strategy1(cfg),
        Command::Trajectory(_) => commands::trajectory(cfg),
        Command::Verify(_) => commands::verify(cfg),
    }
}

fn emit(
    command: &Command,
    cfg: &ExperimentConfig,
    out: &CommandOutput,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CommandError> {
    let csv = out.table.to_csv()?;
    match &cfg.output_path {
        Some(path) => {
            output::write_atomic(path, &csv)?;
            // optimize always shows its result
            if matches!(command, Command::Optimize(_)) {
                stdout.write_all(&csv)?;
            }
        }
        None => stdout.write_all(&csv)?,
    }
    for line in &out.notes {
        writeln!(stderr, "{line}")?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = cli
        .command
        .flags()
        .resolve()
        .map_err(CommandError::from)
        .and_then(|cfg| {
            let out = execute(&cli.command, &cfg)?;
            emit(&cli.command, &cfg, &out, stdout, stderr)?;
            Ok(out.success)
        });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
