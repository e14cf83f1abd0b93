//! Scenario-driven front end for the `a2a-core` path-loss model.
//!
//! Settings are resolved flag > scenario file > default.

pub mod error;
pub mod scenario;
pub mod sweeps;
pub mod table;
pub mod validate;

use std::path::PathBuf;

use a2a_core::{Execution, MaxHeightMode, Preset};
use clap::{Args, Parser, Subcommand};

pub use error::CliError;
pub use scenario::{EnvironmentSpec, Format, Scenario};
pub use sweeps::{run_pathloss_sweep, run_plf, run_plos_sweep, PlfReport};
pub use table::{Cell, Table};
pub use validate::{run_validate, Report, Status};

#[derive(Debug, Parser)]
#[command(
    name = "a2a",
    version,
    about = "Air-to-air mmWave path loss over built-up areas"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// LOS probability along one swept axis.
    Plos(Common),
    /// Total, LOS, NLOS and reference path losses along one swept axis.
    Pathloss(Common),
    /// Path-loss fluctuation statistics per beam wobble level.
    Plf(Common),
    /// Check every closed form against its oracle; exit 1 on failure.
    Validate(Common),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output file for the PLF CDF table.
    #[arg(long)]
    pub cdf_out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Use the printed (non-integral) max-height sum.
    #[arg(long)]
    pub literal_max_height: bool,
    /// Run Monte Carlo chunks on one thread.
    #[arg(long)]
    pub serial: bool,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: a2a_core::ModelError| e.to_string())
}

impl Common {
    /// Loads the scenario file (or defaults) and applies flag overrides.
    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let mut s = match &self.scenario {
            Some(path) => Scenario::from_path(path)?,
            None => Scenario::default(),
        };
        if let Some(out) = &self.out {
            s.output.path = Some(out.clone());
        }
        if let Some(out) = &self.cdf_out {
            s.output.cdf_path = Some(out.clone());
        }
        if let Some(format) = self.format {
            s.output.format = format;
        }
        if let Some(seed) = self.seed {
            s.mc.seed = seed;
        }
        if let Some(trials) = self.trials {
            s.mc.trials = trials;
        }
        if let Some(preset) = self.preset {
            s.environment = EnvironmentSpec::Preset(preset);
        }
        if self.literal_max_height {
            s.pathloss.max_height = MaxHeightMode::Literal;
        }
        if self.serial {
            s.mc.execution = Execution::Serial;
        }
        s.validate()?;
        Ok(s)
    }
}

/// Process exit status for a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ValidationFailed,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ValidationFailed => 1,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (common, command) = match &cli.command {
        Command::Plos(c) => (c, "plos"),
        Command::Pathloss(c) => (c, "pathloss"),
        Command::Plf(c) => (c, "plf"),
        Command::Validate(c) => (c, "validate"),
    };
    let s = common.resolve()?;
    let format = s.output.format;
    let out = s.output.path.as_deref();
    match command {
        "plos" => run_plos_sweep(&s)?.emit(format, out)?,
        "pathloss" => run_pathloss_sweep(&s)?.emit(format, out)?,
        "plf" => {
            let report = run_plf(&s)?;
            report.summary.emit(format, out)?;
            if let Some(path) = s.output.cdf_path.as_deref() {
                report.cdf.emit(format, Some(path))?;
            }
        }
        _ => {
            let report = run_validate(&s)?;
            report.table().emit(format, out)?;
            if report.status() == Status::Fail {
                eprintln!("validation failed: {}", report.failing().join(", "));
                return Ok(Outcome::ValidationFailed);
            }
        }
    }
    Ok(Outcome::Success)
}
