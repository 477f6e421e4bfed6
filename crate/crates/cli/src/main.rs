//! `heatprobe`: probe spectroscopy of continuous quantum heat pumps.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heatprobe::lindblad::BathLabel;
use heatprobe::models::Grid;
use thiserror::Error;

use config::{parse_grid, resolve, Command, Format, Overrides, RunConfig};

const UNITS: &str = "\
Units: hbar = k_B = 1.
  Frequencies, energies and temperatures share one arbitrary unit.
  Heat currents (q_w, q_h, q_c), the entropy production rate
  sigma = -sum q/T and the scan throughput are written in units of the
  bath coupling gamma. The residual |L rho| is absolute.
  bias = p_g - p_e of the probe, bias_eq = tanh(omega / 2T), delta = bias - bias_eq,
  t_eff = omega / ln[(1 + bias) / (1 - bias)] (inf at zero bias).
  Positive q means heat flowing from the bath into the device.";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "heatprobe", version, about = "Probe spectroscopy of continuous quantum heat pumps")]
struct Cli {
    /// Print unit conventions and exit.
    #[arg(long)]
    units: bool,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Sweep the probe frequency at one interface (CSV by default).
    Scan(Common),
    /// Scan interfaces and classify the machine (JSON).
    Diagnose(Common),
    /// Heat currents and COP of the bare device over omega_c (CSV by default).
    Currents(Common),
    /// Weak-coupling validity checks (JSON).
    Validate(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Named parameter set, e.g. fig2a.
    #[arg(long)]
    preset: Option<String>,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Sweep as min:max:points.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    /// Interface to probe; repeat for several.
    #[arg(long, value_parser = parse_interface)]
    interface: Vec<BathLabel>,
    /// Exit with status 1 when validity checks fail.
    #[arg(long)]
    strict: bool,
}

fn parse_interface(s: &str) -> Result<BathLabel, String> {
    s.parse().map_err(|_| format!("unknown interface '{s}' (cold, hot or work)"))
}

fn run(command: Command, args: Common) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = Overrides {
        preset: args.preset,
        out: args.out,
        format: args.format,
        grid: args.grid,
        interfaces: args.interface,
        strict: args.strict,
    };
    let resolved = resolve(command, file, flags)?;
    let outcome = match command {
        Command::Scan => commands::cmd_scan(&resolved)?,
        Command::Diagnose => commands::cmd_diagnose(&resolved)?,
        Command::Currents => commands::cmd_currents(&resolved)?,
        Command::Validate => commands::cmd_validate(&resolved)?,
    };
    match &resolved.out {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => write_stdout(&outcome.text)?,
    }
    outcome.error.map_or(Ok(()), Err)
}

/// A closed downstream pipe (`| head`) is not an error.
fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Config(format!("cannot write output: {e}")))
        }
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.units {
        return match write_stdout(&format!("{UNITS}\n")) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => ExitCode::from(e.exit_code()),
        };
    }
    let Some(sub) = cli.command else {
        eprintln!("error: a subcommand is required (scan, diagnose, currents, validate); see --help");
        return ExitCode::from(2);
    };
    let (command, args) = match sub {
        Sub::Scan(a) => (Command::Scan, a),
        Sub::Diagnose(a) => (Command::Diagnose, a),
        Sub::Currents(a) => (Command::Currents, a),
        Sub::Validate(a) => (Command::Validate, a),
    };
    match run(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
