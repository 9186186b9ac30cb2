//! Command-line front end: simulations, method comparisons, conservation
//! reports and the logic-machine demonstrations.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 solver failure,
//! 4 logic failure.

pub mod config;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::dissipation::integrate_dissipative;
use crate::error::Error;
use crate::logic::{
    cnot_truth_table, default_gate_drive, parity_check, parse_bits, Bit, LogicConfig,
};
use crate::observables::{conservation_monitor, to_f_frame_trajectory};
use crate::propagators::{
    default_magnus_grid, f_frame_solution, integrate_reference, magnus_trajectory, uniform_times,
    MagnusOrder, Trajectory,
};
use crate::weinorman::{consistency_residual, wn_propagator, wn_solve};

pub use config::{Format, Method, RunConfig};
use output::{write_compare, write_conservation, write_trajectory, write_weinorman, CompareEntry};

/// Detuning ratio above which Magnus results are flagged as unreliable.
pub const MAGNUS_RATIO_WARNING: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("solver failure: {0}")]
    Solver(Error),
    #[error("logic failure: {0}")]
    Logic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Logic(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::ModeMismatch(_) => CliError::Config(e.to_string()),
            Error::GateFailure { .. } => CliError::Logic(e.to_string()),
            other => CliError::Solver(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bloch",
    version,
    about = "Two-level coherence-vector dynamics and threshold logic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate the initial state with the configured method.
    Simulate { config: PathBuf },
    /// Deviations of magnus1 and magnus3 from the reference integration.
    Compare { config: PathBuf },
    /// Drift of the F-frame lengths along the reference trajectory.
    Constants { config: PathBuf },
    /// Wei-Norman parameters and their consistency residual.
    Weinorman { config: PathBuf },
    /// Threshold-logic gates built from pulsed two-level systems.
    #[command(subcommand)]
    Logic(LogicCommand),
}

#[derive(Debug, Subcommand)]
pub enum LogicCommand {
    /// Realized CNOT truth table.
    Cnot {
        #[arg(long)]
        area: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Serial parity checker over a string of bits.
    Parity {
        bits: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Executes a parsed command line. Data goes to the configured output path
/// or to `out`; warnings and summaries go to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate { config } => simulate(&RunConfig::from_file(config)?, out, err),
        Command::Compare { config } => compare(&RunConfig::from_file(config)?, out, err),
        Command::Constants { config } => constants(&RunConfig::from_file(config)?, out, err),
        Command::Weinorman { config } => weinorman(&RunConfig::from_file(config)?, out),
        Command::Logic(LogicCommand::Cnot { area, config }) => {
            logic_cnot(*area, config.as_deref(), out)
        }
        Command::Logic(LogicCommand::Parity { bits, config }) => {
            logic_parity(bits, config.as_deref(), out)
        }
    }
}

fn with_sink(
    path: Option<&Path>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(
                std::fs::File::create(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            );
            body(&mut file)?;
            file.flush()?;
        }
        None => body(out)?,
    }
    Ok(())
}

fn warn_ratio(cfg: &RunConfig, err: &mut dyn Write) -> Result<(), CliError> {
    let r = cfg.drive.detuning_ratio();
    if r > MAGNUS_RATIO_WARNING {
        writeln!(
            err,
            "warning: |Delta0/Omega0| = {r} exceeds {MAGNUS_RATIO_WARNING}; Magnus results may be inaccurate"
        )?;
    }
    Ok(())
}

/// The trajectory produced by the configured method.
pub fn trajectory(cfg: &RunConfig) -> Result<Trajectory<f64>, CliError> {
    let times = uniform_times(&cfg.drive, cfg.samples);
    Ok(match cfg.method {
        Method::Reference => match cfg.active_relax() {
            Some(rates) => {
                integrate_dissipative(&cfg.drive, rates, &cfg.initial, cfg.tol)?.sample(&times)
            }
            None => integrate_reference(&cfg.drive, &cfg.initial, cfg.tol)?.sample(&times),
        },
        Method::Magnus1 | Method::Magnus3 => {
            let order = if cfg.method == Method::Magnus1 {
                MagnusOrder::First
            } else {
                MagnusOrder::Third
            };
            magnus_trajectory(
                &cfg.drive,
                &cfg.initial,
                order,
                cfg.samples,
                default_magnus_grid()?,
            )?
        }
        Method::WeiNorman => wn_solve(&cfg.drive, &times, cfg.tol)
            .map_err(Error::from)?
            .into_iter()
            .map(|(t, y)| Ok((t, wn_propagator(&y)?.apply(&cfg.initial))))
            .collect::<Result<_, Error>>()?,
        Method::FFrame => f_frame_solution(&cfg.drive, &cfg.initial, &times)?,
    })
}

pub fn simulate(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if cfg.method.is_magnus() {
        warn_ratio(cfg, err)?;
    }
    let traj = trajectory(cfg)?;
    with_sink(cfg.output.as_deref(), out, |w| {
        write_trajectory(w, cfg.format, &traj)
    })
}

pub fn compare(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    warn_ratio(cfg, err)?;
    if cfg.active_relax().is_some() {
        return Err(CliError::Config(
            "compare does not support relaxation".into(),
        ));
    }
    let grid = default_magnus_grid()?;
    let reference = integrate_reference(&cfg.drive, &cfg.initial, cfg.tol)?;
    let mut entries = Vec::new();
    for (method, order) in [
        (Method::Magnus1, MagnusOrder::First),
        (Method::Magnus3, MagnusOrder::Third),
    ] {
        let traj = magnus_trajectory(&cfg.drive, &cfg.initial, order, cfg.samples, grid)?;
        let devs: Vec<f64> = traj
            .iter()
            .map(|(t, g)| g.max_abs_diff(&reference.at(*t)))
            .collect();
        entries.push(CompareEntry {
            method: method.name(),
            max_deviation: devs.iter().copied().fold(0.0, f64::max),
            endpoint_deviation: *devs.last().expect("at least two samples"),
        });
    }
    with_sink(cfg.output.as_deref(), out, |w| {
        write_compare(w, cfg.format, cfg.drive.detuning_ratio(), grid, &entries)
    })
}

pub fn constants(
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let traj = {
        let plain = RunConfig {
            method: Method::Reference,
            ..cfg.clone()
        };
        trajectory(&plain)?
    };
    let frame = to_f_frame_trajectory(&cfg.drive, &traj)?;
    let report = conservation_monitor(&frame);
    writeln!(
        err,
        "drift F1^2 = {:e}, F2^2+F3^2 = {:e}, total = {:e}",
        report.drift_c1, report.drift_c23, report.drift_total
    )?;
    with_sink(cfg.output.as_deref(), out, |w| {
        write_conservation(w, cfg.format, &frame, &report)
    })
}

pub fn weinorman(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let times = uniform_times(&cfg.drive, cfg.samples);
    let (params, failure) = match wn_solve(&cfg.drive, &times, cfg.tol) {
        Ok(p) => (p, None),
        Err(e) => (e.partial, Some(e.error)),
    };
    let rows = params
        .iter()
        .map(|(t, y)| {
            let (om, de) = cfg.drive.drive_at(*t)?;
            Ok((*t, *y, consistency_residual(y, om, de)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    with_sink(cfg.output.as_deref(), out, |w| {
        write_weinorman(w, cfg.format, &rows)
    })?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

struct LogicSetup {
    logic: LogicConfig<f64>,
    drive: crate::drive::DriveConfig<f64>,
    rates: Option<crate::dissipation::RelaxationRates<f64>>,
}

fn logic_setup(config: Option<&Path>) -> Result<LogicSetup, CliError> {
    let (logic, drive, rates) = match config {
        Some(p) => RunConfig::logic_from_file(p)?,
        None => (LogicConfig::default(), None, None),
    };
    Ok(LogicSetup {
        logic,
        drive: drive.unwrap_or_else(default_gate_drive),
        rates,
    })
}

pub fn logic_cnot(
    area: Option<f64>,
    config: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut setup = logic_setup(config)?;
    if let Some(a) = area {
        setup.logic.gate_pulse_area = a;
        setup.logic.validate()?;
    }
    let rows = cnot_truth_table(&setup.logic, &setup.drive, setup.rates.as_ref())?;
    writeln!(
        out,
        "pulse initial | coherence final | rho00 rho11 C | expected match"
    )?;
    for r in &rows {
        let fb = r
            .readout
            .final_bit
            .map_or_else(|| "?".to_string(), |b| b.to_string());
        writeln!(
            out,
            "{} {} | {} {} | {:.6} {:.6} {:.6} | {}{} {}",
            r.pulse,
            r.initial,
            r.readout.coherence_bit,
            fb,
            r.readout.rho00,
            r.readout.rho11,
            r.readout.coherence,
            r.expected.0,
            r.expected.1,
            if r.matches() { "yes" } else { "no" }
        )?;
    }
    let matched = rows.iter().filter(|r| r.matches()).count();
    writeln!(out, "{matched}/{} rows match", rows.len())?;
    if let Some(r) = rows.iter().find(|r| r.readout.is_indeterminate()) {
        return Err(CliError::Logic(format!(
            "gate failure at pulse {} initial {}: rho00 = {}, rho11 = {}, coherence = {}",
            r.pulse, r.initial, r.readout.rho00, r.readout.rho11, r.readout.coherence
        )));
    }
    if matched != rows.len() {
        return Err(CliError::Logic(format!(
            "{} of {} rows differ from the truth table",
            rows.len() - matched,
            rows.len()
        )));
    }
    Ok(())
}

pub fn logic_parity(
    bits: &str,
    config: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let bits = parse_bits(bits.trim()).map_err(|e| CliError::Config(e.to_string()))?;
    if bits.is_empty() || bits.len() > 64 {
        return Err(CliError::Config(format!(
            "parity needs 1 to 64 bits, got {}",
            bits.len()
        )));
    }
    let setup = logic_setup(config)?;
    let (parity, machine) = parity_check(&bits, &setup.logic, &setup.drive, setup.rates.as_ref())?;
    writeln!(out, "PS In | NS Out | rho00 rho11 C | match")?;
    for r in &machine.transcript {
        writeln!(
            out,
            "{} {} | {} {} | {:.6} {:.6} {:.6} | {}",
            r.present,
            r.input,
            r.next,
            r.output,
            r.rho00,
            r.rho11,
            r.coherence,
            if r.matches_table() { "yes" } else { "no" }
        )?;
    }
    let xor = bits.iter().fold(Bit::Zero, |acc, &b| acc ^ b);
    writeln!(out, "parity = {parity}")?;
    if !machine.all_rows_match() || parity != xor {
        return Err(CliError::Logic(
            "parity transcript differs from the transition table".into(),
        ));
    }
    Ok(())
}
