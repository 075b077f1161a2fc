//! Scenario files, CSV/JSON emission and the `jmlift` command line.
//!
//! Exit codes: [`EXIT_PASS`] when every verdict passes, [`EXIT_VERDICT`] when
//! a drift, equivalence or residual verdict fails, [`EXIT_ERROR`] on usage,
//! configuration or runtime errors.

mod commands;
mod config;
pub mod sweep;
mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_compare, cmd_curvature, cmd_integrate, cmd_transform, output_for, run_parameter, Outcome, Output,
};
pub use config::{
    CompareSection, CurvatureSection, Family, Format, InitialSection, IntegratorSection, OutputSection,
    ScenarioConfig, SystemSection, TransformSection, ENERGY_CONSISTENCY_TOL,
};
pub use table::{
    format_float, read_trajectory_csv, trajectory_header, trajectory_table, Cell, CsvTrajectory, Table,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "jmlift", version, about = "Jacobi-Maupertuis geodesics and Kepler transformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a scenario and report conserved-quantity drift.
    Integrate(CommonArgs),
    /// Compare the Newtonian flow with the Jacobi geodesic in physical time.
    Compare(CommonArgs),
    /// Map a run through a canonical transformation and check its identity.
    Transform(CommonArgs),
    /// Tabulate the Gaussian curvature of the Jacobi metric on a radius grid.
    Curvature(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trajectory and table format; overrides `output.format`.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Seed for random-point identity sweeps; overrides `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(format!("unknown format {other:?}, expected csv or json")),
    }
}

/// Runs one parsed command.
pub fn execute(command: &Command) -> crate::Result<Outcome> {
    let (name, args) = match command {
        Command::Integrate(a) => ("integrate", a),
        Command::Compare(a) => ("compare", a),
        Command::Transform(a) => ("transform", a),
        Command::Curvature(a) => ("curvature", a),
    };
    let cfg = ScenarioConfig::load(&args.config)?;
    let out = output_for(&cfg, args.out.as_deref(), args.format);
    match name {
        "integrate" => cmd_integrate(&cfg, &out),
        "compare" => cmd_compare(&cfg, &out),
        "transform" => cmd_transform(&cfg, &out, args.seed.or(cfg.seed).unwrap_or(0)),
        _ => cmd_curvature(&cfg, &out),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                EXIT_PASS
            } else {
                println!("verdict: fail");
                EXIT_VERDICT
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
