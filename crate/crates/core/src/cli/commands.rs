use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{Format, ScenarioConfig};
use super::sweep::{bohlin_sweep, houri_sweep, moser_sweep, SweepResult};
use super::table::{read_trajectory_csv, trajectory_table, Cell, Table};
use crate::dynamics::{
    geodesic_against_reference, integrate, integrate_rescaled, jm_geodesic, newtonian_vs_geodesic,
    reparameterize, ClockRate, ComparisonConfig, Direction, HamiltonianSystem, IntegratorConfig,
    Parameter, PhaseState, Trajectory,
};
use crate::geometry::{curvature_report, SystemSpec};
use crate::invariants::{evaluate_with, DiagnosticsOptions, DiagnosticsReport, Verdict};
use crate::transforms::{
    anomaly_epsilon, anomaly_system, bohlin_hamiltonian_map, bohlin_trajectory, houri_hamiltonian,
    houri_swap, kepler_level, milnor_check, milnor_states, moser_flow, moser_quantities,
    MilnorReport, TransformKind,
};
use crate::{Error, Result};

/// Where and how a command writes its files.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
    pub stride: usize,
}

impl Output {
    pub fn new(dir: impl Into<PathBuf>, format: Format, stride: usize) -> Self {
        Output { dir: dir.into(), format, stride: stride.max(1) }
    }

    /// Writes through a temporary file in the target directory, then renames.
    pub fn write_atomic(&self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| Error::Io(format!("{}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(contents)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &Value) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        self.write_atomic(name, text.as_bytes())
    }

    /// `stem.csv` or `stem.json` depending on the format.
    pub fn write_table(&self, stem: &str, table: &Table) -> Result<PathBuf> {
        match self.format {
            Format::Csv => self.write_atomic(&format!("{stem}.csv"), table.to_csv().as_bytes()),
            Format::Json => self.write_json(&format!("{stem}.json"), &table.to_json()),
        }
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

/// Integrates `s0` in the requested parameter.
pub fn run_parameter(
    spec: &SystemSpec,
    s0: &PhaseState,
    parameter: Parameter,
    span: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    match parameter {
        Parameter::Time => integrate(&HamiltonianSystem::Natural(*spec), s0, (0.0, span), config),
        Parameter::Sigma => jm_geodesic(spec, s0, (0.0, span), config),
        Parameter::Anomaly => {
            let clock = ClockRate::EccentricAnomaly { epsilon: anomaly_epsilon(spec)? };
            integrate_rescaled(spec, &clock, s0, (0.0, span), config)
        }
        Parameter::Tau => moser_flow(spec, s0, (0.0, span), config),
    }
}

fn diagnostics_json(command: &str, traj: &Trajectory, report: &DiagnosticsReport) -> Value {
    json!({
        "command": command,
        "parameter": traj.parameter.as_str(),
        "hamiltonian": traj.hamiltonian.as_str(),
        "method": traj.config.map(|c| c.method.as_str()),
        "samples": traj.len(),
        "passed": report.passes(),
        "quantities": report.drifts,
    })
}

fn drift_summary(report: &DiagnosticsReport) -> Vec<String> {
    report
        .drifts
        .iter()
        .map(|d| {
            format!(
                "{:<10} max_drift={:.3e} rel_drift={:.3e} {}",
                d.name, d.max_drift, d.rel_drift, d.verdict
            )
        })
        .collect()
}

/// Writes the trajectory and its diagnostics; the drift verdicts decide the outcome.
pub fn cmd_integrate(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let (spec, s0) = cfg.scenario()?;
    let parameter = cfg.integrator_section()?.parameter;
    let traj = run_parameter(&spec, &s0, parameter, cfg.span(&spec)?, &cfg.integrator()?)?;
    let traj = traj.thinned(out.stride);
    let options = DiagnosticsOptions { tolerances: cfg.diagnostics, ..Default::default() };
    let report = evaluate_with(&spec, &traj, &options)?;
    let files = vec![
        out.write_table("trajectory", &trajectory_table(&traj, &report))?,
        out.write_json("diagnostics.json", &diagnostics_json("integrate", &traj, &report))?,
    ];
    Ok(Outcome { passed: report.passes(), files, summary: drift_summary(&report) })
}

/// Newtonian run (or a reference CSV) against the Jacobi geodesic.
pub fn cmd_compare(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let (spec, s0) = cfg.scenario()?;
    spec.require_alpha()?;
    if !(spec.energy < 0.0) {
        return Err(Error::PositiveEnergy { energy: spec.energy });
    }
    let section = &cfg.compare;
    let mut cc = ComparisonConfig::default();
    if let Some(n) = section.grid_points {
        cc.grid_points = n;
    }
    if let Some(h) = section.geodesic_step {
        cc.geodesic = IntegratorConfig::implicit_midpoint(h);
    }
    if let Some(tol) = section.newtonian_tolerance {
        cc.newtonian.tolerance = tol;
    }
    let (eq, newton, geodesic) = match &section.reference {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut reference = read_trajectory_csv(&text, Parameter::Time)?.trajectory;
            reference.spec = Some(spec);
            geodesic_against_reference(&spec, &reference, &cc)?
        }
        None => {
            let t_end = if cfg.integrator.is_some() {
                if cfg.integrator_section()?.parameter != Parameter::Time {
                    return Err(Error::Config("compare runs in physical time; set integrator.parameter = \"t\"".into()));
                }
                cfg.span(&spec)?
            } else {
                let alpha = spec.require_alpha()?;
                crate::dynamics::OrbitalElements::new(-alpha / (2.0 * spec.energy), 0.0).period(alpha, spec.mass)
            };
            newtonian_vs_geodesic(&spec, &s0, t_end, &cc)?
        }
    };
    let passed = eq.passes(section.tolerance);
    let verdict = if passed { Verdict::Pass } else { Verdict::Fail };
    let options = DiagnosticsOptions { tolerances: cfg.diagnostics, ..Default::default() };
    let newton = newton.thinned(out.stride);
    let geodesic = geodesic.thinned(out.stride);
    let newton_report = evaluate_with(&spec, &newton, &options)?;
    let geodesic_report = evaluate_with(&spec, &geodesic, &options)?;
    let report = json!({
        "command": "compare",
        "max_position_deviation": eq.max_position_deviation,
        "max_momentum_deviation": eq.max_momentum_deviation,
        "t_start": eq.t_start,
        "t_end": eq.t_end,
        "grid_points": eq.grid_points,
        "tolerance": section.tolerance,
        "verdict": verdict,
    });
    let files = vec![
        out.write_json("equivalence.json", &report)?,
        out.write_table("newtonian", &trajectory_table(&newton, &newton_report))?,
        out.write_table("geodesic", &trajectory_table(&geodesic, &geodesic_report))?,
        out.write_json("newtonian-diagnostics.json", &diagnostics_json("compare", &newton, &newton_report))?,
        out.write_json("geodesic-diagnostics.json", &diagnostics_json("compare", &geodesic, &geodesic_report))?,
    ];
    let summary = vec![format!(
        "max position deviation {:.3e} over t in [{}, {}] (tolerance {:.1e}) {verdict}",
        eq.max_position_deviation, eq.t_start, eq.t_end, section.tolerance
    )];
    Ok(Outcome { passed, files, summary })
}

/// Transformed samples with one residual per sample.
struct Mapped {
    table: Table,
    residuals: Vec<Option<f64>>,
    extra: Vec<(&'static str, f64, f64)>,
}

fn mapped_header(dim: usize) -> Vec<String> {
    let mut h: Vec<String> = ["param", "t", "sigma"].iter().map(|s| s.to_string()).collect();
    h.extend((1..=dim).map(|i| format!("X{i}")));
    h.extend((1..=dim).map(|i| format!("P{i}")));
    h.push("residual".into());
    h
}

fn mapped_row(param: f64, s: &PhaseState, x: &crate::Vector, p: &crate::Vector, residual: Option<f64>) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![param.into(), s.t.into(), s.sigma.into()];
    row.extend(x.iter().map(|&c| Cell::Num(c)));
    row.extend(p.iter().map(|&c| Cell::Num(c)));
    row.push(residual.into());
    row
}

fn default_tolerance(kind: TransformKind) -> f64 {
    match kind {
        TransformKind::Bohlin => 1e-8,
        TransformKind::Houri => 1e-8,
        TransformKind::Milnor => 1e-5,
        TransformKind::Moser => 1e-10,
        TransformKind::Anomaly => 1e-5,
    }
}

fn time_run(cfg: &ScenarioConfig, spec: &SystemSpec, s0: &PhaseState) -> Result<Trajectory> {
    let section = cfg.integrator_section()?;
    if section.parameter != Parameter::Time {
        return Err(Error::Config("this transform maps a physical-time run; set integrator.parameter = \"t\"".into()));
    }
    run_parameter(spec, s0, Parameter::Time, cfg.span(spec)?, &cfg.integrator()?)
}

fn map_samples(spec: &SystemSpec, kind: TransformKind, cfg: &ScenarioConfig, s0: &PhaseState) -> Result<Mapped> {
    let dim = spec.dim;
    let mut table = Table::new(mapped_header(dim));
    let mut residuals = Vec::new();
    let mut extra = Vec::new();
    match kind {
        TransformKind::Bohlin => {
            bohlin_hamiltonian_map(spec)?;
            let traj = time_run(cfg, spec, s0)?;
            for (i, (img, s)) in bohlin_trajectory(&traj)?.iter().zip(&traj.samples).enumerate() {
                let r = kepler_level(spec, &s.x, &s.p).map_err(|e| e.at_sample(i))?.abs();
                table.push(mapped_row(traj.param[i], s, &img.z, &img.momentum, Some(r)));
                residuals.push(Some(r));
            }
        }
        TransformKind::Houri => {
            let alpha = spec.require_alpha()?;
            let traj = time_run(cfg, spec, s0)?;
            for (i, s) in traj.samples.iter().enumerate() {
                let swapped = houri_swap(s);
                let r = (houri_hamiltonian(spec, &swapped) - alpha * alpha).abs() / (alpha * alpha);
                table.push(mapped_row(traj.param[i], s, &swapped.x, &swapped.p, Some(r)));
                residuals.push(Some(r));
            }
        }
        TransformKind::Moser => {
            let beta = spec.require_alpha()?;
            let traj = time_run(cfg, spec, s0)?;
            let traj = reparameterize(&traj, &ClockRate::Moser { beta }, Direction::TimeToSigma)?;
            for (i, s) in traj.samples.iter().enumerate() {
                let r = (moser_quantities(spec, s).map_err(|e| e.at_sample(i))?.f - 0.5).abs();
                table.push(mapped_row(traj.param[i], s, &s.x, &s.p, Some(r)));
                residuals.push(Some(r));
            }
        }
        TransformKind::Milnor => {
            let section = cfg.integrator_section()?;
            let span = match (section.span, section.periods) {
                (Some(span), None) => span,
                // one revolution takes σ = 2π/ε on the Levi-Civita clock
                (None, Some(n)) => n * 2.0 * std::f64::consts::PI / anomaly_epsilon(spec)?,
                _ => return Err(Error::Config("integrator needs exactly one of span or periods".into())),
            };
            let traj = integrate_rescaled(spec, &ClockRate::LeviCivita, s0, (0.0, span), &cfg.integrator()?)?;
            let report = milnor_check(spec, &traj)?;
            let states = milnor_states(&traj, spec.energy)?;
            let mut by_index = vec![None; traj.len()];
            for ((i, st), r) in states.iter().zip(&report.speed) {
                by_index[*i] = Some((st.w.clone(), st.w_prime.clone(), *r));
            }
            for (i, s) in traj.samples.iter().enumerate() {
                match &by_index[i] {
                    Some((w, wp, r)) => {
                        table.push(mapped_row(traj.param[i], s, w, wp, Some(*r)));
                        residuals.push(Some(*r));
                    }
                    None => residuals.push(None),
                }
            }
            extra.push(("momentum_rate", MilnorReport::max(&report.momentum_rate), 1e-6));
            extra.push(("reconstruction", MilnorReport::max(&report.reconstruction), 1e-4));
            extra.push(("radius", MilnorReport::max(&report.radius), 1e-6));
        }
        TransformKind::Anomaly => {
            let section = cfg.integrator_section()?;
            let span = match (section.span, section.periods) {
                (Some(span), None) => span,
                (None, Some(n)) => n * 2.0 * std::f64::consts::PI,
                _ => return Err(Error::Config("integrator needs exactly one of span or periods".into())),
            };
            let run = anomaly_system(spec, s0, (0.0, span), &cfg.integrator()?)?;
            let traj = &run.trajectory;
            for (i, s) in traj.samples.iter().enumerate() {
                let r = if i == 0 || i + 1 == traj.len() { None } else { Some(run.residuals[i - 1]) };
                table.push(mapped_row(traj.param[i], s, &s.x, &s.p, r));
                residuals.push(r);
            }
        }
    }
    Ok(Mapped { table, residuals, extra })
}

/// Maps each sample of a run and reports the residual of the transform's identity.
pub fn cmd_transform(cfg: &ScenarioConfig, out: &Output, seed: u64) -> Result<Outcome> {
    let section = cfg
        .transform
        .as_ref()
        .ok_or_else(|| Error::Config("missing [transform] section".into()))?;
    let kind = section.kind;
    let tolerance = section.tolerance.unwrap_or_else(|| default_tolerance(kind));
    let (spec, s0) = cfg.scenario()?;
    let mapped = map_samples(&spec, kind, cfg, &s0)?;
    let max_residual = mapped.residuals.iter().flatten().copied().fold(0.0, f64::max);
    let sweeps: Vec<SweepResult> = match (kind, section.sweep) {
        (_, 0) => Vec::new(),
        (TransformKind::Bohlin, n) => bohlin_sweep(n, seed)?,
        (TransformKind::Houri, n) => houri_sweep(&spec, n, seed)?,
        (TransformKind::Moser, n) => moser_sweep(&spec, n, seed)?,
        (other, _) => {
            return Err(Error::Config(format!("no pointwise sweep is defined for {}", other.as_str())))
        }
    };
    let passed = max_residual < tolerance
        && mapped.extra.iter().all(|(_, v, tol)| v < tol)
        && sweeps.iter().all(|s| s.passed);
    let extra: serde_json::Map<String, Value> = mapped
        .extra
        .iter()
        .map(|(k, v, tol)| (k.to_string(), json!({ "max": v, "tolerance": tol })))
        .collect();
    let report = json!({
        "command": "transform",
        "transform": kind.as_str(),
        "samples": mapped.residuals.len(),
        "max_residual": max_residual,
        "tolerance": tolerance,
        "extra": extra,
        "sweeps": sweeps,
        "verdict": if passed { Verdict::Pass } else { Verdict::Fail },
    });
    let files = vec![
        out.write_table("transformed", &thin_table(mapped.table, out.stride))?,
        out.write_json("residuals.json", &report)?,
    ];
    let mut summary = vec![format!("{} max residual {max_residual:.3e} (tolerance {tolerance:.1e})", kind.as_str())];
    summary.extend(mapped.extra.iter().map(|(k, v, tol)| format!("{k} max {v:.3e} (tolerance {tol:.1e})")));
    summary.extend(sweeps.iter().map(|s| {
        format!("sweep {} over {} points: max {:.3e} (tolerance {:.1e})", s.identity, s.points, s.max_residual, s.tolerance)
    }));
    Ok(Outcome { passed, files, summary })
}

fn thin_table(table: Table, stride: usize) -> Table {
    let n = table.rows.len();
    Table {
        header: table.header,
        rows: table
            .rows
            .into_iter()
            .enumerate()
            .filter(|(i, _)| i % stride == 0 || *i + 1 == n)
            .map(|(_, r)| r)
            .collect(),
    }
}

/// Curvature of the Jacobi metric on a radius grid. Rows beyond the Hill
/// boundary are flagged and leave the curvature empty.
pub fn cmd_curvature(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let spec = if cfg.initial.is_some() { cfg.scenario()?.0 } else { cfg.system_only()? };
    spec.require_alpha()?;
    let mut table = Table::new(vec!["r".into(), "K_G".into(), "class".into(), "status".into()]);
    let mut flagged = 0;
    let mut class = None;
    for r in cfg.radii()? {
        match curvature_report(&spec, r) {
            Ok(rep) => {
                class = Some(rep.class);
                table.push(vec![r.into(), rep.curvature.into(), Cell::Text(rep.class.to_string()), Cell::Text("ok".into())]);
            }
            Err(Error::HillBoundaryViolation { .. }) => {
                flagged += 1;
                let c = crate::geometry::classify_orbit(&spec)?;
                table.push(vec![r.into(), Cell::Empty, Cell::Text(c.to_string()), Cell::Text("beyond-hill".into())]);
            }
            Err(e) => return Err(e),
        }
    }
    let files = vec![out.write_table("curvature", &table)?];
    let class = class.map_or_else(|| "none".to_string(), |c| c.to_string());
    let summary = vec![format!(
        "E = {} class {class}: {} rows, {flagged} beyond the Hill boundary",
        spec.energy,
        table.rows.len()
    )];
    Ok(Outcome { passed: true, files, summary })
}

/// Resolves the output directory: command line first, then the scenario file.
pub fn output_for(cfg: &ScenarioConfig, out: Option<&Path>, format: Option<Format>) -> Output {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.path.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Output::new(dir, format.unwrap_or(cfg.output.format), cfg.output.stride)
}
