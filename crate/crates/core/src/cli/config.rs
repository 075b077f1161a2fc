use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{IntegratorConfig, Method, OrbitalElements, Parameter, PhaseState, COLLISION_GUARD};
use crate::geometry::{Potential, SystemSpec};
use crate::invariants::Tolerances;
use crate::transforms::TransformKind;
use crate::{Error, Result, Vector};

/// Largest `|H(x₀, p₀) - E|` accepted when both a state and an energy are given.
pub const ENERGY_CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Kepler,
    Hooke,
    Free,
    PowerLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub family: Family,
    pub mass: f64,
    pub alpha: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub n: Option<f64>,
    /// Taken from the initial state when absent.
    pub energy: Option<f64>,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    2
}

/// Either an explicit phase point or Kepler elements (perihelion start).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub x: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub semi_major_axis: Option<f64>,
    pub eccentricity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub method: Method,
    pub step: f64,
    pub tolerance: Option<f64>,
    pub max_step: Option<f64>,
    pub collision_guard: Option<f64>,
    /// Length of the run in the chosen parameter.
    pub span: Option<f64>,
    /// Run length in orbital periods; bound Kepler orbits in `t` or `s` only.
    pub periods: Option<f64>,
    #[serde(default = "default_parameter")]
    pub parameter: Parameter,
}

fn default_parameter() -> Parameter {
    Parameter::Time
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    pub path: Option<PathBuf>,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    1
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { format: Format::Csv, path: None, stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    pub kind: TransformKind,
    /// Pass threshold on the per-sample residuals; a per-transform default otherwise.
    pub tolerance: Option<f64>,
    /// Number of random points for the pointwise identity sweep.
    #[serde(default)]
    pub sweep: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSection {
    pub radii: Option<Vec<f64>>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(default = "default_compare_tol")]
    pub tolerance: f64,
    pub grid_points: Option<usize>,
    /// Step of the implicit-midpoint geodesic run.
    pub geodesic_step: Option<f64>,
    /// Tolerance of the adaptive Newtonian run.
    pub newtonian_tolerance: Option<f64>,
    /// A physical-time trajectory CSV used instead of a fresh Newtonian run.
    pub reference: Option<PathBuf>,
}

fn default_compare_tol() -> f64 {
    1e-6
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            tolerance: default_compare_tol(),
            grid_points: None,
            geodesic_step: None,
            newtonian_tolerance: None,
            reference: None,
        }
    }
}

/// A complete scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemSection,
    pub initial: Option<InitialSection>,
    pub integrator: Option<IntegratorSection>,
    #[serde(default)]
    pub output: OutputSection,
    pub transform: Option<TransformSection>,
    pub curvature: Option<CurvatureSection>,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub diagnostics: Tolerances,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn potential(&self) -> Result<Potential> {
        let s = &self.system;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("system.{name} is required for family {:?}", s.family)))
        };
        let allowed: &[&str] = match s.family {
            Family::Kepler => &["alpha"],
            Family::Hooke => &["a", "b"],
            Family::Free => &[],
            Family::PowerLaw => &["c", "n"],
        };
        for (name, v) in [("alpha", s.alpha), ("a", s.a), ("b", s.b), ("c", s.c), ("n", s.n)] {
            if v.is_some() && !allowed.contains(&name) {
                return Err(Error::Config(format!("system.{name} does not belong to family {:?}", s.family)));
            }
        }
        Ok(match s.family {
            Family::Kepler => Potential::Kepler { alpha: need(s.alpha, "alpha")? },
            Family::Hooke => Potential::Hooke { a: need(s.a, "a")?, b: s.b.unwrap_or(0.0) },
            Family::Free => Potential::free(),
            Family::PowerLaw => Potential::PowerLaw { c: need(s.c, "c")?, n: need(s.n, "n")? },
        })
    }

    /// The system without an initial state: `system.energy` is required.
    pub fn system_only(&self) -> Result<SystemSpec> {
        let energy = self
            .system
            .energy
            .ok_or_else(|| Error::Config("system.energy is required without an initial state".into()))?;
        SystemSpec::new(self.system.mass, self.potential()?, energy, self.system.dim)
    }

    /// System and initial state. A declared energy must lie on the Hill-allowed
    /// side of `x₀` and agree with `H(x₀, p₀)` within [`ENERGY_CONSISTENCY_TOL`].
    pub fn scenario(&self) -> Result<(SystemSpec, PhaseState)> {
        let init = self
            .initial
            .as_ref()
            .ok_or_else(|| Error::Config("missing [initial] section".into()))?;
        let potential = self.potential()?;
        let dim = self.system.dim;
        let (spec, state) = match (&init.x, &init.p, init.semi_major_axis, init.eccentricity) {
            (Some(x), Some(p), None, None) => {
                if x.len() != dim || p.len() != dim {
                    return Err(Error::Config(format!("initial.x and initial.p must have {dim} components")));
                }
                let state = PhaseState::from_vectors(Vector::from_column_slice(x), Vector::from_column_slice(p))?;
                let provisional = SystemSpec::new(self.system.mass, potential, 0.0, dim)?;
                let h = provisional.hamiltonian(&state.x, &state.p);
                (provisional.with_energy(self.system.energy.unwrap_or(h)), state)
            }
            (None, None, Some(a), Some(e)) => {
                let alpha = match potential {
                    Potential::Kepler { alpha } => alpha,
                    _ => return Err(Error::Config("orbital elements need the kepler family".into())),
                };
                OrbitalElements::new(a, e).initial_state(alpha, self.system.mass, dim)?
            }
            _ => {
                return Err(Error::Config(
                    "[initial] needs either x and p, or semi_major_axis and eccentricity".into(),
                ))
            }
        };
        if let Some(energy) = self.system.energy {
            let declared = spec.with_energy(energy);
            declared.hill_margin(&state.x)?;
            let residual = (declared.hamiltonian(&state.x, &state.p) - energy).abs();
            if residual > ENERGY_CONSISTENCY_TOL {
                return Err(Error::EnergySurfaceViolation { residual, tolerance: ENERGY_CONSISTENCY_TOL });
            }
            return Ok((declared, state));
        }
        Ok((spec, state))
    }

    pub fn integrator_section(&self) -> Result<&IntegratorSection> {
        self.integrator
            .as_ref()
            .ok_or_else(|| Error::Config("missing [integrator] section".into()))
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let s = self.integrator_section()?;
        let mut cfg = IntegratorConfig::new(s.method, s.step);
        if let Some(tol) = s.tolerance {
            cfg.tolerance = tol;
        }
        cfg.max_step = s.max_step;
        cfg.collision_guard = s.collision_guard.unwrap_or(COLLISION_GUARD);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Run length in the configured parameter.
    pub fn span(&self, spec: &SystemSpec) -> Result<f64> {
        let s = self.integrator_section()?;
        let span = match (s.span, s.periods) {
            (Some(span), None) => span,
            (None, Some(n)) => {
                let alpha = spec.require_alpha()?;
                if !(spec.energy < 0.0) {
                    return Err(Error::PositiveEnergy { energy: spec.energy });
                }
                let a = -alpha / (2.0 * spec.energy);
                match s.parameter {
                    Parameter::Time => n * OrbitalElements::new(a, 0.0).period(alpha, spec.mass),
                    Parameter::Anomaly => n * 2.0 * std::f64::consts::PI,
                    other => {
                        return Err(Error::Config(format!(
                            "integrator.periods is not defined for parameter {}; give span",
                            other.as_str()
                        )))
                    }
                }
            }
            _ => return Err(Error::Config("integrator needs exactly one of span or periods".into())),
        };
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::Config(format!("integrator span must be positive, got {span}")));
        }
        Ok(span)
    }

    /// Radii of the curvature table.
    pub fn radii(&self) -> Result<Vec<f64>> {
        let c = self
            .curvature
            .as_ref()
            .ok_or_else(|| Error::Config("missing [curvature] section".into()))?;
        let radii = match (&c.radii, c.r_min, c.r_max, c.points) {
            (Some(r), None, None, None) => r.clone(),
            (None, Some(lo), Some(hi), Some(n)) if n >= 2 && hi > lo => {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
            _ => {
                return Err(Error::Config(
                    "[curvature] needs radii, or r_min < r_max with points >= 2".into(),
                ))
            }
        };
        if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Config("curvature radii must be positive".into()));
        }
        Ok(radii)
    }
}
