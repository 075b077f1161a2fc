use serde::{Deserialize, Serialize};

use super::hamiltonian::HamiltonianLabel;
use super::integrate::IntegratorConfig;
use crate::geometry::{Potential, SystemSpec};
use crate::{Error, Result, Vector};

/// A point of phase space with its physical time `t` and rescaled parameter
/// `σ`. Either clock is `None` until it has been assigned.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub x: Vector,
    pub p: Vector,
    pub t: Option<f64>,
    pub sigma: Option<f64>,
}

impl PhaseState {
    /// State at `t = 0` with no `σ` assigned.
    pub fn new(x: &[f64], p: &[f64]) -> Result<Self> {
        Self::from_vectors(crate::vector(x), crate::vector(p))
    }

    pub fn from_vectors(x: Vector, p: Vector) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::InvalidArgument(format!(
                "position has {} components but momentum has {}",
                x.len(),
                p.len()
            )));
        }
        if x.len() != 2 && x.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "phase states must have 2 or 3 dimensions, got {}",
                x.len()
            )));
        }
        Ok(PhaseState { x, p, t: Some(0.0), sigma: None })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn with_clocks(mut self, t: Option<f64>, sigma: Option<f64>) -> Self {
        self.t = t;
        self.sigma = sigma;
        self
    }

    /// Planar angular momentum `x¹p₂ - x²p₁`; the third component in 3-D.
    pub fn angular_momentum_z(&self) -> f64 {
        self.x[0] * self.p[1] - self.x[1] * self.p[0]
    }

    /// Angular momentum: one component in 2-D, three in 3-D.
    pub fn angular_momentum(&self) -> Vector {
        if self.dim() == 2 {
            crate::vector(&[self.angular_momentum_z()])
        } else {
            self.x.cross(&self.p)
        }
    }
}

/// The parameter a trajectory was integrated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parameter {
    /// physical time `t`
    #[serde(rename = "t")]
    Time,
    /// rescaled time `σ` (Jacobi or Levi-Civita)
    #[serde(rename = "sigma")]
    Sigma,
    /// eccentric anomaly `s`
    #[serde(rename = "s")]
    Anomaly,
    /// Moser fictitious time `τ`
    #[serde(rename = "tau")]
    Tau,
}

impl Parameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parameter::Time => "t",
            Parameter::Sigma => "sigma",
            Parameter::Anomaly => "s",
            Parameter::Tau => "tau",
        }
    }
}

/// Ordered samples of an integrated flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    /// Value of the integration parameter at each sample.
    pub param: Vec<f64>,
    pub parameter: Parameter,
    pub hamiltonian: HamiltonianLabel,
    /// Integrator settings, absent for trajectories read from files.
    pub config: Option<IntegratorConfig>,
    pub spec: Option<SystemSpec>,
}

impl Trajectory {
    /// Bare trajectory with no integrator metadata.
    pub fn from_samples(samples: Vec<PhaseState>, param: Vec<f64>, parameter: Parameter) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("trajectory needs at least one sample".into()));
        }
        if samples.len() != param.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples but {} parameter values",
                samples.len(),
                param.len()
            )));
        }
        Ok(Trajectory {
            samples,
            param,
            parameter,
            hamiltonian: HamiltonianLabel::Custom,
            config: None,
            spec: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &PhaseState {
        &self.samples[0]
    }

    pub fn last(&self) -> &PhaseState {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// Physical times, if every sample has one.
    pub fn times(&self) -> Option<Vec<f64>> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn sigmas(&self) -> Option<Vec<f64>> {
        self.samples.iter().map(|s| s.sigma).collect()
    }

    pub fn positions(&self) -> Vec<Vector> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }

    pub fn momenta(&self) -> Vec<Vector> {
        self.samples.iter().map(|s| s.p.clone()).collect()
    }

    /// Keeps every `stride`-th sample plus the last one.
    pub fn thinned(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        let n = self.len();
        let keep: Vec<usize> = (0..n).filter(|i| i % stride == 0 || *i == n - 1).collect();
        Trajectory {
            samples: keep.iter().map(|&i| self.samples[i].clone()).collect(),
            param: keep.iter().map(|&i| self.param[i]).collect(),
            ..self.clone()
        }
    }
}

/// Conic elements used to seed Kepler orbits at perihelion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    /// Negative for hyperbolae.
    pub semi_major_axis: f64,
    pub eccentricity: f64,
}

impl OrbitalElements {
    pub fn new(semi_major_axis: f64, eccentricity: f64) -> Self {
        OrbitalElements { semi_major_axis, eccentricity }
    }

    pub fn perihelion_distance(&self) -> f64 {
        self.semi_major_axis * (1.0 - self.eccentricity)
    }

    /// Energy `E = -alpha / 2a`.
    pub fn energy(&self, alpha: f64) -> f64 {
        -alpha / (2.0 * self.semi_major_axis)
    }

    /// Orbital period `2π sqrt(m a³ / alpha)` of a bound orbit.
    pub fn period(&self, alpha: f64, mass: f64) -> f64 {
        2.0 * std::f64::consts::PI * (mass * self.semi_major_axis.powi(3) / alpha).sqrt()
    }

    /// System and perihelion state `x = (a(1-e), 0)`, `p = (0, p_peri)` with
    /// `p_peri` from the vis-viva relation.
    pub fn initial_state(&self, alpha: f64, mass: f64, dim: usize) -> Result<(SystemSpec, PhaseState)> {
        let (a, e) = (self.semi_major_axis, self.eccentricity);
        if !(e >= 0.0) || e == 1.0 || !a.is_finite() || a == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "unsupported orbital elements a = {a}, e = {e}"
            )));
        }
        if (e < 1.0) != (a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "semi-major axis {a} inconsistent with eccentricity {e}"
            )));
        }
        let spec = SystemSpec::new(mass, Potential::Kepler { alpha }, self.energy(alpha), dim)?;
        let rp = self.perihelion_distance();
        let speed = (alpha / mass * (2.0 / rp - 1.0 / a)).sqrt();
        let mut x = Vector::zeros(dim);
        let mut p = Vector::zeros(dim);
        x[0] = rp;
        p[1] = mass * speed;
        Ok((spec, PhaseState::from_vectors(x, p)?))
    }
}
