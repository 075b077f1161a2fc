use std::fmt;

use serde::{Deserialize, Serialize};

use super::metric::ConformalMetric;
use super::system::SystemSpec;
use crate::{Error, Result};

/// Conic type of a Kepler orbit, read off the sign of the Jacobi curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitClass {
    Ellipse,
    Parabola,
    Hyperbola,
}

impl OrbitClass {
    /// Positive curvature is an ellipse, zero (within `tol`) a parabola.
    pub fn from_curvature(k: f64, tol: f64) -> Self {
        if k.abs() <= tol {
            OrbitClass::Parabola
        } else if k > 0.0 {
            OrbitClass::Ellipse
        } else {
            OrbitClass::Hyperbola
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitClass::Ellipse => "ellipse",
            OrbitClass::Parabola => "parabola",
            OrbitClass::Hyperbola => "hyperbola",
        }
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub radius: f64,
    pub curvature: f64,
    pub class: OrbitClass,
}

/// Energies with `|E| <= PARABOLA_TOL * alpha` count as parabolic.
pub const PARABOLA_TOL: f64 = 1e-12;

/// Gaussian curvature of a two-dimensional metric `f²(r) (dr² + r² dθ²)`,
///
/// `K = -1/(r f²) d/dr [ (r f)' / f ]`,
///
/// evaluated from the analytic radial derivatives of `Φ = f²`.
pub fn gaussian_curvature(metric: &ConformalMetric, r: f64) -> Result<f64> {
    if metric.dim != 2 {
        return Err(Error::InvalidArgument(format!(
            "gaussian curvature needs a 2-dimensional metric, got {}",
            metric.dim
        )));
    }
    if !(r > 0.0) {
        return Err(Error::OriginSingularity { norm: r });
    }
    let prof = metric.factor.profile(r)?;
    let f = prof.value.sqrt();
    let f1 = prof.d1 / (2.0 * f);
    let f2 = prof.d2 / (2.0 * f) - prof.d1 * prof.d1 / (4.0 * f * f * f);
    let inner = f1 / f + r * (f * f2 - f1 * f1) / (f * f);
    Ok(-inner / (r * f * f))
}

/// Closed-form curvature of `(E + alpha/r)(dr² + r² dθ²)`:
/// `K = -alpha E / (2 (r E + alpha)³)`.
pub fn kepler_curvature(alpha: f64, energy: f64, r: f64) -> f64 {
    let s = r * energy + alpha;
    -alpha * energy / (2.0 * s * s * s)
}

pub fn classify_orbit(spec: &SystemSpec) -> Result<OrbitClass> {
    let alpha = spec.require_alpha()?;
    let tol = PARABOLA_TOL * alpha;
    Ok(if spec.energy.abs() <= tol {
        OrbitClass::Parabola
    } else if spec.energy < 0.0 {
        OrbitClass::Ellipse
    } else {
        OrbitClass::Hyperbola
    })
}

/// Curvature and orbit class at radius `r` of a Kepler system.
pub fn curvature_report(spec: &SystemSpec, r: f64) -> Result<CurvatureReport> {
    let alpha = spec.require_alpha()?;
    spec.hill_margin_at_radius(r)?;
    let curvature = kepler_curvature(alpha, spec.energy, r);
    Ok(CurvatureReport { radius: r, curvature, class: classify_orbit(spec)? })
}
