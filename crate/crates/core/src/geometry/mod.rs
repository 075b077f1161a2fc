//! Metrics, Christoffel symbols and Gaussian curvature.

mod curvature;
mod metric;
mod system;

pub use curvature::{
    classify_orbit, curvature_report, gaussian_curvature, kepler_curvature, CurvatureReport,
    OrbitClass, PARABOLA_TOL,
};
pub use metric::{
    christoffel, jm_lift, jm_lift_scaled, BaseMetric, Christoffel, ConformalFactor,
    ConformalMetric, RadialProfile,
};
pub use system::{Potential, SystemSpec, HILL_GUARD};
