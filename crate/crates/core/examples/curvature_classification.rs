//! Gaussian curvature of the planar Kepler Jacobi metric. Its sign tells
//! ellipse, parabola and hyperbola apart.

use jmlift::geometry::{classify_orbit, curvature_report, gaussian_curvature, jm_lift_scaled, kepler_curvature};
use jmlift::geometry::{ConformalMetric, SystemSpec};

fn main() -> jmlift::Result<()> {
    for energy in [-0.5, 0.0, 0.5] {
        let spec = SystemSpec::kepler(1.0, energy, 2)?;
        let metric = jm_lift_scaled(&spec, &ConformalMetric::polar(), 1.0)?;
        println!("E = {energy:+}: {}", classify_orbit(&spec)?.as_str());
        for r in [0.5, 1.0, 1.5] {
            let general = gaussian_curvature(&metric, r)?;
            let closed = kepler_curvature(1.0, energy, r);
            let rep = curvature_report(&spec, r)?;
            println!("  r = {r:.1}  K = {general:+.6e}  closed form {closed:+.6e}  {}", rep.class.as_str());
        }
    }
    Ok(())
}
