//! Integrates a Kepler ellipse twice, once with Newton's equations in time
//! and once as a geodesic of the Jacobi metric in arc length, then maps the
//! geodesic back to time and compares the two paths.

use jmlift::dynamics::{newtonian_vs_geodesic, ComparisonConfig, OrbitalElements};
use jmlift::invariants::evaluate_all;

fn main() -> jmlift::Result<()> {
    let elements = OrbitalElements::new(1.0, 0.5);
    let (spec, s0) = elements.initial_state(1.0, 1.0, 2)?;
    let period = elements.period(1.0, 1.0);

    let (eq, newton, geodesic) = newtonian_vs_geodesic(&spec, &s0, period, &ComparisonConfig::default())?;
    println!("one period T = {period:.6}, E = {}", spec.energy);
    println!("newtonian samples {}, geodesic samples {}", newton.len(), geodesic.len());
    println!("max position deviation {:.3e}", eq.max_position_deviation);
    println!("max momentum deviation {:.3e}", eq.max_momentum_deviation);

    let report = evaluate_all(&spec, &geodesic)?;
    for d in &report.drifts {
        println!("{:>8}: drift {:.3e} ({:?})", d.name, d.max_drift, d.verdict);
    }
    Ok(())
}
