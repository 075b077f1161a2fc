//! Drift of energy, angular momentum and the Runge-Lenz vector for each
//! integrator on a Kepler ellipse over ten periods.

use jmlift::dynamics::{integrate, HamiltonianSystem, IntegratorConfig, OrbitalElements};
use jmlift::invariants::evaluate_all;

fn main() -> jmlift::Result<()> {
    let elements = OrbitalElements::new(1.0, 0.5);
    let (spec, s0) = elements.initial_state(1.0, 1.0, 2)?;
    let span = (0.0, 10.0 * elements.period(1.0, 1.0));
    let configs = [
        ("rk4 h=1e-3", IntegratorConfig::rk4(1e-3)),
        ("verlet h=1e-3", IntegratorConfig::stormer_verlet(1e-3)),
        ("verlet h=5e-4", IntegratorConfig::stormer_verlet(5e-4)),
        ("midpoint h=1e-3", IntegratorConfig::implicit_midpoint(1e-3)),
        ("rkf45 tol=1e-12", IntegratorConfig::rkf45(1e-12)),
    ];
    println!("{:<16} {:>10} {:>10} {:>10}", "method", "H", "L", "A");
    for (name, cfg) in configs {
        let traj = integrate(&HamiltonianSystem::Natural(spec), &s0, span, &cfg)?;
        let rep = evaluate_all(&spec, &traj)?;
        let d = |q: &str| rep.drift(q).map_or(f64::NAN, |d| d.max_drift);
        println!("{name:<16} {:>10.3e} {:>10.3e} {:>10.3e}", d("H"), d("L"), d("A"));
    }
    Ok(())
}
