//! Moser's regularization: the Kepler flow on a negative energy level is a
//! reparameterized geodesic flow on the sphere. Runs it in the new clock
//! and lines it up with the Newtonian orbit in physical time.

use jmlift::dynamics::{integrate, HamiltonianSystem, IntegratorConfig, OrbitalElements};
use jmlift::transforms::{moser_flow_equivalence, moser_quantities, moser_time_alignment};

fn main() -> jmlift::Result<()> {
    let elements = OrbitalElements::new(1.0, 0.6);
    let (spec, s0) = elements.initial_state(1.0, 1.0, 2)?;
    let m = moser_quantities(&spec, &s0)?;
    println!("Y(H) = {:.6}, H0 = {:.3e}, F = {:.15}", m.y, m.h0, m.f);
    println!("flow equivalence residual {:.3e}", moser_flow_equivalence(&spec, &s0)?);

    let reference = integrate(
        &HamiltonianSystem::Natural(spec),
        &s0,
        (0.0, elements.period(1.0, 1.0)),
        &IntegratorConfig::rkf45(1e-13).with_max_step(1e-2),
    )?;
    let (eq, moser) = moser_time_alignment(&spec, &reference, &IntegratorConfig::rk4(1e-4), 2001)?;
    println!("{} regularized samples", moser.len());
    println!("deviation from the Newtonian orbit {:.3e}", eq.max_position_deviation);
    Ok(())
}
