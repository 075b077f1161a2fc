//! Milnor's picture of the hodograph. In the Levi-Civita clock the momentum
//! moves at speed α/r, and its inversion traces a great circle.

use std::f64::consts::PI;

use jmlift::dynamics::{integrate_rescaled, ClockRate, IntegratorConfig, OrbitalElements};
use jmlift::transforms::{milnor_check, MilnorReport};

fn main() -> jmlift::Result<()> {
    let (spec, s0) = OrbitalElements::new(1.0, 0.3).initial_state(1.0, 1.0, 2)?;
    let span = 2.0 * PI / (-2.0 * spec.energy).sqrt();
    let traj = integrate_rescaled(&spec, &ClockRate::LeviCivita, &s0, (0.0, span), &IntegratorConfig::rk4(1e-4))?;
    let rep = milnor_check(&spec, &traj)?;
    println!("checked {} samples over sigma in [0, {span:.4}]", rep.indices.len());
    println!("momentum rate  {:.3e}", MilnorReport::max(&rep.momentum_rate));
    println!("speed identity {:.3e}", MilnorReport::max(&rep.speed));
    println!("reconstruction {:.3e}", MilnorReport::max(&rep.reconstruction));
    println!("radius         {:.3e}", MilnorReport::max(&rep.radius));
    Ok(())
}
