//! Maps an isotropic oscillator orbit through the complex squaring map. The
//! image lies on a Kepler orbit of zero energy in the squared plane.

use jmlift::dynamics::{integrate, HamiltonianSystem, IntegratorConfig, PhaseState};
use jmlift::geometry::SystemSpec;
use jmlift::transforms::{bohlin_hamiltonian_map, bohlin_identity_residual, bohlin_trajectory, kepler_level};

fn main() -> jmlift::Result<()> {
    // H = |p|²/2 + |q|² - 2 at zero energy
    let osc = SystemSpec::hooke(2.0, 2.0, 0.0, 2)?;
    let s0 = PhaseState::new(&[1.0, 0.5], &[0.6, (1.5f64 - 0.36).sqrt()])?;
    let traj = integrate(
        &HamiltonianSystem::Natural(osc),
        &s0,
        (0.0, 10.0),
        &IntegratorConfig::rkf45(1e-12).with_max_step(1e-2),
    )?;
    let kepler = bohlin_hamiltonian_map(&osc)?;
    println!("image system: {:?}", kepler.potential);

    let images = bohlin_trajectory(&traj)?;
    let mut level: f64 = 0.0;
    let mut identity: f64 = 0.0;
    for s in &traj.samples {
        level = level.max(kepler_level(&osc, &s.x, &s.p)?.abs());
        identity = identity.max(bohlin_identity_residual(&s.x, &s.p)?);
    }
    let last = images.last().unwrap();
    println!("{} samples, last image z = ({:.6}, {:.6})", images.len(), last.z[0], last.z[1]);
    println!("max |Kepler level| {level:.3e}, max identity residual {identity:.3e}");
    Ok(())
}
