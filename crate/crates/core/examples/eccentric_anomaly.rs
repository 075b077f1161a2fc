//! In the eccentric-anomaly clock the Kepler position obeys a forced
//! harmonic oscillator. Prints the residual of that equation.

use std::f64::consts::PI;

use jmlift::dynamics::{IntegratorConfig, OrbitalElements};
use jmlift::transforms::{anomaly_system, lrl_vector};

fn main() -> jmlift::Result<()> {
    for e in [0.0, 0.5, 0.9] {
        let (spec, s0) = OrbitalElements::new(1.0, e).initial_state(1.0, 1.0, 2)?;
        let run = anomaly_system(&spec, &s0, (0.0, 2.0 * PI), &IntegratorConfig::rk4(1e-3))?;
        let a = lrl_vector(&spec, &s0)?;
        println!(
            "e = {e}: eps = {:.4}, |A| = {:.4}, {} samples, oscillator residual {:.3e}",
            run.epsilon,
            a.norm(),
            run.trajectory.len(),
            run.max_residual()
        );
    }
    Ok(())
}
