//! Swapping positions and momenta turns the Kepler problem into motion on a
//! constant-curvature space. Checks the swapped level and the
//! quasi-Hamiltonian form of the inverted flow at a few random points.

use jmlift::cli::sweep::{houri_sweep, random_unit, rng};
use jmlift::geometry::SystemSpec;
use jmlift::transforms::{houri_flow_field, onto_unit_level, quasi_hamiltonian_residual};

fn main() -> jmlift::Result<()> {
    let spec = SystemSpec::kepler(1.0, -0.5, 3)?;
    let k = -2.0 * spec.energy;
    let mut r = rng(7);
    for _ in 0..3 {
        let x = random_unit(&mut r, 3) * 0.8;
        let s = onto_unit_level(k, &x, &random_unit(&mut r, 3))?;
        let flow = houri_flow_field(k, &s)?;
        println!(
            "|x| = {:.2}  H~ = {:.15}  residual {:.3e}",
            s.x.norm(),
            flow.hamiltonian,
            quasi_hamiltonian_residual(k, &s)?
        );
    }
    for sweep in houri_sweep(&spec, 100, 7)? {
        println!("{}: {} points, max {:.3e}, passed {}", sweep.identity, sweep.points, sweep.max_residual, sweep.passed);
    }
    Ok(())
}
