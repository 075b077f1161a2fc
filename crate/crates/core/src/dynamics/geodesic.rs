use serde::{Deserialize, Serialize};

use super::hamiltonian::{ClockRate, HamiltonianSystem};
use super::integrate::{integrate, IntegratorConfig};
use super::reparam::{reparameterize, Direction};
use super::state::{PhaseState, Trajectory};
use crate::geometry::SystemSpec;
use crate::interp::HermiteCurve;
use crate::{Error, Result, Vector};

/// Largest `|H - E|` that [`project_to_energy_surface`] will repair.
pub const SURFACE_PROJECTION_TOL: f64 = 1e-8;

/// Rescales `p` so that `H(x, p) = E` exactly. Refuses states further than
/// [`SURFACE_PROJECTION_TOL`] from the surface.
pub fn project_to_energy_surface(spec: &SystemSpec, s: &PhaseState) -> Result<PhaseState> {
    let margin = spec.hill_margin(&s.x)?;
    let residual = spec.hamiltonian(&s.x, &s.p) - spec.energy;
    if residual.abs() > SURFACE_PROJECTION_TOL {
        return Err(Error::EnergySurfaceViolation { residual: residual.abs(), tolerance: SURFACE_PROJECTION_TOL });
    }
    let mut out = s.clone();
    if residual != 0.0 {
        let target = 2.0 * spec.mass * margin;
        out.p *= (target / s.p.norm_squared()).sqrt();
    }
    Ok(out)
}

/// Jacobi geodesic through `s0`: Hamilton's equations of
/// `H̃ = |p|² / 2m(E - U)` integrated in `σ` over `sigma_span`, with physical
/// time filled in by quadrature of `dt = dσ / (E - U)`.
pub fn jm_geodesic(
    spec: &SystemSpec,
    s0: &PhaseState,
    sigma_span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let start = project_to_energy_surface(spec, s0)?;
    let start = PhaseState { sigma: Some(sigma_span.0), t: Some(s0.t.unwrap_or(0.0)), ..start };
    let geodesic = integrate(&HamiltonianSystem::Jacobi(*spec), &start, sigma_span, config)?;
    let mut out = reparameterize(&geodesic, &ClockRate::Maupertuis(*spec), Direction::SigmaToTime)?;
    out.samples[0].t = start.t;
    Ok(out)
}

/// Natural flow of `spec` integrated in the parameter of `clock`, with
/// physical time recovered by quadrature.
pub fn integrate_rescaled(
    spec: &SystemSpec,
    clock: &ClockRate,
    s0: &PhaseState,
    span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let sys = HamiltonianSystem::TimeRescaled { spec: *spec, clock: *clock };
    let start = PhaseState { t: Some(s0.t.unwrap_or(0.0)), ..s0.clone() };
    let traj = integrate(&sys, &start, span, config)?;
    reparameterize(&traj, clock, Direction::SigmaToTime)
}

/// Pointwise comparison of two trajectories of the same system on a shared
/// uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub max_position_deviation: f64,
    pub max_momentum_deviation: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub grid_points: usize,
}

impl Equivalence {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_position_deviation < tolerance
    }
}

/// Cubic Hermite interpolant of `x(t)` with slope `dx/dt = p/m`.
fn position_curve(traj: &Trajectory, mass: f64) -> Result<(HermiteCurve, HermiteCurve)> {
    let times = traj
        .times()
        .ok_or_else(|| Error::InvalidArgument("trajectory lacks physical time".into()))?;
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("physical time is not strictly increasing".into()));
    }
    let xs = traj.positions();
    let ps = traj.momenta();
    let slopes: Vec<Vector> = ps.iter().map(|p| p / mass).collect();
    let spec = traj.spec.ok_or_else(|| Error::InvalidArgument("trajectory has no system".into()))?;
    let forces: Vec<Vector> = xs.iter().map(|x| -spec.potential.gradient(x)).collect();
    Ok((HermiteCurve::new(times.clone(), xs, slopes), HermiteCurve::new(times, ps, forces)))
}

/// Interpolates both trajectories onto `grid_points` uniform times covering
/// their common interval and reports the largest deviations.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory, grid_points: usize) -> Result<Equivalence> {
    let spec = a.spec.or(b.spec).ok_or_else(|| Error::InvalidArgument("no system attached".into()))?;
    let (xa, pa) = position_curve(a, spec.mass)?;
    let (xb, pb) = position_curve(b, spec.mass)?;
    let t0 = xa.domain().0.max(xb.domain().0);
    let t1 = xa.domain().1.min(xb.domain().1);
    if !(t1 > t0) || grid_points < 2 {
        return Err(Error::InvalidArgument("trajectories share no time interval".into()));
    }
    let mut dx: f64 = 0.0;
    let mut dp: f64 = 0.0;
    for i in 0..grid_points {
        let t = t0 + (t1 - t0) * i as f64 / (grid_points - 1) as f64;
        let t = t.min(t1);
        let (ya, yb) = (xa.eval(t).unwrap(), xb.eval(t).unwrap());
        dx = dx.max((ya - yb).norm());
        let (qa, qb) = (pa.eval(t).unwrap(), pb.eval(t).unwrap());
        dp = dp.max((qa - qb).norm());
    }
    Ok(Equivalence {
        max_position_deviation: dx,
        max_momentum_deviation: dp,
        t_start: t0,
        t_end: t1,
        grid_points,
    })
}

/// Settings for [`newtonian_vs_geodesic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub newtonian: IntegratorConfig,
    pub geodesic: IntegratorConfig,
    pub grid_points: usize,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            newtonian: IntegratorConfig::rkf45(1e-13).with_max_step(1e-2),
            geodesic: IntegratorConfig::implicit_midpoint(2e-5),
            grid_points: 2001,
        }
    }
}

/// Runs the Newtonian flow over `[0, t_end]` and the Jacobi geodesic through
/// the same initial state, maps the geodesic to physical time and compares
/// positions on a shared grid.
pub fn newtonian_vs_geodesic(
    spec: &SystemSpec,
    s0: &PhaseState,
    t_end: f64,
    config: &ComparisonConfig,
) -> Result<(Equivalence, Trajectory, Trajectory)> {
    if !(spec.energy < 0.0) && spec.alpha().is_some() {
        return Err(Error::PositiveEnergy { energy: spec.energy });
    }
    let s0 = project_to_energy_surface(spec, s0)?;
    let newton = integrate(&HamiltonianSystem::Natural(*spec), &s0, (0.0, t_end), &config.newtonian)?;
    let (eq, newton, geodesic) = geodesic_against_reference(spec, &newton, config)?;
    Ok((eq, newton, geodesic))
}

/// Compares a physical-time `reference` trajectory with the Jacobi geodesic
/// through its first sample. The returned reference carries `σ` clocks.
pub fn geodesic_against_reference(
    spec: &SystemSpec,
    reference: &Trajectory,
    config: &ComparisonConfig,
) -> Result<(Equivalence, Trajectory, Trajectory)> {
    let mut newton = reparameterize(reference, &ClockRate::Maupertuis(*spec), Direction::TimeToSigma)?;
    newton.spec = Some(*spec);
    // σ needed to reach the end of the reference, padded so the geodesic covers it
    let sigma_end = newton.last().sigma.unwrap_or(0.0) - newton.first().sigma.unwrap_or(0.0);
    let pad = 4.0 * config.geodesic.step + 1e-3 * sigma_end.abs();
    let s0 = PhaseState { sigma: Some(0.0), ..newton.first().clone() };
    let geodesic = jm_geodesic(spec, &s0, (0.0, sigma_end + pad), &config.geodesic)?;
    let eq = compare_trajectories(&newton, &geodesic, config.grid_points)?;
    Ok((eq, newton, geodesic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::OrbitalElements;

    #[test]
    fn projection_repairs_small_defects_only() {
        let spec = SystemSpec::kepler(1.0, -0.5, 2).unwrap();
        let s = PhaseState::new(&[1.0, 0.0], &[0.0, 1.0 + 1e-9]).unwrap();
        let fixed = project_to_energy_surface(&spec, &s).unwrap();
        assert!((spec.hamiltonian(&fixed.x, &fixed.p) + 0.5).abs() < 1e-15);
        let s = PhaseState::new(&[1.0, 0.0], &[0.0, 1.1]).unwrap();
        assert!(matches!(
            project_to_energy_surface(&spec, &s),
            Err(Error::EnergySurfaceViolation { .. })
        ));
        let s = PhaseState::new(&[2.5, 0.0], &[0.0, 0.0]).unwrap();
        assert!(matches!(
            project_to_energy_surface(&spec, &s),
            Err(Error::HillBoundaryViolation { .. })
        ));
    }

    #[test]
    fn circular_geodesic_keeps_unit_hamiltonian() {
        let (spec, s0) = OrbitalElements::new(1.0, 0.0).initial_state(1.0, 1.0, 2).unwrap();
        let g = jm_geodesic(&spec, &s0, (0.0, 1.0), &IntegratorConfig::implicit_midpoint(1e-3)).unwrap();
        let sys = HamiltonianSystem::Jacobi(spec);
        for s in &g.samples {
            assert!((sys.value(&s.x, &s.p).unwrap() - 1.0).abs() < 1e-9);
        }
        // Λ = 1/2 on the circle, so t = 2σ up to the O(h²) midpoint error
        let t = g.last().t.unwrap();
        assert!((t - 2.0).abs() < 1e-5, "{t}");
    }

    #[test]
    fn circular_orbits_agree() {
        let (spec, s0) = OrbitalElements::new(1.0, 0.0).initial_state(1.0, 1.0, 2).unwrap();
        let cfg = ComparisonConfig {
            geodesic: IntegratorConfig::implicit_midpoint(2e-4),
            ..ComparisonConfig::default()
        };
        let (eq, _, _) = newtonian_vs_geodesic(&spec, &s0, 1.0, &cfg).unwrap();
        assert!(eq.max_position_deviation < 1e-7, "{eq:?}");
        assert!((eq.t_end - 1.0).abs() < 1e-12);
    }
}
