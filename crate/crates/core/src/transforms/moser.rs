use serde::{Deserialize, Serialize};

use super::unit_mass_kepler;
use crate::dynamics::{
    compare_trajectories, integrate, reparameterize, ClockRate, Direction, Equivalence,
    HamiltonianSystem, IntegratorConfig, PhaseState, Trajectory, ORIGIN_FLOOR,
};
use crate::geometry::SystemSpec;
use crate::{Error, Result};

/// Largest `|H - E|` at which the Moser identities are evaluated.
pub const SURFACE_TOL: f64 = 1e-10;

/// Moser data at one phase point of the unit-mass Kepler problem
/// `H = |p|²/2 - β/|q|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserData {
    /// Liouville derivative `Y(H) = Σ qᵢ ∂H/∂qᵢ = β/|q|`.
    pub y: f64,
    /// `H₀ = (H - E)/Y = (|p|² - 2E)|q|/2β - 1`
    pub h0: f64,
    /// `F = (H₀ + 1)²/2 = (|p|² - 2E)² |q|² / 8β²`
    pub f: f64,
    pub beta: f64,
}

pub fn moser_quantities(spec: &SystemSpec, s: &PhaseState) -> Result<MoserData> {
    let beta = unit_mass_kepler(spec)?;
    let r = s.x.norm();
    if r < ORIGIN_FLOOR {
        return Err(Error::OriginSingularity { norm: r });
    }
    let u = s.p.norm_squared() - 2.0 * spec.energy;
    Ok(MoserData {
        y: beta / r,
        h0: u * r / (2.0 * beta) - 1.0,
        f: u * u * r * r / (8.0 * beta * beta),
        beta,
    })
}

fn on_surface(spec: &SystemSpec, s: &PhaseState) -> Result<()> {
    let residual = (spec.hamiltonian(&s.x, &s.p) - spec.energy).abs();
    if residual > SURFACE_TOL {
        return Err(Error::EnergySurfaceViolation { residual, tolerance: SURFACE_TOL });
    }
    Ok(())
}

/// Largest component of `X_F - X_H / Y(H)` at a point of the surface `H = E`.
pub fn moser_flow_equivalence(spec: &SystemSpec, s: &PhaseState) -> Result<f64> {
    on_surface(spec, s)?;
    let data = moser_quantities(spec, s)?;
    let f = HamiltonianSystem::Moser { beta: data.beta, energy: spec.energy };
    let h = HamiltonianSystem::Natural(*spec);
    let (fx, fp) = f.flow(&s.x, &s.p)?;
    let (hx, hp) = h.flow(&s.x, &s.p)?;
    Ok((fx - hx / data.y).amax().max((fp - hp / data.y).amax()))
}

/// Flow of `F` in the fictitious time `τ` from a point of the surface, with
/// `t` recovered from `dτ/dt = β/|q|`.
pub fn moser_flow(
    spec: &SystemSpec,
    s0: &PhaseState,
    tau_span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let beta = unit_mass_kepler(spec)?;
    on_surface(spec, s0)?;
    let sys = HamiltonianSystem::Moser { beta, energy: spec.energy };
    let start = PhaseState { t: Some(s0.t.unwrap_or(0.0)), ..s0.clone() };
    let moser = integrate(&sys, &start, tau_span, config)?;
    let mut moser = reparameterize(&moser, &ClockRate::Moser { beta }, Direction::SigmaToTime)?;
    moser.spec = Some(*spec);
    Ok(moser)
}

/// Integrates `X_F` in `τ`, recovers `t` from `dτ/dt = β/|q|` and compares
/// the resulting path with the Newtonian trajectory `reference` on a shared
/// time grid.
pub fn moser_time_alignment(
    spec: &SystemSpec,
    reference: &Trajectory,
    config: &IntegratorConfig,
    grid_points: usize,
) -> Result<(Equivalence, Trajectory)> {
    let beta = unit_mass_kepler(spec)?;
    let s0 = reference.first();
    on_surface(spec, s0)?;
    let clock = ClockRate::Moser { beta };
    let with_tau = reparameterize(reference, &clock, Direction::TimeToSigma)?;
    let tau_end = with_tau.last().sigma.unwrap_or(0.0) - with_tau.first().sigma.unwrap_or(0.0);
    let pad = 4.0 * config.step + 1e-3 * tau_end;
    let moser = moser_flow(spec, s0, (0.0, tau_end + pad), config)?;
    let eq = compare_trajectories(reference, &moser, grid_points)?;
    Ok((eq, moser))
}
