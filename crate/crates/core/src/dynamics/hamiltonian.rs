use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::state::{Parameter, PhaseState};
use crate::geometry::{Potential, SystemSpec};
use crate::numdiff;
use crate::{Error, Result, Vector};

/// Momentum norms below this are treated as zero.
pub const MOMENTUM_FLOOR: f64 = 1e-12;
/// Position norms below this are treated as the origin.
pub const ORIGIN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HamiltonianLabel {
    #[serde(rename = "newtonian-kepler")]
    NewtonianKepler,
    #[serde(rename = "newtonian-hooke")]
    NewtonianHooke,
    #[serde(rename = "jacobi-lifted")]
    JacobiLifted,
    #[serde(rename = "houri")]
    Houri,
    #[serde(rename = "moser-F")]
    MoserF,
    #[serde(rename = "regularized-G")]
    RegularizedG,
    #[serde(rename = "custom")]
    Custom,
}

impl HamiltonianLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            HamiltonianLabel::NewtonianKepler => "newtonian-kepler",
            HamiltonianLabel::NewtonianHooke => "newtonian-hooke",
            HamiltonianLabel::JacobiLifted => "jacobi-lifted",
            HamiltonianLabel::Houri => "houri",
            HamiltonianLabel::MoserF => "moser-F",
            HamiltonianLabel::RegularizedG => "regularized-G",
            HamiltonianLabel::Custom => "custom",
        }
    }
}

impl fmt::Display for HamiltonianLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Clock rates `dparam/dt` for Poincaré time transformations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClockRate {
    /// `dσ/dt = E - U(x)`
    Maupertuis(SystemSpec),
    /// `dσ/dt = 1/|x|`
    LeviCivita,
    /// `ds/dt = ε/|x|`
    EccentricAnomaly { epsilon: f64 },
    /// `dτ/dt = β/|q|`
    Moser { beta: f64 },
}

impl ClockRate {
    /// `dparam/dt` at position `x`.
    pub fn rate(&self, x: &Vector) -> Result<f64> {
        match self {
            ClockRate::Maupertuis(spec) => spec.hill_margin(x),
            ClockRate::LeviCivita => Ok(1.0 / checked_norm(x)?),
            ClockRate::EccentricAnomaly { epsilon } => Ok(epsilon / checked_norm(x)?),
            ClockRate::Moser { beta } => Ok(beta / checked_norm(x)?),
        }
    }

    /// `dt/dparam` and its gradient in `x`; used by time-rescaled flows.
    fn inverse_rate_with_gradient(&self, x: &Vector) -> Result<(f64, Vector)> {
        match self {
            ClockRate::Maupertuis(spec) => {
                let lam = spec.hill_margin(x)?;
                let grad = spec.potential.gradient(x) / (lam * lam);
                Ok((1.0 / lam, grad))
            }
            ClockRate::LeviCivita => {
                let r = checked_norm(x)?;
                Ok((r, x / r))
            }
            ClockRate::EccentricAnomaly { epsilon } => {
                let r = checked_norm(x)?;
                Ok((r / epsilon, x / (r * epsilon)))
            }
            ClockRate::Moser { beta } => {
                let r = checked_norm(x)?;
                Ok((r / beta, x / (r * beta)))
            }
        }
    }

    pub fn parameter(&self) -> Parameter {
        match self {
            ClockRate::Maupertuis(_) | ClockRate::LeviCivita => Parameter::Sigma,
            ClockRate::EccentricAnomaly { .. } => Parameter::Anomaly,
            ClockRate::Moser { .. } => Parameter::Tau,
        }
    }
}

fn checked_norm(x: &Vector) -> Result<f64> {
    let r = x.norm();
    if r < ORIGIN_FLOOR {
        return Err(Error::OriginSingularity { norm: r });
    }
    Ok(r)
}

fn checked_momentum(p: &Vector) -> Result<f64> {
    let n = p.norm();
    if n < MOMENTUM_FLOOR {
        return Err(Error::ZeroMomentum { norm: n });
    }
    Ok(n)
}

type ScalarFn = dyn Fn(&Vector, &Vector) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&Vector, &Vector) -> (Vector, Vector) + Send + Sync;

/// User-supplied Hamiltonian. Gradients fall back to central differences.
#[derive(Clone)]
pub struct CustomHamiltonian {
    pub value: Arc<ScalarFn>,
    pub gradient: Option<Arc<GradientFn>>,
    pub separable: bool,
}

impl fmt::Debug for CustomHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomHamiltonian")
            .field("analytic_gradient", &self.gradient.is_some())
            .field("separable", &self.separable)
            .finish()
    }
}

/// The Hamiltonians the engine integrates.
#[derive(Debug, Clone)]
pub enum HamiltonianSystem {
    /// `H = |p|²/2m + U(x)`
    Natural(SystemSpec),
    /// `H̃ = |p|² / (2m (E - U(x)))`, generating the Jacobi geodesic flow in `σ`.
    Jacobi(SystemSpec),
    /// `K = (dt/dparam)(x) · (H - E)`, the natural flow rescaled to a new clock.
    TimeRescaled { spec: SystemSpec, clock: ClockRate },
    /// `H̃ = (E - |x|²/2)² |p|²` in swapped coordinates.
    HouriSwapped { energy: f64 },
    /// `H̃ = ¼ (1 + k|x|²)² |p|²`
    HouriInverted { k: f64 },
    /// `F = (|p|² - 2E)² |q|² / 8β²`
    Moser { beta: f64, energy: f64 },
    /// `G̃ = (ε² + |x|²)|p| / 2ε - μ/ε` in swapped coordinates.
    RegularizedG { mu: f64, epsilon: f64 },
    Custom(CustomHamiltonian),
}

impl HamiltonianSystem {
    pub fn label(&self) -> HamiltonianLabel {
        match self {
            HamiltonianSystem::Natural(spec) => match spec.potential {
                Potential::Kepler { .. } => HamiltonianLabel::NewtonianKepler,
                Potential::Hooke { .. } => HamiltonianLabel::NewtonianHooke,
                Potential::PowerLaw { .. } => HamiltonianLabel::Custom,
            },
            HamiltonianSystem::Jacobi(_) => HamiltonianLabel::JacobiLifted,
            HamiltonianSystem::TimeRescaled { .. } => HamiltonianLabel::Custom,
            HamiltonianSystem::HouriSwapped { .. } | HamiltonianSystem::HouriInverted { .. } => {
                HamiltonianLabel::Houri
            }
            HamiltonianSystem::Moser { .. } => HamiltonianLabel::MoserF,
            HamiltonianSystem::RegularizedG { .. } => HamiltonianLabel::RegularizedG,
            HamiltonianSystem::Custom(_) => HamiltonianLabel::Custom,
        }
    }

    /// Flow parameter generated by this Hamiltonian.
    pub fn parameter(&self) -> Parameter {
        match self {
            HamiltonianSystem::Jacobi(_) => Parameter::Sigma,
            HamiltonianSystem::TimeRescaled { clock, .. } => clock.parameter(),
            HamiltonianSystem::Moser { .. } => Parameter::Tau,
            HamiltonianSystem::RegularizedG { .. } => Parameter::Anomaly,
            _ => Parameter::Time,
        }
    }

    /// The physical system behind the flow, when there is one.
    pub fn spec(&self) -> Option<SystemSpec> {
        match self {
            HamiltonianSystem::Natural(spec)
            | HamiltonianSystem::Jacobi(spec)
            | HamiltonianSystem::TimeRescaled { spec, .. } => Some(*spec),
            _ => None,
        }
    }

    /// `H = T(p) + V(x)` with `T` quadratic, as Störmer–Verlet requires.
    pub fn is_separable(&self) -> bool {
        match self {
            HamiltonianSystem::Natural(_) => true,
            HamiltonianSystem::Custom(c) => c.separable,
            _ => false,
        }
    }

    /// Vector whose norm the collision guard watches, or `None` for regular flows.
    pub fn guarded_vector<'v>(&self, x: &'v Vector, p: &'v Vector) -> Option<&'v Vector> {
        match self {
            HamiltonianSystem::Natural(spec)
            | HamiltonianSystem::Jacobi(spec)
            | HamiltonianSystem::TimeRescaled { spec, .. }
                if spec.potential.is_singular_at_origin() =>
            {
                Some(x)
            }
            HamiltonianSystem::TimeRescaled { .. } => Some(x),
            HamiltonianSystem::RegularizedG { .. } => Some(p),
            _ => None,
        }
    }

    /// Norm watched by the collision guard, or `None` for regular flows.
    pub fn guarded_radius(&self, x: &Vector, p: &Vector) -> Option<f64> {
        self.guarded_vector(x, p).map(|v| v.norm())
    }

    pub fn value(&self, x: &Vector, p: &Vector) -> Result<f64> {
        Ok(match self {
            HamiltonianSystem::Natural(spec) => spec.hamiltonian(x, p),
            HamiltonianSystem::Jacobi(spec) => {
                let lam = spec.hill_margin(x)?;
                p.norm_squared() / (2.0 * spec.mass * lam)
            }
            HamiltonianSystem::TimeRescaled { spec, clock } => {
                let (f, _) = clock.inverse_rate_with_gradient(x)?;
                f * (spec.hamiltonian(x, p) - spec.energy)
            }
            HamiltonianSystem::HouriSwapped { energy } => {
                let lam = energy - 0.5 * x.norm_squared();
                lam * lam * p.norm_squared()
            }
            HamiltonianSystem::HouriInverted { k } => {
                let c = 1.0 + k * x.norm_squared();
                0.25 * c * c * p.norm_squared()
            }
            HamiltonianSystem::Moser { beta, energy } => {
                let u = p.norm_squared() - 2.0 * energy;
                u * u * x.norm_squared() / (8.0 * beta * beta)
            }
            HamiltonianSystem::RegularizedG { mu, epsilon } => {
                (epsilon * epsilon + x.norm_squared()) * p.norm() / (2.0 * epsilon) - mu / epsilon
            }
            HamiltonianSystem::Custom(c) => (c.value)(x, p),
        })
    }

    /// `(∂H/∂x, ∂H/∂p)`
    pub fn gradients(&self, x: &Vector, p: &Vector) -> Result<(Vector, Vector)> {
        Ok(match self {
            HamiltonianSystem::Natural(spec) => (spec.potential.gradient(x), p / spec.mass),
            HamiltonianSystem::Jacobi(spec) => {
                let lam = spec.hill_margin(x)?;
                let m = spec.mass;
                let dx = spec.potential.gradient(x) * (p.norm_squared() / (2.0 * m * lam * lam));
                (dx, p / (m * lam))
            }
            HamiltonianSystem::TimeRescaled { spec, clock } => {
                let (f, df) = clock.inverse_rate_with_gradient(x)?;
                let excess = spec.hamiltonian(x, p) - spec.energy;
                let dx = df * excess + spec.potential.gradient(x) * f;
                (dx, p * (f / spec.mass))
            }
            HamiltonianSystem::HouriSwapped { energy } => {
                let lam = energy - 0.5 * x.norm_squared();
                (x * (-2.0 * lam * p.norm_squared()), p * (2.0 * lam * lam))
            }
            HamiltonianSystem::HouriInverted { k } => {
                let c = 1.0 + k * x.norm_squared();
                (x * (c * k * p.norm_squared()), p * (0.5 * c * c))
            }
            HamiltonianSystem::Moser { beta, energy } => {
                let u = p.norm_squared() - 2.0 * energy;
                let b2 = beta * beta;
                (x * (u * u / (4.0 * b2)), p * (u * x.norm_squared() / (2.0 * b2)))
            }
            HamiltonianSystem::RegularizedG { epsilon, .. } => {
                let pn = checked_momentum(p)?;
                let dx = x * (pn / epsilon);
                let dp = p * ((epsilon * epsilon + x.norm_squared()) / (2.0 * epsilon * pn));
                (dx, dp)
            }
            HamiltonianSystem::Custom(c) => match &c.gradient {
                Some(g) => g(x, p),
                None => {
                    let f = &c.value;
                    let dx = numdiff::gradient(|y| f(y, p), x, numdiff::GRADIENT_STEP);
                    let dp = numdiff::gradient(|q| f(x, q), p, numdiff::GRADIENT_STEP);
                    (dx, dp)
                }
            },
        })
    }

    /// Hamiltonian vector field `(∂H/∂p, -∂H/∂x)`.
    pub fn flow(&self, x: &Vector, p: &Vector) -> Result<(Vector, Vector)> {
        let (dx, dp) = self.gradients(x, p)?;
        Ok((dp, -dx))
    }
}

/// Hamiltonian vector field at a phase state, refusing states inside the
/// collision guard `guard`.
pub fn hamiltonian_flow_field(
    sys: &HamiltonianSystem,
    s: &PhaseState,
    guard: f64,
) -> Result<(Vector, Vector)> {
    if let Some(r) = sys.guarded_radius(&s.x, &s.p) {
        if r < guard {
            return Err(Error::NearCollision { param: s.t.unwrap_or(f64::NAN), radius: r, guard });
        }
    }
    sys.flow(&s.x, &s.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn assert_vec(v: &Vector, expected: &[f64]) {
        assert!((v - vector(expected)).amax() < 1e-15, "{v} vs {expected:?}");
    }

    #[test]
    fn kepler_flow_at_circular_point() {
        let sys = HamiltonianSystem::Natural(SystemSpec::kepler(1.0, -0.5, 2).unwrap());
        let s = PhaseState::new(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let (dx, dp) = hamiltonian_flow_field(&sys, &s, 1e-6).unwrap();
        assert_vec(&dx, &[0.0, 1.0]);
        assert_vec(&dp, &[-1.0, 0.0]);
        assert_eq!(sys.label(), HamiltonianLabel::NewtonianKepler);
    }

    #[test]
    fn free_particle_flow() {
        let sys = HamiltonianSystem::Natural(SystemSpec::free(2.0, 2).unwrap());
        let s = PhaseState::new(&[-4.0, 7.0], &[2.0, 0.0]).unwrap();
        let (dx, dp) = hamiltonian_flow_field(&sys, &s, 1e-6).unwrap();
        assert_vec(&dx, &[2.0, 0.0]);
        assert_vec(&dp, &[0.0, 0.0]);
    }

    #[test]
    fn hooke_restoring_force() {
        let sys = HamiltonianSystem::Natural(SystemSpec::hooke(1.0, 0.0, 0.5, 2).unwrap());
        let s = PhaseState::new(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        let (_, dp) = hamiltonian_flow_field(&sys, &s, 1e-6).unwrap();
        assert_vec(&dp, &[-1.0, 0.0]);
        assert_eq!(sys.label(), HamiltonianLabel::NewtonianHooke);
    }

    #[test]
    fn collision_guard_trips() {
        let sys = HamiltonianSystem::Natural(SystemSpec::kepler(1.0, -0.5, 2).unwrap());
        let s = PhaseState::new(&[1e-8, 0.0], &[0.0, 1.0]).unwrap();
        assert!(matches!(
            hamiltonian_flow_field(&sys, &s, 1e-6),
            Err(Error::NearCollision { .. })
        ));
        // the oscillator has no singular centre
        let hooke = HamiltonianSystem::Natural(SystemSpec::hooke(1.0, 0.0, 0.5, 2).unwrap());
        assert!(hamiltonian_flow_field(&hooke, &s, 1e-6).is_ok());
    }

    #[test]
    fn jacobi_hamiltonian_is_one_on_surface() {
        let spec = SystemSpec::kepler(1.0, -0.5, 2).unwrap();
        let sys = HamiltonianSystem::Jacobi(spec);
        let v = sys.value(&vector(&[1.0, 0.0]), &vector(&[0.0, 1.0])).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(sys.value(&vector(&[2.5, 0.0]), &vector(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn regularized_g_needs_momentum() {
        let sys = HamiltonianSystem::RegularizedG { mu: 1.0, epsilon: 1.0 };
        assert!(matches!(
            sys.gradients(&vector(&[1.0, 0.0]), &vector(&[0.0, 0.0])),
            Err(Error::ZeroMomentum { .. })
        ));
    }

    #[test]
    fn custom_hamiltonian_uses_finite_differences() {
        let sys = HamiltonianSystem::Custom(CustomHamiltonian {
            value: Arc::new(|x: &Vector, p: &Vector| 0.5 * p.norm_squared() + x[0].sin()),
            gradient: None,
            separable: true,
        });
        let (dx, dp) = sys.gradients(&vector(&[0.3, 0.0]), &vector(&[1.0, 2.0])).unwrap();
        assert!((dx[0] - 0.3f64.cos()).abs() < 1e-9);
        assert!((dp - vector(&[1.0, 2.0])).amax() < 1e-9);
    }
}
