use super::unit_mass_kepler;
use crate::dynamics::{
    integrate_rescaled, ClockRate, HamiltonianSystem, IntegratorConfig, PhaseState, Trajectory,
    MOMENTUM_FLOOR, ORIGIN_FLOOR,
};
use crate::geometry::SystemSpec;
use crate::numdiff::nonuniform_second;
use crate::{Error, Result, Vector};

/// Laplace–Runge–Lenz vector
/// `A = (1/μ)(2H + μ/|x|) x - (1/μ)(x·ẋ) ẋ` of a unit-mass Kepler state;
/// its length is the eccentricity.
pub fn lrl_vector(spec: &SystemSpec, s: &PhaseState) -> Result<Vector> {
    let mu = unit_mass_kepler(spec)?;
    let r = s.x.norm();
    if r < ORIGIN_FLOOR {
        return Err(Error::OriginSingularity { norm: r });
    }
    let h = spec.hamiltonian(&s.x, &s.p);
    let v = &s.p;
    Ok(&s.x * ((2.0 * h + mu / r) / mu) - v * (s.x.dot(v) / mu))
}

/// `ε = √(-2E)` for a bound orbit.
pub fn anomaly_epsilon(spec: &SystemSpec) -> Result<f64> {
    if !(spec.energy < 0.0) {
        return Err(Error::PositiveEnergy { energy: spec.energy });
    }
    Ok((-2.0 * spec.energy).sqrt())
}

/// A bound orbit sampled uniformly in the eccentric anomaly `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyRun {
    pub trajectory: Trajectory,
    pub epsilon: f64,
    pub mu: f64,
    /// `‖x''(s) + x + (μ/ε²) A‖` at interior samples.
    pub residuals: Vec<f64>,
}

impl AnomalyRun {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Integrates the Kepler flow in `s`, where `dt = (|x|/ε) ds`, and checks the
/// forced-oscillator form `x'' + x = -(μ/ε²) A` by central differences.
pub fn anomaly_system(
    spec: &SystemSpec,
    s0: &PhaseState,
    s_span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<AnomalyRun> {
    let mu = unit_mass_kepler(spec)?;
    let epsilon = anomaly_epsilon(spec)?;
    let trajectory = integrate_rescaled(spec, &ClockRate::EccentricAnomaly { epsilon }, s0, s_span, config)?;
    let xs = trajectory.positions();
    let mut residuals = Vec::with_capacity(xs.len().saturating_sub(2));
    for i in 1..xs.len().saturating_sub(1) {
        let a = lrl_vector(spec, &trajectory.samples[i]).map_err(|e| e.at_sample(i))?;
        let x2 = nonuniform_second(&trajectory.param, &xs, i);
        residuals.push((x2 + &xs[i] + a * (mu / (epsilon * epsilon))).norm());
    }
    Ok(AnomalyRun { trajectory, epsilon, mu, residuals })
}

/// `G̃ = (ε² + |x|²)|p| / 2ε - μ/ε` and its Hamiltonian field.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedFlow {
    pub value: f64,
    pub field: (Vector, Vector),
}

/// Evaluated at a state in swapped (momentum-as-position) coordinates.
pub fn regularized_g(spec: &SystemSpec, swapped: &PhaseState) -> Result<RegularizedFlow> {
    let mu = unit_mass_kepler(spec)?;
    let epsilon = anomaly_epsilon(spec)?;
    let pn = swapped.p.norm();
    if pn < MOMENTUM_FLOOR {
        return Err(Error::ZeroMomentum { norm: pn });
    }
    let sys = HamiltonianSystem::RegularizedG { mu, epsilon };
    Ok(RegularizedFlow { value: sys.value(&swapped.x, &swapped.p)?, field: sys.flow(&swapped.x, &swapped.p)? })
}
