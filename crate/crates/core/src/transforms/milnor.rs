use serde::{Deserialize, Serialize};

use super::unit_mass_kepler;
use crate::dynamics::{Parameter, Trajectory, MOMENTUM_FLOOR};
use crate::geometry::SystemSpec;
use crate::numdiff::nonuniform_first;
use crate::{Error, Result, Vector};

/// Inversion in the unit sphere of momentum space, `w = p/|p|²`.
pub fn milnor_invert(p: &Vector) -> Result<Vector> {
    let n2 = p.norm_squared();
    if n2.sqrt() < MOMENTUM_FLOOR {
        return Err(Error::ZeroMomentum { norm: n2.sqrt() });
    }
    Ok(p / n2)
}

/// Inverse momentum and its `σ`-derivative at one orbit sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MilnorState {
    pub w: Vector,
    pub w_prime: Vector,
    pub energy: f64,
}

impl MilnorState {
    /// `|4|w'|² - (2E|w|² - 1)²|`
    pub fn speed_residual(&self) -> f64 {
        let rhs = 2.0 * self.energy * self.w.norm_squared() - 1.0;
        (4.0 * self.w_prime.norm_squared() - rhs * rhs).abs()
    }

    /// `x = 4α (2(w·w')w - |w|²w') / (1 - 2E|w|²)²`, from
    /// `p' = -α x / r²` and `r = α / (|p|²/2 - E)`.
    pub fn reconstruct_position(&self, alpha: f64) -> Vector {
        let w2 = self.w.norm_squared();
        let den = 1.0 - 2.0 * self.energy * w2;
        (&self.w * (2.0 * self.w.dot(&self.w_prime)) - &self.w_prime * w2) * (4.0 * alpha / (den * den))
    }
}

/// Per-sample residuals of the inverse-momentum identities along an orbit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MilnorReport {
    /// Indices of the interior samples that were checked.
    pub indices: Vec<usize>,
    /// `|4|w'|² - (2E|w|² - 1)²|`
    pub speed: Vec<f64>,
    /// `||dp/dσ| - α/r|`
    pub momentum_rate: Vec<f64>,
    /// `|x_reconstructed - x|`
    pub reconstruction: Vec<f64>,
    /// `|α/(|p|²/2 - E) - r|`
    pub radius: Vec<f64>,
}

impl MilnorReport {
    pub fn max(values: &[f64]) -> f64 {
        values.iter().copied().fold(0.0, f64::max)
    }
}

/// `w` and `w'` at interior samples of a trajectory parameterized by the
/// Levi-Civita clock `dσ/dt = 1/r`, with `w'` from central differences.
pub fn milnor_states(traj: &Trajectory, energy: f64) -> Result<Vec<(usize, MilnorState)>> {
    if traj.parameter != Parameter::Sigma {
        return Err(Error::InvalidArgument(format!(
            "inverse-momentum checks need a σ-parameterized orbit, got {}",
            traj.parameter.as_str()
        )));
    }
    let ws = traj
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| milnor_invert(&s.p).map_err(|e| e.at_sample(i)))
        .collect::<Result<Vec<Vector>>>()?;
    Ok((1..ws.len().saturating_sub(1))
        .map(|i| {
            let w_prime = nonuniform_first(&traj.param, &ws, i);
            (i, MilnorState { w: ws[i].clone(), w_prime, energy })
        })
        .collect())
}

/// Evaluates every inverse-momentum identity on a Levi-Civita orbit of a
/// unit-mass Kepler system.
pub fn milnor_check(spec: &SystemSpec, traj: &Trajectory) -> Result<MilnorReport> {
    let alpha = unit_mass_kepler(spec)?;
    let momenta = traj.momenta();
    let mut report = MilnorReport::default();
    for (i, state) in milnor_states(traj, spec.energy)? {
        let s = &traj.samples[i];
        let r = s.x.norm();
        let dp = nonuniform_first(&traj.param, &momenta, i);
        report.indices.push(i);
        report.speed.push(state.speed_residual());
        report.momentum_rate.push((dp.norm() - alpha / r).abs());
        report.reconstruction.push((state.reconstruct_position(alpha) - &s.x).norm());
        report.radius.push((alpha / (0.5 * s.p.norm_squared() - spec.energy) - r).abs());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_rescaled, ClockRate, IntegratorConfig, OrbitalElements};
    use crate::vector;

    #[test]
    fn inversion_values() {
        assert_eq!(milnor_invert(&vector(&[2.0, 0.0, 0.0])).unwrap(), vector(&[0.5, 0.0, 0.0]));
        assert_eq!(milnor_invert(&vector(&[1.0, 1.0, 0.0])).unwrap(), vector(&[0.5, 0.5, 0.0]));
        let p = vector(&[0.3, -0.4, 1.2]);
        let back = milnor_invert(&milnor_invert(&p).unwrap()).unwrap();
        assert!((back - &p).amax() < 1e-14 * p.amax());
        assert!(matches!(milnor_invert(&vector(&[0.0, 0.0])), Err(Error::ZeroMomentum { .. })));
    }

    #[test]
    fn identities_hold_on_an_ellipse() {
        let (spec, s0) = OrbitalElements::new(1.0, 0.3).initial_state(1.0, 1.0, 2).unwrap();
        let traj = integrate_rescaled(
            &spec,
            &ClockRate::LeviCivita,
            &s0,
            (0.0, 2.0 * std::f64::consts::PI),
            &IntegratorConfig::rk4(1e-3),
        )
        .unwrap();
        let rep = milnor_check(&spec, &traj).unwrap();
        assert!(MilnorReport::max(&rep.speed) < 1e-5);
        assert!(MilnorReport::max(&rep.momentum_rate) < 1e-6);
        assert!(MilnorReport::max(&rep.reconstruction) < 1e-4);
        assert!(MilnorReport::max(&rep.radius) < 1e-6);
    }
}
