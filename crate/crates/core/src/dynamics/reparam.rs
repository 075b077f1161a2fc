use serde::{Deserialize, Serialize};

use super::hamiltonian::ClockRate;
use super::state::{Parameter, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Fill `σ` from physical time.
    TimeToSigma,
    /// Fill physical time from the trajectory's own rescaled parameter.
    SigmaToTime,
}

/// Fills the missing clock of `traj` using the rate `dσ/dt = λ(x)`.
///
/// `TimeToSigma` applies the trapezoidal rule `Δσ = Δt (λᵢ + λᵢ₊₁)/2`.
/// `SigmaToTime` solves the same relation for `Δt`, so the two directions are
/// exact inverses of each other on a common grid.
pub fn reparameterize(traj: &Trajectory, clock: &ClockRate, direction: Direction) -> Result<Trajectory> {
    let rates = traj
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| match clock.rate(&s.x) {
            Ok(r) if r > 0.0 => Ok(r),
            Ok(r) => Err(Error::HillBoundaryViolation { radius: s.x.norm(), margin: r }.at_sample(i)),
            Err(e) => Err(e.at_sample(i)),
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut out = traj.clone();
    match direction {
        Direction::TimeToSigma => {
            let times = traj.times().ok_or_else(|| {
                Error::InvalidArgument("trajectory has no physical time to integrate".into())
            })?;
            let mut sigma = traj.first().sigma.unwrap_or(0.0);
            out.samples[0].sigma = Some(sigma);
            for i in 1..out.len() {
                sigma += 0.5 * (times[i] - times[i - 1]) * (rates[i - 1] + rates[i]);
                out.samples[i].sigma = Some(sigma);
            }
        }
        Direction::SigmaToTime => {
            if traj.parameter == Parameter::Time {
                return Err(Error::InvalidArgument(
                    "trajectory is already parameterized by time".into(),
                ));
            }
            let mut t = traj.first().t.unwrap_or(0.0);
            out.samples[0].t = Some(t);
            for i in 1..out.len() {
                t += 2.0 * (traj.param[i] - traj.param[i - 1]) / (rates[i - 1] + rates[i]);
                out.samples[i].t = Some(t);
            }
        }
    }
    Ok(out)
}
