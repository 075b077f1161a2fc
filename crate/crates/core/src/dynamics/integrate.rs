use std::fmt;

use serde::{Deserialize, Serialize};

use super::hamiltonian::HamiltonianSystem;
use super::state::{Parameter, PhaseState, Trajectory};
use crate::{Error, Result, Vector};

/// Adaptive steps below this abort with [`Error::StepUnderflow`].
pub const MIN_STEP: f64 = 1e-14;
/// Convergence tolerance of the implicit-midpoint fixed-point iteration.
pub const IMPLICIT_TOL: f64 = 1e-12;
pub const IMPLICIT_MAX_ITER: usize = 50;
/// Default collision guard, relative to the initial guarded radius.
pub const COLLISION_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "rk4-fixed", alias = "rk4")]
    Rk4,
    #[serde(rename = "rkf45-adaptive", alias = "rkf45")]
    Rkf45,
    /// Kick-drift-kick leapfrog; separable Hamiltonians only.
    #[serde(rename = "stormer-verlet", alias = "verlet")]
    StormerVerlet,
    #[serde(rename = "implicit-midpoint", alias = "midpoint")]
    ImplicitMidpoint,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Rk4 => "rk4-fixed",
            Method::Rkf45 => "rkf45-adaptive",
            Method::StormerVerlet => "stormer-verlet",
            Method::ImplicitMidpoint => "implicit-midpoint",
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, Method::Rkf45)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step, or the first trial step of an adaptive method.
    pub step: f64,
    /// Local error tolerance of adaptive methods.
    pub tolerance: f64,
    /// Upper bound on adaptive steps.
    pub max_step: Option<f64>,
    /// Collision guard as a fraction of the initial guarded radius.
    pub collision_guard: f64,
}

impl IntegratorConfig {
    pub fn new(method: Method, step: f64) -> Self {
        IntegratorConfig {
            method,
            step,
            tolerance: 1e-10,
            max_step: None,
            collision_guard: COLLISION_GUARD,
        }
    }

    pub fn rk4(step: f64) -> Self {
        Self::new(Method::Rk4, step)
    }

    pub fn stormer_verlet(step: f64) -> Self {
        Self::new(Method::StormerVerlet, step)
    }

    pub fn implicit_midpoint(step: f64) -> Self {
        Self::new(Method::ImplicitMidpoint, step)
    }

    pub fn rkf45(tolerance: f64) -> Self {
        IntegratorConfig { tolerance, ..Self::new(Method::Rkf45, 1e-3) }
    }

    pub fn with_max_step(self, max_step: f64) -> Self {
        IntegratorConfig { max_step: Some(max_step), ..self }
    }

    pub fn with_collision_guard(self, collision_guard: f64) -> Self {
        IntegratorConfig { collision_guard, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {}", self.step)));
        }
        if self.method.is_adaptive() && !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Some(m) = self.max_step {
            if !(m > 0.0) {
                return Err(Error::InvalidArgument(format!("max_step must be positive, got {m}")));
            }
        }
        if !(self.collision_guard >= 0.0 && self.collision_guard < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "collision guard must lie in [0, 1), got {}",
                self.collision_guard
            )));
        }
        Ok(())
    }
}

/// Phase point packed as `[x; p]`.
fn pack(x: &Vector, p: &Vector) -> Vector {
    let d = x.len();
    Vector::from_fn(2 * d, |i, _| if i < d { x[i] } else { p[i - d] })
}

fn unpack(y: &Vector) -> (Vector, Vector) {
    let d = y.len() / 2;
    (y.rows(0, d).into_owned(), y.rows(d, d).into_owned())
}

fn field(sys: &HamiltonianSystem, y: &Vector) -> Result<Vector> {
    let (x, p) = unpack(y);
    let (dx, dp) = sys.flow(&x, &p)?;
    Ok(pack(&dx, &dp))
}

fn rk4_step(sys: &HamiltonianSystem, y: &Vector, h: f64) -> Result<Vector> {
    let k1 = field(sys, y)?;
    let k2 = field(sys, &(y + &k1 * (0.5 * h)))?;
    let k3 = field(sys, &(y + &k2 * (0.5 * h)))?;
    let k4 = field(sys, &(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn verlet_step(sys: &HamiltonianSystem, y: &Vector, h: f64) -> Result<Vector> {
    let (x, p) = unpack(y);
    let (gx, _) = sys.gradients(&x, &p)?;
    let p_half = p - gx * (0.5 * h);
    let (_, gp) = sys.gradients(&x, &p_half)?;
    let x_new = x + gp * h;
    let (gx, _) = sys.gradients(&x_new, &p_half)?;
    let p_new = p_half - gx * (0.5 * h);
    Ok(pack(&x_new, &p_new))
}

/// One implicit-midpoint step `y₁ = y₀ + h f((y₀ + y₁)/2)` by fixed-point
/// iteration seeded with `guess_slope`. Returns the new point and the slope
/// at the converged midpoint.
fn midpoint_step(
    sys: &HamiltonianSystem,
    y: &Vector,
    h: f64,
    guess_slope: Option<&Vector>,
) -> Result<(Vector, Vector)> {
    let mut slope = match guess_slope {
        Some(s) => s.clone(),
        None => field(sys, y)?,
    };
    let mut y1 = y + &slope * h;
    let mut residual = f64::INFINITY;
    for _ in 0..IMPLICIT_MAX_ITER {
        slope = field(sys, &((y + &y1) * 0.5))?;
        let next = y + &slope * h;
        residual = (&next - &y1).amax();
        let scale = 1.0 + next.amax();
        y1 = next;
        if residual <= IMPLICIT_TOL * scale {
            return Ok((y1, slope));
        }
    }
    Err(Error::ImplicitSolveFailed { iterations: IMPLICIT_MAX_ITER, residual })
}

// Fehlberg 4(5) tableau; the fifth-order solution is propagated.
const A: [[f64; 5]; 6] = [
    [0.0; 5],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B5: [f64; 6] = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];

/// Returns the fifth-order point and the scaled error norm.
fn rkf45_step(sys: &HamiltonianSystem, y: &Vector, h: f64, tol: f64) -> Result<(Vector, f64)> {
    let mut k: Vec<Vector> = Vec::with_capacity(6);
    for stage in 0..6 {
        let mut yi = y.clone();
        for (j, kj) in k.iter().enumerate() {
            if A[stage][j] != 0.0 {
                yi += kj * (h * A[stage][j]);
            }
        }
        k.push(field(sys, &yi)?);
    }
    let mut y5 = y.clone();
    let mut err = Vector::zeros(y.len());
    for (i, ki) in k.iter().enumerate() {
        y5 += ki * (h * B5[i]);
        err += ki * (h * (B5[i] - B4[i]));
    }
    let mut norm: f64 = 0.0;
    for i in 0..y.len() {
        let scale = tol * (1.0 + y[i].abs().max(y5[i].abs()));
        norm = norm.max(err[i].abs() / scale);
    }
    Ok((y5, norm))
}

struct Recorder<'a> {
    sys: &'a HamiltonianSystem,
    parameter: Parameter,
    guard: Option<f64>,
    samples: Vec<PhaseState>,
    param: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn push(&mut self, s: f64, y: &Vector) -> Result<()> {
        let (x, p) = unpack(y);
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("state became non-finite".into())
                .at_sample(self.samples.len()));
        }
        if let (Some(guard), Some(v)) = (self.guard, self.sys.guarded_vector(&x, &p)) {
            // a fixed step can jump across the centre, so the chord from the
            // previous sample is checked as well as the endpoint
            let r = match self.samples.last() {
                Some(prev) => match self.sys.guarded_vector(&prev.x, &prev.p) {
                    Some(u) => chord_distance(u, v),
                    None => v.norm(),
                },
                None => v.norm(),
            };
            if r < guard {
                return Err(Error::NearCollision {
                    param: *self.param.last().unwrap_or(&s),
                    radius: r,
                    guard,
                });
            }
        }
        let (t, sigma) = match self.parameter {
            Parameter::Time => (Some(s), None),
            Parameter::Sigma => (None, Some(s)),
            _ => (None, None),
        };
        self.samples.push(PhaseState { x, p, t, sigma });
        self.param.push(s);
        Ok(())
    }
}

/// Distance from the origin to the segment `[u, v]`.
fn chord_distance(u: &Vector, v: &Vector) -> f64 {
    let d = v - u;
    let dd = d.norm_squared();
    if dd == 0.0 {
        return v.norm();
    }
    let t = (-u.dot(&d) / dd).clamp(0.0, 1.0);
    (u + d * t).norm()
}

/// Integrates the flow of `sys` from `s0` over the parameter interval `span`.
///
/// Fixed-step methods use `n = ceil(len/step)` equal steps so the run ends
/// exactly on `span.1`. Adaptive runs record every accepted step.
pub fn integrate(
    sys: &HamiltonianSystem,
    s0: &PhaseState,
    span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let (a, b) = span;
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidArgument(format!("empty or invalid span [{a}, {b}]")));
    }
    if config.method == Method::StormerVerlet && !sys.is_separable() {
        return Err(Error::InvalidArgument(format!(
            "stormer-verlet needs a separable Hamiltonian, got {}",
            sys.label()
        )));
    }
    let guard = sys
        .guarded_radius(&s0.x, &s0.p)
        .map(|r| r * config.collision_guard)
        .filter(|g| *g > 0.0);
    let mut rec = Recorder {
        sys,
        parameter: sys.parameter(),
        guard,
        samples: Vec::new(),
        param: Vec::new(),
    };
    let mut y = pack(&s0.x, &s0.p);
    field(sys, &y).map_err(|e| e.at_sample(0))?;
    rec.push(a, &y)?;

    if config.method.is_adaptive() {
        let mut s = a;
        let mut h = config.step.min(b - a);
        let max_step = config.max_step.unwrap_or(f64::INFINITY);
        let mut last_err: Option<Error> = None;
        while s < b {
            let last = b - s <= h * (1.0 + 1e-12);
            if last {
                h = b - s;
            }
            match rkf45_step(sys, &y, h, config.tolerance) {
                Ok((y5, errn)) if errn <= 1.0 => {
                    s = if last { b } else { s + h };
                    y = y5;
                    rec.push(s, &y)?;
                    last_err = None;
                    let grow = if errn == 0.0 { 5.0 } else { (0.9 * errn.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (h * grow).min(max_step);
                }
                Ok((_, errn)) => {
                    h *= (0.9 * errn.powf(-0.2)).clamp(0.2, 1.0);
                }
                Err(e) => {
                    // trial stages may leave the domain; shrink and retry
                    last_err = Some(e);
                    h *= 0.25;
                }
            }
            if h < MIN_STEP {
                return Err(match last_err {
                    Some(e) => e.at_sample(rec.samples.len()),
                    None => Error::StepUnderflow { param: s, step: h },
                });
            }
        }
    } else {
        let n = ((b - a) / config.step - 1e-9).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        let mut slope: Option<Vector> = None;
        for i in 1..=n {
            let index = rec.samples.len();
            y = match config.method {
                Method::Rk4 => rk4_step(sys, &y, h),
                Method::StormerVerlet => verlet_step(sys, &y, h),
                Method::ImplicitMidpoint => {
                    midpoint_step(sys, &y, h, slope.as_ref()).map(|(y1, k)| {
                        slope = Some(k);
                        y1
                    })
                }
                Method::Rkf45 => unreachable!(),
            }
            .map_err(|e| e.at_sample(index))?;
            let s = if i == n { b } else { a + i as f64 * h };
            rec.push(s, &y)?;
        }
    }

    let mut samples = rec.samples;
    if rec.parameter == Parameter::Time {
        // keep any σ clock carried by the initial state
        samples[0].sigma = s0.sigma;
    }
    Ok(Trajectory {
        samples,
        param: rec.param,
        parameter: rec.parameter,
        hamiltonian: sys.label(),
        config: Some(*config),
        spec: sys.spec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SystemSpec;

    fn kepler() -> HamiltonianSystem {
        HamiltonianSystem::Natural(SystemSpec::kepler(1.0, -0.5, 2).unwrap())
    }

    fn circular() -> PhaseState {
        PhaseState::new(&[1.0, 0.0], &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn rkf45_keeps_circular_radius() {
        let cfg = IntegratorConfig::rkf45(1e-10);
        let traj = integrate(&kepler(), &circular(), (0.0, 2.0 * std::f64::consts::PI), &cfg).unwrap();
        let worst = traj.samples.iter().map(|s| (s.x.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        assert_eq!(*traj.param.last().unwrap(), 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn free_particle_moves_in_a_line() {
        let sys = HamiltonianSystem::Natural(SystemSpec::free(0.5, 2).unwrap());
        let s0 = PhaseState::new(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        for method in [Method::Rk4, Method::Rkf45, Method::StormerVerlet, Method::ImplicitMidpoint] {
            let traj = integrate(&sys, &s0, (0.0, 1.0), &IntegratorConfig::new(method, 0.1)).unwrap();
            let end = traj.last();
            assert!((end.x[0] - 1.0).abs() < 1e-14 && end.x[1].abs() < 1e-14, "{method}");
            assert_eq!(end.t, Some(1.0));
        }
    }

    #[test]
    fn fixed_steps_land_on_span_end() {
        let traj = integrate(&kepler(), &circular(), (0.0, 1.0), &IntegratorConfig::rk4(0.3)).unwrap();
        assert_eq!(traj.len(), 5);
        assert_eq!(traj.param[4], 1.0);
    }

    #[test]
    fn verlet_rejects_jacobi_hamiltonian() {
        let sys = HamiltonianSystem::Jacobi(SystemSpec::kepler(1.0, -0.5, 2).unwrap());
        let err = integrate(&sys, &circular(), (0.0, 1.0), &IntegratorConfig::stormer_verlet(0.1));
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn radial_infall_hits_collision_guard() {
        let s0 = PhaseState::new(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        let sys = HamiltonianSystem::Natural(SystemSpec::kepler(1.0, -1.0, 2).unwrap());
        let err = integrate(&sys, &s0, (0.0, 5.0), &IntegratorConfig::rkf45(1e-10)).unwrap_err();
        let ok = match err {
            Error::NearCollision { .. } | Error::StepUnderflow { .. } => true,
            Error::AtSample { .. } => true,
            _ => false,
        };
        assert!(ok, "{err:?}");
    }

    #[test]
    fn verlet_energy_error_is_second_order() {
        let s0 = PhaseState::new(&[1.0, 0.0], &[0.0, 1.2]).unwrap();
        let sys = kepler();
        let drift = |h: f64| {
            let traj = integrate(&sys, &s0, (0.0, 20.0), &IntegratorConfig::stormer_verlet(h)).unwrap();
            let h0 = sys.value(&s0.x, &s0.p).unwrap();
            traj.samples
                .iter()
                .map(|s| (sys.value(&s.x, &s.p).unwrap() - h0).abs())
                .fold(0.0, f64::max)
        };
        let ratio = drift(2e-3) / drift(1e-3);
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }
}
