//! Conserved quantities along trajectories and their drift statistics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{HamiltonianLabel, HamiltonianSystem, PhaseState, Trajectory};
use crate::geometry::{jm_lift, ConformalMetric, SystemSpec};
use crate::transforms::{lrl_vector, moser_quantities};
use crate::{Error, Matrix, Result, Vector};

/// Guard added to `|Q₀|` in relative drifts.
pub const RELATIVE_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative drift of `H`.
    pub h: f64,
    /// Relative drift of `H̃`.
    pub h_tilde: f64,
    pub l: f64,
    pub a: f64,
    pub f: f64,
    pub lagrangian: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { h: 1e-7, h_tilde: 1e-8, l: 1e-7, a: 1e-7, f: 1e-10, lagrangian: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Scalar or vector value of a monitored quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantityValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl QuantityValue {
    fn components(&self) -> &[f64] {
        match self {
            QuantityValue::Scalar(v) => std::slice::from_ref(v),
            QuantityValue::Vector(v) => v,
        }
    }

    /// Max-norm distance to `other`.
    pub fn distance(&self, other: &QuantityValue) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.components().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Drift statistics of one quantity against its value at sample 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityDrift {
    pub name: String,
    pub initial: QuantityValue,
    pub max_drift: f64,
    pub mean_drift: f64,
    pub rel_drift: f64,
    pub tolerance: f64,
    /// `true` when the verdict uses `rel_drift` rather than `max_drift`.
    pub relative: bool,
    pub verdict: Verdict,
}

/// Quantities evaluated at one sample; `None` where inapplicable.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleValues {
    pub h: Option<f64>,
    pub h_tilde: Option<f64>,
    pub l: Vec<f64>,
    pub a: Option<Vec<f64>>,
    pub f: Option<f64>,
    /// `g̃(dx/dσ, dx/dσ)`, identically 4 on a Jacobi geodesic.
    pub lagrangian: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub samples: Vec<SampleValues>,
    pub drifts: Vec<QuantityDrift>,
}

impl DiagnosticsReport {
    pub fn drift(&self, name: &str) -> Option<&QuantityDrift> {
        self.drifts.iter().find(|d| d.name == name)
    }

    pub fn passes(&self) -> bool {
        self.drifts.iter().all(|d| d.verdict == Verdict::Pass)
    }
}

/// Which optional quantities to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsOptions {
    pub tolerances: Tolerances,
    /// Include the Moser function `F`; by default only for Moser flows.
    pub moser: Option<bool>,
    /// Include `H̃` and the lifted Lagrangian; by default only for Jacobi flows.
    pub jacobi: Option<bool>,
}

/// Evaluates every applicable conserved quantity at every sample of `traj`
/// with default tolerances.
pub fn evaluate_all(spec: &SystemSpec, traj: &Trajectory) -> Result<DiagnosticsReport> {
    evaluate_with(spec, traj, &DiagnosticsOptions::default())
}

pub fn evaluate_with(
    spec: &SystemSpec,
    traj: &Trajectory,
    options: &DiagnosticsOptions,
) -> Result<DiagnosticsReport> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let jacobi = options.jacobi.unwrap_or(traj.hamiltonian == HamiltonianLabel::JacobiLifted);
    let moser = options.moser.unwrap_or(traj.hamiltonian == HamiltonianLabel::MoserF);
    let lrl = spec.alpha().is_some() && spec.mass == 1.0;
    let metric = if jacobi {
        Some(jm_lift(spec, &ConformalMetric::cartesian(spec.dim))?)
    } else {
        None
    };
    let samples = traj
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            sample_values(spec, s, metric.as_ref(), lrl, moser).map_err(|e| e.at_sample(i))
        })
        .collect::<Result<Vec<_>>>()?;

    let tol = &options.tolerances;
    let mut drifts = Vec::new();
    let mut push = |name: &str, values: Vec<QuantityValue>, tolerance: f64, relative: bool| {
        drifts.push(drift_of(name, &values, tolerance, relative));
    };
    push("H", samples.iter().map(|v| QuantityValue::Scalar(v.h.unwrap())).collect(), tol.h, true);
    if jacobi {
        push("Htilde", samples.iter().map(|v| QuantityValue::Scalar(v.h_tilde.unwrap())).collect(), tol.h_tilde, true);
        push(
            "lagrangian",
            samples.iter().map(|v| QuantityValue::Scalar(v.lagrangian.unwrap())).collect(),
            tol.lagrangian,
            false,
        );
    }
    push("L", samples.iter().map(|v| QuantityValue::Vector(v.l.clone())).collect(), tol.l, false);
    if lrl {
        push("A", samples.iter().map(|v| QuantityValue::Vector(v.a.clone().unwrap())).collect(), tol.a, false);
    }
    if moser {
        push("F", samples.iter().map(|v| QuantityValue::Scalar(v.f.unwrap())).collect(), tol.f, false);
    }
    Ok(DiagnosticsReport { samples, drifts })
}

fn sample_values(
    spec: &SystemSpec,
    s: &PhaseState,
    metric: Option<&ConformalMetric>,
    lrl: bool,
    moser: bool,
) -> Result<SampleValues> {
    let mut v = SampleValues {
        h: Some(spec.hamiltonian(&s.x, &s.p)),
        l: s.angular_momentum().iter().copied().collect(),
        ..SampleValues::default()
    };
    if let Some(g) = metric {
        let sys = HamiltonianSystem::Jacobi(*spec);
        v.h_tilde = Some(sys.value(&s.x, &s.p)?);
        let (velocity, _) = sys.flow(&s.x, &s.p)?;
        v.lagrangian = Some(g.norm_squared(&s.x, &velocity)?);
    }
    if lrl {
        v.a = Some(lrl_vector(spec, s)?.iter().copied().collect());
    }
    if moser {
        v.f = Some(moser_quantities(spec, s)?.f);
    }
    Ok(v)
}

fn drift_of(name: &str, values: &[QuantityValue], tolerance: f64, relative: bool) -> QuantityDrift {
    let initial = values[0].clone();
    let deviations: Vec<f64> = values.iter().map(|v| v.distance(&initial)).collect();
    let max_drift = deviations.iter().copied().fold(0.0, f64::max);
    let mean_drift = deviations.iter().sum::<f64>() / deviations.len() as f64;
    let rel_drift = max_drift / (initial.max_norm() + RELATIVE_FLOOR);
    let measured = if relative { rel_drift } else { max_drift };
    QuantityDrift {
        name: name.to_string(),
        initial,
        max_drift,
        mean_drift,
        rel_drift,
        tolerance,
        relative,
        verdict: if measured < tolerance { Verdict::Pass } else { Verdict::Fail },
    }
}

/// Largest `|H̃ - 1|` tolerated by [`quadratic_invariant_transfer`].
pub const TRANSFER_SURFACE_TOL: f64 = 1e-6;

/// Compares `K = K²ⁱʲ pᵢpⱼ + K⁰` with its lift `K̃ = K²ⁱʲ pᵢpⱼ + K⁰ H̃` along
/// a Jacobi geodesic and returns `max |K - K̃| = max |K⁰ (H̃ - 1)|`.
pub fn quadratic_invariant_transfer<K2, K0>(
    spec: &SystemSpec,
    k2: K2,
    k0: K0,
    traj_jm: &Trajectory,
) -> Result<f64>
where
    K2: Fn(&Vector) -> Matrix,
    K0: Fn(&Vector) -> f64,
{
    let sys = HamiltonianSystem::Jacobi(*spec);
    let mut worst: f64 = 0.0;
    for (i, s) in traj_jm.samples.iter().enumerate() {
        let h_tilde = sys.value(&s.x, &s.p).map_err(|e| e.at_sample(i))?;
        if (h_tilde - 1.0).abs() > TRANSFER_SURFACE_TOL {
            return Err(Error::EnergySurfaceViolation {
                residual: (h_tilde - 1.0).abs(),
                tolerance: TRANSFER_SURFACE_TOL,
            }
            .at_sample(i));
        }
        let quad = s.p.dot(&(k2(&s.x) * &s.p));
        let c = k0(&s.x);
        let k = quad + c;
        let lifted = quad + c * h_tilde;
        worst = worst.max((k - lifted).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, jm_geodesic, IntegratorConfig, OrbitalElements};

    #[test]
    fn free_particle_conserves_exactly() {
        let spec = SystemSpec::free(0.5, 2).unwrap();
        let s0 = PhaseState::new(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        let traj = integrate(&HamiltonianSystem::Natural(spec), &s0, (0.0, 3.0), &IntegratorConfig::rk4(0.1)).unwrap();
        let rep = evaluate_all(&spec, &traj).unwrap();
        assert_eq!(rep.drift("H").unwrap().max_drift, 0.0);
        assert!(rep.drift("L").unwrap().max_drift < 1e-15);
        assert!(rep.drift("A").is_none() && rep.drift("Htilde").is_none());
        assert!(rep.passes());
    }

    #[test]
    fn geodesic_report_pins_lifted_values() {
        let (spec, s0) = OrbitalElements::new(1.0, 0.0).initial_state(1.0, 1.0, 2).unwrap();
        let g = jm_geodesic(&spec, &s0, (0.0, 0.5), &IntegratorConfig::implicit_midpoint(1e-3)).unwrap();
        let rep = evaluate_all(&spec, &g).unwrap();
        assert!(rep.drift("Htilde").unwrap().rel_drift < 1e-8);
        for v in &rep.samples {
            assert!((v.lagrangian.unwrap() - 4.0).abs() < 1e-8);
        }
        let dev = quadratic_invariant_transfer(&spec, |_| Matrix::zeros(2, 2), |_| 3.0, &g).unwrap();
        let worst = rep.samples.iter().map(|v| (v.h_tilde.unwrap() - 1.0).abs()).fold(0.0, f64::max);
        assert!((dev - 3.0 * worst).abs() < 1e-15);
    }

    #[test]
    fn verdict_uses_tolerance() {
        let values = vec![QuantityValue::Vector(vec![0.0, 0.0]), QuantityValue::Vector(vec![1e-6, -2e-6])];
        let d = drift_of("A", &values, 1e-7, false);
        assert_eq!(d.max_drift, 2e-6);
        assert_eq!(d.verdict, Verdict::Fail);
        assert!(d.rel_drift > 1e20);
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(json["verdict"], "fail");
        assert_eq!(json["initial"], serde_json::json!([0.0, 0.0]));
    }
}
