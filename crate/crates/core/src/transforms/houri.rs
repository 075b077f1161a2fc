use crate::dynamics::{HamiltonianSystem, PhaseState, MOMENTUM_FLOOR};
use crate::geometry::{ConformalFactor, ConformalMetric, SystemSpec};
use crate::numdiff::{self, GRADIENT_STEP};
use crate::{Error, Result, Vector};

/// Exchanges positions and momenta; clocks are kept.
pub fn houri_swap(s: &PhaseState) -> PhaseState {
    PhaseState { x: s.p.clone(), p: s.x.clone(), t: s.t, sigma: s.sigma }
}

/// `(E - |x̃|²/2)² |p̃|²` at a swapped state; equals `α²` when the original
/// state lies on the Kepler surface `H = E`.
pub fn houri_hamiltonian(spec: &SystemSpec, swapped: &PhaseState) -> f64 {
    let lam = spec.energy - 0.5 * swapped.x.norm_squared();
    lam * lam * swapped.p.norm_squared()
}

/// Momentum-space metric `(E - |x̃|²/2)^(-2) |dx̃|²` on the plane.
/// For `E = -k²/2` its Gaussian curvature is the constant `k²`.
pub fn houri_metric(energy: f64) -> ConformalMetric {
    ConformalMetric::polar().with_factor(ConformalFactor::Houri { energy })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HouriFlow {
    /// `H̃ = ¼ (1 + k|x|²)² |p|²`
    pub hamiltonian: f64,
    /// Hamiltonian field `(∂H̃/∂p, -∂H̃/∂x)`.
    pub field: (Vector, Vector),
    /// `X_H̃ / (2 H̃^(1/2) |p|)`
    pub rescaled: (Vector, Vector),
    /// The closed form `(p/|p|³, -k x)`; agrees with `rescaled` on `H̃ = 1`.
    pub pattern: (Vector, Vector),
}

fn checked(p: &Vector) -> Result<f64> {
    let n = p.norm();
    if n < MOMENTUM_FLOOR {
        return Err(Error::ZeroMomentum { norm: n });
    }
    Ok(n)
}

pub fn houri_flow_field(k: f64, s: &PhaseState) -> Result<HouriFlow> {
    let pn = checked(&s.p)?;
    let sys = HamiltonianSystem::HouriInverted { k };
    let hamiltonian = sys.value(&s.x, &s.p)?;
    let (dx, dp) = sys.flow(&s.x, &s.p)?;
    let lam = 2.0 * hamiltonian.sqrt() * pn;
    let rescaled = (&dx / lam, &dp / lam);
    let pattern = (&s.p / (pn * pn * pn), &s.x * -k);
    Ok(HouriFlow { hamiltonian, field: (dx, dp), rescaled, pattern })
}

/// Checks `i_{ΛX} ω = dH̃` for `X = (p/|p|³, -k x)` and `Λ = 2 H̃^(1/2) |p|`,
/// with `ω = Σ dxⁱ ∧ dpᵢ` and `dH̃` from central differences. The relation
/// holds on the level `H̃ = 1`; other states are refused.
pub fn quasi_hamiltonian_residual(k: f64, s: &PhaseState) -> Result<f64> {
    let flow = houri_flow_field(k, s)?;
    let level = flow.hamiltonian - 1.0;
    if level.abs() > 1e-10 {
        return Err(Error::EnergySurfaceViolation { residual: level.abs(), tolerance: 1e-10 });
    }
    let lam = 2.0 * flow.hamiltonian.sqrt() * s.p.norm();
    let (vx, vp) = (&flow.pattern.0 * lam, &flow.pattern.1 * lam);
    let sys = HamiltonianSystem::HouriInverted { k };
    let h = |x: &Vector, p: &Vector| sys.value(x, p).unwrap_or(f64::NAN);
    let dhx = numdiff::gradient(|y| h(y, &s.p), &s.x, GRADIENT_STEP);
    let dhp = numdiff::gradient(|q| h(&s.x, q), &s.p, GRADIENT_STEP);
    // i_V ω has dx-coefficients -V^p and dp-coefficients V^x
    let rx = (-vp - dhx).amax();
    let rp = (vx - dhp).amax();
    Ok(rx.max(rp))
}

/// Moves `p` along its ray onto the level `H̃ = 1`.
pub fn onto_unit_level(k: f64, x: &Vector, direction: &Vector) -> Result<PhaseState> {
    let dn = checked(direction)?;
    let c = 1.0 + k * x.norm_squared();
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("1 + k|x|² = {c} is not positive")));
    }
    let p = direction * (2.0 / (c * dn));
    PhaseState::from_vectors(x.clone(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_is_an_involution() {
        let s = PhaseState::new(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        let t = houri_swap(&s);
        assert_eq!(t.x, crate::vector(&[4.0, 5.0, 6.0]));
        assert_eq!(t.p, crate::vector(&[1.0, 2.0, 3.0]));
        assert_eq!(houri_swap(&t), s);
    }

    #[test]
    fn swapped_circular_orbit_gives_alpha_squared() {
        let spec = SystemSpec::kepler(1.0, -0.5, 3).unwrap();
        let s = PhaseState::new(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(houri_hamiltonian(&spec, &houri_swap(&s)), 1.0);
        let still = PhaseState::new(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(houri_hamiltonian(&spec, &still), 0.0);
    }

    #[test]
    fn flow_at_origin() {
        let s = PhaseState::new(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        let f = houri_flow_field(1.0, &s).unwrap();
        assert_eq!(f.field.0, crate::vector(&[0.5, 0.0, 0.0]));
        assert_eq!(f.field.1, crate::vector(&[0.0, 0.0, 0.0]));
        // H̃ = 1/4 here, so the rescaling divides by 1
        assert_eq!(f.rescaled.0, crate::vector(&[0.5, 0.0, 0.0]));
        assert_eq!(f.pattern.0, crate::vector(&[1.0, 0.0, 0.0]));
        assert!(houri_flow_field(1.0, &PhaseState::new(&[1.0, 0.0], &[0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn pattern_matches_rescaled_field_on_unit_level() {
        let s = onto_unit_level(0.7, &crate::vector(&[0.3, -0.2, 0.5]), &crate::vector(&[0.1, 0.9, -0.4]))
            .unwrap();
        let f = houri_flow_field(0.7, &s).unwrap();
        assert!((f.hamiltonian - 1.0).abs() < 1e-14);
        assert!((&f.rescaled.0 - &f.pattern.0).amax() < 1e-12);
        assert!((&f.rescaled.1 - &f.pattern.1).amax() < 1e-12);
        assert!(quasi_hamiltonian_residual(0.7, &s).unwrap() < 1e-8);
    }
}
