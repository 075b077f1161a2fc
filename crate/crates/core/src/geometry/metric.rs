use serde::{Deserialize, Serialize};

use super::system::{Potential, SystemSpec, HILL_GUARD};
use crate::{Error, Matrix, Result, Vector};

/// Coordinates of the flat base metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseMetric {
    /// `δ_ij` in Cartesian coordinates, any dimension.
    Cartesian,
    /// `dr² + r² dθ²`, two dimensions only; positions are `(r, θ)`.
    Polar,
}

/// Value and first two radial derivatives of a radial conformal factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Position-dependent conformal factor `Φ`, always a function of `r = |x|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConformalFactor {
    /// `Φ ≡ 1`
    Unit,
    /// `Φ = scale · (E - U(r))`; `scale = 2m` is the Jacobi metric.
    Lifted { scale: f64, energy: f64, potential: Potential },
    /// `Φ = (E - r²/2)^(-2)`, the momentum-space metric reached by swapping
    /// positions and momenta on a Kepler energy surface.
    Houri { energy: f64 },
}

impl ConformalFactor {
    pub fn profile(&self, r: f64) -> Result<RadialProfile> {
        match *self {
            ConformalFactor::Unit => Ok(RadialProfile { value: 1.0, d1: 0.0, d2: 0.0 }),
            ConformalFactor::Lifted { scale, energy, potential } => {
                let margin = lifted_margin(energy, &potential, r)?;
                Ok(RadialProfile {
                    value: scale * margin,
                    d1: -scale * potential.radial_derivative(r),
                    d2: -scale * potential.radial_second_derivative(r),
                })
            }
            ConformalFactor::Houri { energy } => {
                let lam = houri_margin(energy, r)?;
                let inv3 = lam.powi(-3);
                Ok(RadialProfile {
                    value: lam.powi(-2),
                    d1: 2.0 * r * inv3,
                    d2: 2.0 * inv3 + 6.0 * r * r * lam.powi(-4),
                })
            }
        }
    }

    /// Cartesian value and gradient at `x`.
    pub fn value_and_gradient(&self, x: &Vector) -> Result<(f64, Vector)> {
        match *self {
            ConformalFactor::Unit => Ok((1.0, Vector::zeros(x.len()))),
            ConformalFactor::Lifted { scale, energy, potential } => {
                let margin = lifted_margin(energy, &potential, x.norm())?;
                Ok((scale * margin, potential.gradient(x) * -scale))
            }
            ConformalFactor::Houri { energy } => {
                let lam = houri_margin(energy, x.norm())?;
                Ok((lam.powi(-2), x * (2.0 * lam.powi(-3))))
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, ConformalFactor::Unit)
    }
}

fn lifted_margin(energy: f64, potential: &Potential, r: f64) -> Result<f64> {
    let u = potential.value_at_radius(r);
    let margin = energy - u;
    if !(margin > HILL_GUARD * (energy.abs() + u.abs() + 1.0)) {
        return Err(Error::HillBoundaryViolation { radius: r, margin });
    }
    Ok(margin)
}

fn houri_margin(energy: f64, r: f64) -> Result<f64> {
    let lam = energy - 0.5 * r * r;
    if lam.abs() <= HILL_GUARD * (energy.abs() + 0.5 * r * r + 1.0) {
        return Err(Error::HillBoundaryViolation { radius: r, margin: lam });
    }
    Ok(lam)
}

/// A metric `Φ(x) · g_flat` on a flat Cartesian or polar base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalMetric {
    pub dim: usize,
    pub base: BaseMetric,
    pub factor: ConformalFactor,
}

impl ConformalMetric {
    pub fn cartesian(dim: usize) -> Self {
        ConformalMetric { dim, base: BaseMetric::Cartesian, factor: ConformalFactor::Unit }
    }

    pub fn polar() -> Self {
        ConformalMetric { dim: 2, base: BaseMetric::Polar, factor: ConformalFactor::Unit }
    }

    pub fn with_factor(self, factor: ConformalFactor) -> Self {
        ConformalMetric { factor, ..self }
    }

    /// Radial coordinate of a position expressed in this metric's chart.
    pub fn radius(&self, x: &Vector) -> f64 {
        match self.base {
            BaseMetric::Cartesian => x.norm(),
            BaseMetric::Polar => x[0],
        }
    }

    fn check_position(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "position has {} components, metric dimension is {}",
                x.len(),
                self.dim
            )));
        }
        if self.base == BaseMetric::Polar && !(x[0] > 0.0) {
            return Err(Error::OriginSingularity { norm: x[0] });
        }
        Ok(())
    }

    /// Conformal factor at `x`.
    pub fn factor_at(&self, x: &Vector) -> Result<f64> {
        self.check_position(x)?;
        match self.base {
            BaseMetric::Cartesian => Ok(self.factor.value_and_gradient(x)?.0),
            BaseMetric::Polar => Ok(self.factor.profile(x[0])?.value),
        }
    }

    /// Gradient of the conformal factor in this metric's chart.
    pub fn factor_gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_position(x)?;
        match self.base {
            BaseMetric::Cartesian => Ok(self.factor.value_and_gradient(x)?.1),
            BaseMetric::Polar => {
                let prof = self.factor.profile(x[0])?;
                Ok(crate::vector(&[prof.d1, 0.0]))
            }
        }
    }

    /// Metric components `g̃_ij(x)`.
    pub fn components(&self, x: &Vector) -> Result<Matrix> {
        let phi = self.factor_at(x)?;
        Ok(match self.base {
            BaseMetric::Cartesian => Matrix::identity(self.dim, self.dim) * phi,
            BaseMetric::Polar => Matrix::from_diagonal(&crate::vector(&[phi, phi * x[0] * x[0]])),
        })
    }

    /// Inverse metric components `g̃^ij(x)`.
    pub fn inverse(&self, x: &Vector) -> Result<Matrix> {
        let phi = self.factor_at(x)?;
        Ok(match self.base {
            BaseMetric::Cartesian => Matrix::identity(self.dim, self.dim) / phi,
            BaseMetric::Polar => {
                Matrix::from_diagonal(&crate::vector(&[1.0 / phi, 1.0 / (phi * x[0] * x[0])]))
            }
        })
    }

    /// Squared length `g̃_ij v^i v^j` of a tangent vector at `x`.
    pub fn norm_squared(&self, x: &Vector, v: &Vector) -> Result<f64> {
        let g = self.components(x)?;
        Ok(v.dot(&(g * v)))
    }
}

/// Christoffel symbols `Γ^i_jk` stored densely, index order `(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel { dim, data: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    fn set_symmetric(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let d = self.dim;
        self.data[(i * d + j) * d + k] = value;
        self.data[(i * d + k) * d + j] = value;
    }

    /// Geodesic acceleration `-Γ^i_jk v^j v^k`.
    pub fn geodesic_acceleration(&self, v: &Vector) -> Vector {
        let d = self.dim;
        Vector::from_fn(d, |i, _| {
            let mut acc = 0.0;
            for j in 0..d {
                for k in 0..d {
                    acc += self.get(i, j, k) * v[j] * v[k];
                }
            }
            -acc
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Jacobi–Maupertuis lift `g̃ = 2m (E - U) g` of a flat base metric.
pub fn jm_lift(spec: &SystemSpec, base: &ConformalMetric) -> Result<ConformalMetric> {
    jm_lift_scaled(spec, base, 2.0 * spec.mass)
}

/// Lift with an arbitrary constant normalisation, `Φ = scale (E - U)`.
///
/// `scale = 1` gives the `f²(r) = E - U(r)` form whose Gaussian curvature is
/// [`kepler_curvature`](super::kepler_curvature); the Jacobi metric
/// (`scale = 2m`) has curvature smaller by the factor `2m`.
pub fn jm_lift_scaled(spec: &SystemSpec, base: &ConformalMetric, scale: f64) -> Result<ConformalMetric> {
    if !base.factor.is_unit() {
        return Err(Error::InvalidArgument("jm_lift requires a flat base metric".into()));
    }
    if base.base == BaseMetric::Cartesian && base.dim != spec.dim {
        return Err(Error::InvalidArgument(format!(
            "base metric dimension {} does not match system dimension {}",
            base.dim, spec.dim
        )));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument(format!("lift scale must be positive, got {scale}")));
    }
    Ok(base.with_factor(ConformalFactor::Lifted {
        scale,
        energy: spec.energy,
        potential: spec.potential,
    }))
}

/// Closed-form Christoffel symbols of a conformally flat metric.
///
/// Cartesian: `Γ^i_jk = (∂_jΦ δ_ik + ∂_kΦ δ_ij - ∂_iΦ δ_jk) / 2Φ`.
/// Polar with radial `Φ(r)`: only `Γ^r_rr`, `Γ^r_θθ` and `Γ^θ_rθ` survive.
pub fn christoffel(metric: &ConformalMetric, x: &Vector) -> Result<Christoffel> {
    metric.check_position(x)?;
    let d = metric.dim;
    let mut gamma = Christoffel::zeros(d);
    match metric.base {
        BaseMetric::Cartesian => {
            let (phi, grad) = metric.factor.value_and_gradient(x)?;
            let half_inv = 0.5 / phi;
            for i in 0..d {
                for j in 0..d {
                    for k in j..d {
                        let mut v = 0.0;
                        if i == k {
                            v += grad[j];
                        }
                        if i == j {
                            v += grad[k];
                        }
                        if j == k {
                            v -= grad[i];
                        }
                        gamma.set_symmetric(i, j, k, v * half_inv);
                    }
                }
            }
        }
        BaseMetric::Polar => {
            let r = x[0];
            let prof = metric.factor.profile(r)?;
            let log_slope = 0.5 * prof.d1 / prof.value;
            gamma.set_symmetric(0, 0, 0, log_slope);
            gamma.set_symmetric(0, 1, 1, -r - r * r * log_slope);
            gamma.set_symmetric(1, 0, 1, 1.0 / r + log_slope);
        }
    }
    Ok(gamma)
}
