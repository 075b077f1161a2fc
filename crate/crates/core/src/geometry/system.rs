use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vector};

/// Central potentials `U(r)` supported by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Potential {
    /// `U(r) = -alpha / r`
    Kepler { alpha: f64 },
    /// `U(r) = (a/2) r^2 - b`
    Hooke { a: f64, b: f64 },
    /// `U(r) = c r^n`
    PowerLaw { c: f64, n: f64 },
}

impl Potential {
    /// The constant zero potential.
    pub fn free() -> Self {
        Potential::Hooke { a: 0.0, b: 0.0 }
    }

    pub fn value_at_radius(&self, r: f64) -> f64 {
        match *self {
            Potential::Kepler { alpha } => -alpha / r,
            Potential::Hooke { a, b } => 0.5 * a * r * r - b,
            Potential::PowerLaw { c, n } => c * r.powf(n),
        }
    }

    /// `dU/dr`
    pub fn radial_derivative(&self, r: f64) -> f64 {
        match *self {
            Potential::Kepler { alpha } => alpha / (r * r),
            Potential::Hooke { a, .. } => a * r,
            Potential::PowerLaw { c, n } => c * n * r.powf(n - 1.0),
        }
    }

    /// `d²U/dr²`
    pub fn radial_second_derivative(&self, r: f64) -> f64 {
        match *self {
            Potential::Kepler { alpha } => -2.0 * alpha / (r * r * r),
            Potential::Hooke { a, .. } => a,
            Potential::PowerLaw { c, n } => c * n * (n - 1.0) * r.powf(n - 2.0),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.value_at_radius(x.norm())
    }

    /// Cartesian gradient `∇U(x)`.
    pub fn gradient(&self, x: &Vector) -> Vector {
        match *self {
            Potential::Kepler { alpha } => {
                let r = x.norm();
                x * (alpha / (r * r * r))
            }
            Potential::Hooke { a, .. } => x * a,
            Potential::PowerLaw { c, n } => {
                if c == 0.0 {
                    return Vector::zeros(x.len());
                }
                x * (c * n * x.norm().powf(n - 2.0))
            }
        }
    }

    /// True when the force diverges at the origin.
    pub fn is_singular_at_origin(&self) -> bool {
        match *self {
            Potential::Kepler { .. } => true,
            Potential::Hooke { .. } => false,
            Potential::PowerLaw { c, n } => c != 0.0 && n < 2.0,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Potential::Kepler { .. } => "kepler",
            Potential::Hooke { .. } => "hooke",
            Potential::PowerLaw { .. } => "power-law",
        }
    }
}

/// Physical parameters of a natural system `H = |p|²/2m + U(x)` at fixed energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub mass: f64,
    pub potential: Potential,
    pub energy: f64,
    pub dim: usize,
}

/// Relative guard band around the Hill boundary `E = U(x)`.
pub const HILL_GUARD: f64 = 1e-9;

impl SystemSpec {
    pub fn new(mass: f64, potential: Potential, energy: f64, dim: usize) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidSpec(format!("mass must be positive, got {mass}")));
        }
        if !energy.is_finite() {
            return Err(Error::InvalidSpec(format!("energy must be finite, got {energy}")));
        }
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidSpec(format!("dimension must be 2 or 3, got {dim}")));
        }
        match potential {
            Potential::Kepler { alpha } if !(alpha.is_finite() && alpha > 0.0) => {
                return Err(Error::InvalidSpec(format!(
                    "kepler coupling alpha must be positive, got {alpha}"
                )));
            }
            Potential::Hooke { a, b } if !(a.is_finite() && b.is_finite()) => {
                return Err(Error::InvalidSpec("hooke parameters must be finite".into()));
            }
            Potential::PowerLaw { c, n } if !(c.is_finite() && n.is_finite()) => {
                return Err(Error::InvalidSpec("power-law parameters must be finite".into()));
            }
            _ => {}
        }
        Ok(SystemSpec { mass, potential, energy, dim })
    }

    /// Unit-mass Kepler problem with coupling `alpha`.
    pub fn kepler(alpha: f64, energy: f64, dim: usize) -> Result<Self> {
        Self::new(1.0, Potential::Kepler { alpha }, energy, dim)
    }

    /// Unit-mass isotropic oscillator `U = (a/2) r² - b`.
    pub fn hooke(a: f64, b: f64, energy: f64, dim: usize) -> Result<Self> {
        Self::new(1.0, Potential::Hooke { a, b }, energy, dim)
    }

    pub fn free(energy: f64, dim: usize) -> Result<Self> {
        Self::new(1.0, Potential::free(), energy, dim)
    }

    pub fn with_energy(self, energy: f64) -> Self {
        SystemSpec { energy, ..self }
    }

    /// The Kepler coupling, if this is a Kepler system.
    pub fn alpha(&self) -> Option<f64> {
        match self.potential {
            Potential::Kepler { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn require_alpha(&self) -> Result<f64> {
        self.alpha().ok_or_else(|| {
            Error::InvalidSpec(format!(
                "kepler system required, got {}",
                self.potential.family_name()
            ))
        })
    }

    /// Natural Hamiltonian `|p|²/2m + U(x)` on the flat base metric.
    pub fn hamiltonian(&self, x: &Vector, p: &Vector) -> f64 {
        p.norm_squared() / (2.0 * self.mass) + self.potential.value(x)
    }

    /// `E - U(x)`, the kinetic energy available at `x`.
    pub fn kinetic_margin(&self, x: &Vector) -> f64 {
        self.energy - self.potential.value(x)
    }

    /// `E - U(x)` after checking the Hill guard band
    /// `|E - U| >= 1e-9 (|E| + |U| + 1)` and positivity.
    pub fn hill_margin(&self, x: &Vector) -> Result<f64> {
        self.hill_margin_at_radius(x.norm())
    }

    pub fn hill_margin_at_radius(&self, r: f64) -> Result<f64> {
        let u = self.potential.value_at_radius(r);
        let margin = self.energy - u;
        let band = HILL_GUARD * (self.energy.abs() + u.abs() + 1.0);
        if !(margin > band) {
            return Err(Error::HillBoundaryViolation { radius: r, margin });
        }
        Ok(margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn rejects_bad_parameters() {
        assert!(SystemSpec::new(0.0, Potential::free(), 0.0, 2).is_err());
        assert!(SystemSpec::kepler(-1.0, -0.5, 2).is_err());
        assert!(SystemSpec::kepler(1.0, -0.5, 4).is_err());
        assert!(SystemSpec::kepler(1.0, f64::NAN, 2).is_err());
    }

    #[test]
    fn hill_margin_guards_the_boundary() {
        let spec = SystemSpec::kepler(1.0, -0.5, 2).unwrap();
        assert!((spec.hill_margin(&vector(&[1.0, 0.0])).unwrap() - 0.5).abs() < 1e-15);
        let err = spec.hill_margin(&vector(&[2.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::HillBoundaryViolation { .. }));
        assert!(spec.hill_margin(&vector(&[3.0, 0.0])).is_err());
        // just inside the guard band
        assert!(spec.hill_margin(&vector(&[2.0 - 1e-12, 0.0])).is_err());
    }

    #[test]
    fn gradients_match_radial_derivative() {
        let x = vector(&[0.3, -0.7, 0.2]);
        let r = x.norm();
        for pot in [
            Potential::Kepler { alpha: 1.3 },
            Potential::Hooke { a: 2.0, b: 0.5 },
            Potential::PowerLaw { c: 0.7, n: -1.5 },
        ] {
            let g = pot.gradient(&x);
            let expected = &x * (pot.radial_derivative(r) / r);
            assert!((g - expected).norm() < 1e-13);
        }
    }
}
