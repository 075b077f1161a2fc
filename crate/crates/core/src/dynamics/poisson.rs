use super::hamiltonian::HamiltonianSystem;
use super::state::PhaseState;
use crate::numdiff::{self, GRADIENT_STEP};
use crate::{Result, Vector};

/// A scalar function on phase space.
pub trait PhaseFunction {
    fn eval(&self, x: &Vector, p: &Vector) -> Result<f64>;

    /// `(∂f/∂x, ∂f/∂p)`, by central differences unless overridden.
    fn gradients(&self, x: &Vector, p: &Vector) -> Result<(Vector, Vector)> {
        // propagate a domain error once instead of from every probe
        self.eval(x, p)?;
        let gx = numdiff::gradient(|y| self.eval(y, p).unwrap_or(f64::NAN), x, GRADIENT_STEP);
        let gp = numdiff::gradient(|q| self.eval(x, q).unwrap_or(f64::NAN), p, GRADIENT_STEP);
        Ok((gx, gp))
    }
}

impl<F> PhaseFunction for F
where
    F: Fn(&Vector, &Vector) -> f64,
{
    fn eval(&self, x: &Vector, p: &Vector) -> Result<f64> {
        Ok(self(x, p))
    }
}

impl PhaseFunction for HamiltonianSystem {
    fn eval(&self, x: &Vector, p: &Vector) -> Result<f64> {
        self.value(x, p)
    }

    fn gradients(&self, x: &Vector, p: &Vector) -> Result<(Vector, Vector)> {
        HamiltonianSystem::gradients(self, x, p)
    }
}

/// `{f, g} = Σ ∂f/∂xⁱ ∂g/∂pᵢ - ∂f/∂pᵢ ∂g/∂xⁱ`
pub fn poisson_bracket<F, G>(f: &F, g: &G, s: &PhaseState) -> Result<f64>
where
    F: PhaseFunction + ?Sized,
    G: PhaseFunction + ?Sized,
{
    let (fx, fp) = f.gradients(&s.x, &s.p)?;
    let (gx, gp) = g.gradients(&s.x, &s.p)?;
    Ok(fx.dot(&gp) - fp.dot(&gx))
}

/// Planar angular momentum `x¹p₂ - x²p₁` with exact gradients.
#[derive(Debug, Clone, Copy, Default)]
pub struct AngularMomentumZ;

impl PhaseFunction for AngularMomentumZ {
    fn eval(&self, x: &Vector, p: &Vector) -> Result<f64> {
        Ok(x[0] * p[1] - x[1] * p[0])
    }

    fn gradients(&self, x: &Vector, p: &Vector) -> Result<(Vector, Vector)> {
        let mut gx = Vector::zeros(x.len());
        let mut gp = Vector::zeros(p.len());
        gx[0] = p[1];
        gx[1] = -p[0];
        gp[0] = -x[1];
        gp[1] = x[0];
        Ok((gx, gp))
    }
}
