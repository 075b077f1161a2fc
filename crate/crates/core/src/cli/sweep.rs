//! Seeded random phase points and pointwise identity sweeps.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::PhaseState;
use crate::geometry::SystemSpec;
use crate::transforms::{
    bohlin_identity_residual, houri_hamiltonian, houri_swap, moser_flow_equivalence, moser_quantities,
    onto_unit_level, quasi_hamiltonian_residual,
};
use crate::{Error, Result, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on the unit sphere of dimension `dim - 1`.
pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random point of the bound Kepler surface `H = E` with `|x|` between 20%
/// and 90% of the Hill radius `α/|E|`.
pub fn kepler_surface_point<R: Rng>(spec: &SystemSpec, rng: &mut R) -> Result<PhaseState> {
    let alpha = spec.require_alpha()?;
    if !(spec.energy < 0.0) {
        return Err(Error::PositiveEnergy { energy: spec.energy });
    }
    let hill = alpha / -spec.energy;
    let r = rng.gen_range(0.2 * hill..0.9 * hill);
    let x = random_unit(rng, spec.dim) * r;
    let speed = (2.0 * spec.mass * spec.hill_margin(&x)?).sqrt();
    let p = random_unit(rng, spec.dim) * speed;
    PhaseState::from_vectors(x, p)
}

/// Largest values found by a sweep of `points` random samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub identity: String,
    pub points: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn finish(identity: &str, points: usize, seed: u64, max_residual: f64, tolerance: f64) -> SweepResult {
    SweepResult {
        identity: identity.into(),
        points,
        seed,
        max_residual,
        tolerance,
        passed: max_residual < tolerance,
    }
}

/// `|p|²/|q|² = |P|²` at planar points with `q, p ∈ [-2, 2]²`, relative.
pub fn bohlin_sweep(points: usize, seed: u64) -> Result<Vec<SweepResult>> {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let q = Vector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0));
        let p = Vector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0));
        if q.norm() < 1e-3 || p.norm() < 1e-3 {
            continue;
        }
        worst = worst.max(bohlin_identity_residual(&q, &p)?);
    }
    Ok(vec![finish("bohlin-momentum-identity", points, seed, worst, 1e-13)])
}

/// `X_F = X_H / Y(H)` and `F = 1/2` at random points of the surface.
pub fn moser_sweep(spec: &SystemSpec, points: usize, seed: u64) -> Result<Vec<SweepResult>> {
    let mut rng = rng(seed);
    let (mut flow, mut level): (f64, f64) = (0.0, 0.0);
    for _ in 0..points {
        let s = kepler_surface_point(spec, &mut rng)?;
        flow = flow.max(moser_flow_equivalence(spec, &s)?);
        level = level.max((moser_quantities(spec, &s)?.f - 0.5).abs());
    }
    Ok(vec![
        finish("moser-reeb-field", points, seed, flow, 1e-10),
        finish("moser-level-one-half", points, seed, level, 1e-12),
    ])
}

/// The swapped Hamiltonian equals `α²` on the surface, and the inverted
/// momentum flow with `k = -2E` is quasi-Hamiltonian on its unit level.
pub fn houri_sweep(spec: &SystemSpec, points: usize, seed: u64) -> Result<Vec<SweepResult>> {
    let alpha = spec.require_alpha()?;
    let k = -2.0 * spec.energy;
    let mut rng = rng(seed);
    let (mut level, mut quasi): (f64, f64) = (0.0, 0.0);
    for _ in 0..points {
        let s = kepler_surface_point(spec, &mut rng)?;
        level = level.max((houri_hamiltonian(spec, &houri_swap(&s)) - alpha * alpha).abs() / (alpha * alpha));
        let x = random_unit(&mut rng, spec.dim) * rng.gen_range(0.0..2.0);
        let on_level = onto_unit_level(k, &x, &random_unit(&mut rng, spec.dim))?;
        quasi = quasi.max(quasi_hamiltonian_residual(k, &on_level)?);
    }
    Ok(vec![
        finish("houri-swapped-level", points, seed, level, 1e-12),
        finish("houri-quasi-hamiltonian", points, seed, quasi, 1e-8),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_points_are_reproducible_and_on_surface() {
        let spec = SystemSpec::kepler(1.0, -0.5, 3).unwrap();
        let a = kepler_surface_point(&spec, &mut rng(7)).unwrap();
        let b = kepler_surface_point(&spec, &mut rng(7)).unwrap();
        assert_eq!(a, b);
        assert!((spec.hamiltonian(&a.x, &a.p) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn small_sweeps_pass() {
        let spec = SystemSpec::kepler(1.0, -0.5, 2).unwrap();
        for r in bohlin_sweep(200, 1)
            .unwrap()
            .into_iter()
            .chain(moser_sweep(&spec, 50, 1).unwrap())
            .chain(houri_sweep(&spec, 50, 1).unwrap())
        {
            assert!(r.passed, "{r:?}");
        }
    }
}
