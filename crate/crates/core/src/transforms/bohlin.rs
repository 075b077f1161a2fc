use crate::dynamics::{Trajectory, ORIGIN_FLOOR};
use crate::geometry::{Potential, SystemSpec};
use crate::{Error, Result, Vector};

/// Image of a planar phase point under the squaring map `z = w²/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BohlinImage {
    /// `(x, y) = ((q₁² - q₂²)/2, q₁q₂)`
    pub z: Vector,
    /// `(p_x, p_y)`
    pub momentum: Vector,
}

fn planar(q: &Vector, p: &Vector) -> Result<()> {
    if q.len() != 2 || p.len() != 2 {
        return Err(Error::InvalidArgument("the Bohlin map is planar".into()));
    }
    Ok(())
}

/// Squaring map with its cotangent lift:
///
/// ```text
/// (p_x, p_y) = 1/|q|² [[q₁, -q₂], [q₂, q₁]] (p₁, p₂)
/// ```
pub fn bohlin_forward(q: &Vector, p: &Vector) -> Result<BohlinImage> {
    planar(q, p)?;
    let n2 = q.norm_squared();
    if n2.sqrt() < ORIGIN_FLOOR {
        return Err(Error::OriginSingularity { norm: n2.sqrt() });
    }
    let (q1, q2) = (q[0], q[1]);
    let z = crate::vector(&[0.5 * (q1 * q1 - q2 * q2), q1 * q2]);
    let momentum = crate::vector(&[(q1 * p[0] - q2 * p[1]) / n2, (q2 * p[0] + q1 * p[1]) / n2]);
    Ok(BohlinImage { z, momentum })
}

/// Relative defect of `|p|²/|q|² = p_x² + p_y²`.
pub fn bohlin_identity_residual(q: &Vector, p: &Vector) -> Result<f64> {
    let img = bohlin_forward(q, p)?;
    let lhs = p.norm_squared() / q.norm_squared();
    let rhs = img.momentum.norm_squared();
    Ok((lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE))
}

/// Kepler system matched to the oscillator `½|p|² + (a/2)|q|² - b` on its
/// zero level: `|P|² - b/r + a`, i.e. mass ½, coupling `b`, energy `-a`.
/// With `r = |q|²/2` this is `2 H_osc / |q|²`.
pub fn bohlin_hamiltonian_map(oscillator: &SystemSpec) -> Result<SystemSpec> {
    let (a, b) = match oscillator.potential {
        Potential::Hooke { a, b } if oscillator.mass == 1.0 && oscillator.dim == 2 => (a, b),
        _ => {
            return Err(Error::InvalidSpec(
                "the Bohlin map needs a planar unit-mass oscillator".into(),
            ))
        }
    };
    if !(b > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "oscillator offset b = {b} gives no Kepler coupling; its zero level is degenerate"
        )));
    }
    SystemSpec::new(0.5, Potential::Kepler { alpha: b }, -a, 2)
}

/// `H_kepler - E_kepler` at the image of `(q, p)`; this equals
/// `2 H_osc(q, p) / |q|²`, so it vanishes exactly on the oscillator's zero level.
pub fn kepler_level(oscillator: &SystemSpec, q: &Vector, p: &Vector) -> Result<f64> {
    let kepler = bohlin_hamiltonian_map(oscillator)?;
    let img = bohlin_forward(q, p)?;
    Ok(kepler.hamiltonian(&img.z, &img.momentum) - kepler.energy)
}

/// Maps every sample of an oscillator trajectory.
pub fn bohlin_trajectory(traj: &Trajectory) -> Result<Vec<BohlinImage>> {
    traj.samples
        .iter()
        .enumerate()
        .map(|(i, s)| bohlin_forward(&s.x, &s.p).map_err(|e| e.at_sample(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn hand_values() {
        let img = bohlin_forward(&vector(&[1.0, 0.0]), &vector(&[0.0, 1.0])).unwrap();
        assert_eq!(img.z, vector(&[0.5, 0.0]));
        assert_eq!(img.momentum, vector(&[0.0, 1.0]));

        let img = bohlin_forward(&vector(&[1.0, 1.0]), &vector(&[1.0, 0.0])).unwrap();
        assert_eq!(img.z, vector(&[0.0, 1.0]));
        assert_eq!(img.momentum, vector(&[0.5, 0.5]));
        assert!((img.momentum.norm_squared() - 0.5).abs() < 1e-16);

        let img = bohlin_forward(&vector(&[1.0, 0.0]), &vector(&[0.0, 0.0])).unwrap();
        assert_eq!(img.momentum, vector(&[0.0, 0.0]));
        assert!(matches!(
            bohlin_forward(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])),
            Err(Error::OriginSingularity { .. })
        ));
    }

    #[test]
    fn zero_level_maps_to_zero_level() {
        let osc = SystemSpec::hooke(1.0, 2.0, 0.0, 2).unwrap();
        let q = vector(&[1.0, 1.0]);
        let p = vector(&[2f64.sqrt(), 0.0]);
        assert!(osc.hamiltonian(&q, &p).abs() < 1e-15);
        assert!(kepler_level(&osc, &q, &p).unwrap().abs() < 1e-12);

        let kepler = bohlin_hamiltonian_map(&osc).unwrap();
        assert_eq!((kepler.mass, kepler.alpha(), kepler.energy), (0.5, Some(2.0), -1.0));
        assert!(bohlin_hamiltonian_map(&SystemSpec::hooke(0.0, 0.0, 0.0, 2).unwrap()).is_err());
    }

    #[test]
    fn level_is_rescaled_oscillator_energy() {
        let osc = SystemSpec::hooke(0.7, 1.3, 0.0, 2).unwrap();
        let q = vector(&[0.4, -1.1]);
        let p = vector(&[0.3, 0.9]);
        let expected = 2.0 * osc.hamiltonian(&q, &p) / q.norm_squared();
        assert!((kepler_level(&osc, &q, &p).unwrap() - expected).abs() < 1e-14);
    }
}
