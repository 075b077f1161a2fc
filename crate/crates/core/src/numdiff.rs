//! Central finite differences.

use crate::Vector;

/// Default step for first derivatives.
pub const GRADIENT_STEP: f64 = 1e-6;
/// Default step for second derivatives.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-5;

/// Central-difference gradient of a scalar field; the step is scaled by
/// `max(1, |x_i|)` per component.
pub fn gradient<F>(f: F, x: &Vector, step: f64) -> Vector
where
    F: Fn(&Vector) -> f64,
{
    let mut probe = x.clone();
    Vector::from_fn(x.len(), |i, _| {
        let h = step * x[i].abs().max(1.0);
        let orig = probe[i];
        probe[i] = orig + h;
        let plus = f(&probe);
        probe[i] = orig - h;
        let minus = f(&probe);
        probe[i] = orig;
        (plus - minus) / (2.0 * h)
    })
}

/// First derivative on a possibly non-uniform grid by the three-point formula
/// at interior node `i`.
pub fn nonuniform_first(params: &[f64], values: &[Vector], i: usize) -> Vector {
    let h0 = params[i] - params[i - 1];
    let h1 = params[i + 1] - params[i];
    let a = -h1 / (h0 * (h0 + h1));
    let b = (h1 - h0) / (h0 * h1);
    let c = h0 / (h1 * (h0 + h1));
    &values[i - 1] * a + &values[i] * b + &values[i + 1] * c
}

/// Second derivative on a possibly non-uniform grid at interior node `i`.
pub fn nonuniform_second(params: &[f64], values: &[Vector], i: usize) -> Vector {
    let h0 = params[i] - params[i - 1];
    let h1 = params[i + 1] - params[i];
    let a = 2.0 / (h0 * (h0 + h1));
    let b = -2.0 / (h0 * h1);
    let c = 2.0 / (h1 * (h0 + h1));
    &values[i - 1] * a + &values[i] * b + &values[i + 1] * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn gradient_of_quadratic() {
        let g = gradient(|x| x[0] * x[0] + 3.0 * x[1], &vector(&[2.0, -1.0]), GRADIENT_STEP);
        assert!((g[0] - 4.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn nonuniform_stencils_are_exact_for_quadratics() {
        let params = [0.0, 0.3, 0.7];
        let values: Vec<Vector> = params.iter().map(|&s| vector(&[s * s, 2.0 * s])).collect();
        let d1 = nonuniform_first(&params, &values, 1);
        let d2 = nonuniform_second(&params, &values, 1);
        assert!((d1[0] - 0.6).abs() < 1e-14 && (d1[1] - 2.0).abs() < 1e-14);
        assert!((d2[0] - 2.0).abs() < 1e-12 && d2[1].abs() < 1e-12);
    }
}
