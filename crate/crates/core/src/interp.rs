//! Piecewise cubic Hermite interpolation on strictly increasing grids.

use crate::Vector;

/// Samples of a curve `y(s)` together with its slope `dy/ds`.
#[derive(Debug, Clone)]
pub struct HermiteCurve {
    params: Vec<f64>,
    values: Vec<Vector>,
    slopes: Vec<Vector>,
}

impl HermiteCurve {
    /// `params` must be strictly increasing and the three inputs equally long.
    pub fn new(params: Vec<f64>, values: Vec<Vector>, slopes: Vec<Vector>) -> Self {
        assert_eq!(params.len(), values.len());
        assert_eq!(params.len(), slopes.len());
        debug_assert!(params.windows(2).all(|w| w[1] > w[0]));
        HermiteCurve { params, values, slopes }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.params[0], *self.params.last().unwrap())
    }

    /// Interpolated value, `None` outside the sampled range.
    pub fn eval(&self, s: f64) -> Option<Vector> {
        let (lo, hi) = self.domain();
        if !(s >= lo && s <= hi) {
            return None;
        }
        let n = self.params.len();
        if n == 1 {
            return Some(self.values[0].clone());
        }
        let k = match self.params.partition_point(|&p| p <= s) {
            0 => 0,
            idx if idx >= n => n - 2,
            idx => idx - 1,
        };
        let (s0, s1) = (self.params[k], self.params[k + 1]);
        let h = s1 - s0;
        let u = (s - s0) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        Some(
            &self.values[k] * h00
                + &self.slopes[k] * (h10 * h)
                + &self.values[k + 1] * h01
                + &self.slopes[k + 1] * (h11 * h),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |s: f64| s * s * s - 2.0 * s;
        let df = |s: f64| 3.0 * s * s - 2.0;
        let params = vec![0.0, 0.4, 1.1, 2.0];
        let curve = HermiteCurve::new(
            params.clone(),
            params.iter().map(|&s| vector(&[f(s)])).collect(),
            params.iter().map(|&s| vector(&[df(s)])).collect(),
        );
        for &s in &[0.0, 0.2, 0.4, 0.9, 1.7, 2.0] {
            assert!((curve.eval(s).unwrap()[0] - f(s)).abs() < 1e-13);
        }
        assert!(curve.eval(2.1).is_none());
        assert!(curve.eval(-0.1).is_none());
    }
}
