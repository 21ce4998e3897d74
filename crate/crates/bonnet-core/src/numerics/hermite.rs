//! Piecewise-cubic Hermite interpolation with exact derivative nodes.
//!
//! Used for the reparametrization tables v(ψ), w(ψ): both the values and
//! their derivatives are known exactly at the nodes (the derivatives are the
//! integrands), so cubic Hermite interpolation is O(h⁴) accurate and keeps
//! monotonicity on the tabulated data. A safeguarded Newton inverse is
//! provided for strictly monotone tables.

use crate::error::{Error, Result};

/// Monotone-in-x table of (x, y, dy/dx) triples with cubic Hermite
/// evaluation between nodes.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl HermiteTable {
    /// Build from strictly increasing abscissae `x` with values `y` and
    /// exact derivatives `dy`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() != dy.len() || x.len() < 2 {
            return Err(Error::GridMismatch(format!(
                "Hermite table needs equal-length x/y/dy with ≥ 2 nodes (got {}, {}, {})",
                x.len(),
                y.len(),
                dy.len()
            )));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridMismatch(
                "Hermite table abscissae must be strictly increasing".into(),
            ));
        }
        Ok(HermiteTable { x, y, dy })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().expect("non-empty by construction")
    }

    pub fn y_first(&self) -> f64 {
        self.y[0]
    }

    pub fn y_last(&self) -> f64 {
        *self.y.last().expect("non-empty by construction")
    }

    /// Index of the segment containing `x` (clamped to the table range).
    fn segment(&self, x: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&x).expect("finite abscissae")) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.x.len() - 2),
        }
    }

    /// Interpolated value at `x` (clamped evaluation outside the range).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.dy[i] + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1]
    }

    /// Derivative of the interpolant at `x`.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.y[i] + d10 * self.dy[i] + d01 * self.y[i + 1] + d11 * self.dy[i + 1]
    }

    /// Solve `eval(x) = y` for strictly increasing tables.
    ///
    /// Newton iteration on the interpolant with a bisection safeguard; `y`
    /// is clamped to the tabulated range.
    pub fn inverse(&self, y: f64) -> f64 {
        let y = y.clamp(self.y_first().min(self.y_last()), self.y_first().max(self.y_last()));
        // Locate the segment by value (y is monotone along nodes).
        let mut lo = 0usize;
        let mut hi = self.x.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.y[mid] <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (mut a, mut b) = (self.x[lo], self.x[hi]);
        let span = self.y[hi] - self.y[lo];
        let mut x = if span.abs() > 0.0 {
            a + (y - self.y[lo]) / span * (b - a)
        } else {
            0.5 * (a + b)
        };
        for _ in 0..40 {
            let fx = self.eval(x) - y;
            if fx.abs() <= 1e-15 * (1.0 + y.abs()) {
                return x;
            }
            if fx > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let d = self.eval_deriv(x);
            let step = if d != 0.0 { fx / d } else { 0.0 };
            let candidate = x - step;
            x = if step != 0.0 && candidate > a && candidate < b {
                candidate
            } else {
                0.5 * (a + b)
            };
            if (b - a) <= f64::EPSILON * (1.0 + x.abs()) {
                return x;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sin_table(n: usize) -> HermiteTable {
        let x: Vec<f64> = (0..=n).map(|i| 0.5 * PI * i as f64 / n as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| t.sin()).collect();
        let dy: Vec<f64> = x.iter().map(|&t| t.cos()).collect();
        HermiteTable::new(x, y, dy).unwrap()
    }

    #[test]
    fn fourth_order_accuracy() {
        let coarse = sin_table(16);
        let fine = sin_table(32);
        let mut err_coarse: f64 = 0.0;
        let mut err_fine: f64 = 0.0;
        for i in 0..1000 {
            let x = 0.5 * PI * (i as f64 + 0.5) / 1000.0;
            err_coarse = err_coarse.max((coarse.eval(x) - x.sin()).abs());
            err_fine = err_fine.max((fine.eval(x) - x.sin()).abs());
        }
        // Halving h should shrink the max error by ~16x.
        assert!(err_fine < err_coarse / 10.0, "{err_coarse:.3e} vs {err_fine:.3e}");
        assert!(err_coarse < 1e-6);
    }

    #[test]
    fn derivative_matches() {
        let table = sin_table(64);
        for i in 0..100 {
            let x = 0.5 * PI * (i as f64 + 0.3) / 100.0;
            assert_abs_diff_eq!(table.eval_deriv(x), x.cos(), epsilon = 1e-6);
        }
    }

    #[test]
    fn inverse_round_trips() {
        let table = sin_table(64);
        for i in 0..50 {
            let x = 0.5 * PI * (i as f64 + 0.7) / 51.0;
            let y = table.eval(x);
            assert_abs_diff_eq!(table.inverse(y), x, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_monotone_abscissae() {
        assert!(HermiteTable::new(vec![0.0, 0.0, 1.0], vec![0.0; 3], vec![0.0; 3]).is_err());
    }
}
