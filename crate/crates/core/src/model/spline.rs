use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Natural cubic spline through complex samples, identically zero outside the knots.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ComplexSpline {
    x: Vec<f64>,
    y: Vec<Complex64>,
    // second derivatives at the knots
    m: Vec<Complex64>,
}

impl ComplexSpline {
    /// `x` must be strictly increasing with at least two entries.
    pub(crate) fn new(x: Vec<f64>, y: Vec<Complex64>) -> Self {
        let n = x.len();
        let mut m = vec![Complex64::new(0.0, 0.0); n];
        if n > 2 {
            // Thomas algorithm on the interior equations, natural ends.
            let mut c_prime = vec![0.0; n];
            let mut d_prime = vec![Complex64::new(0.0, 0.0); n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let rhs = (y[i + 1] - y[i]) * (6.0 / h1) - (y[i] - y[i - 1]) * (6.0 / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c_prime[i - 1];
                c_prime[i] = h1 / diag;
                d_prime[i] = (rhs - d_prime[i - 1] * h0) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d_prime[i] - m[i + 1] * c_prime[i];
            }
        }
        Self { x, y, m }
    }

    pub(crate) fn knots(&self) -> &[f64] {
        &self.x
    }

    pub(crate) fn lower(&self) -> f64 {
        self.x[0]
    }

    pub(crate) fn upper(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub(crate) fn max_abs(&self) -> f64 {
        self.y.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    pub(crate) fn end_values(&self) -> (Complex64, Complex64) {
        (self.y[0], self.y[self.y.len() - 1])
    }

    /// Derivatives of order `0..=3` at `x`, taken from the segment on the given side.
    /// Outside the knot range everything vanishes.
    pub(crate) fn jet(&self, x: f64, from_left: bool) -> [Complex64; 4] {
        let zero = Complex64::new(0.0, 0.0);
        let n = self.x.len();
        let (lo, hi) = (self.x[0], self.x[n - 1]);
        let outside = if from_left { x <= lo || x > hi } else { x < lo || x >= hi };
        if outside {
            return [zero; 4];
        }
        // segment index i with x in [x_i, x_{i+1}], choosing the side at knots
        let pos = self.x.partition_point(|&k| if from_left { k < x } else { k <= x });
        let i = (pos - 1).min(n - 2);
        let h = self.x[i + 1] - self.x[i];
        let a = self.x[i + 1] - x;
        let b = x - self.x[i];
        let (m0, m1, y0, y1) = (self.m[i], self.m[i + 1], self.y[i], self.y[i + 1]);
        let value = m0 * (a * a * a / (6.0 * h))
            + m1 * (b * b * b / (6.0 * h))
            + (y0 / h - m0 * (h / 6.0)) * a
            + (y1 / h - m1 * (h / 6.0)) * b;
        let d1 = -m0 * (a * a / (2.0 * h)) + m1 * (b * b / (2.0 * h)) + (y1 - y0) / h - (m1 - m0) * (h / 6.0);
        let d2 = m0 * (a / h) + m1 * (b / h);
        let d3 = (m1 - m0) / h;
        [value, d1, d2, d3]
    }
}
