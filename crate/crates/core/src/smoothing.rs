//! Savitzky-Golay smoothing.
//!
//! Each output point is the value at that point of the least-squares
//! polynomial fitted to the centred window around it. Near the ends the
//! window is truncated at the series boundary and the polynomial degree is
//! capped at `window points - 1`.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SavitzkyGolay {
    window: usize,
    degree: usize,
}

impl Default for SavitzkyGolay {
    fn default() -> Self {
        Self {
            window: 31,
            degree: 3,
        }
    }
}

impl SavitzkyGolay {
    pub fn new(window: usize, degree: usize) -> Result<Self> {
        if window.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "smoothing window must be odd, got {window}"
            )));
        }
        if degree >= window {
            return Err(Error::InvalidParameter(format!(
                "smoothing degree {degree} must be below the window length {window}"
            )));
        }
        Ok(Self { window, degree })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Weights that map the samples at offsets `-left..=right` to the fitted value at offset 0.
    fn weights(&self, left: usize, right: usize) -> Result<Vec<f64>> {
        let m = left + right + 1;
        let degree = self.degree.min(m - 1);
        let half = (self.window / 2).max(1) as f64;
        let vander = DMatrix::from_fn(m, degree + 1, |r, c| {
            let x = (r as f64 - left as f64) / half;
            libm::pow(x, c as f64)
        });
        let pinv = vander
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::Numerical(format!("smoothing fit failed: {e}")))?;
        Ok(pinv.row(0).iter().copied().collect())
    }

    pub fn apply(&self, series: &[f64]) -> Result<Vec<f64>> {
        let n = series.len();
        if n < self.window {
            return Err(Error::TooShort {
                needed: self.window,
                len: n,
            });
        }
        let half = self.window / 2;
        let interior = self.weights(half, half)?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let left = i.min(half);
            let right = (n - 1 - i).min(half);
            let fitted = if left == half && right == half {
                anchored_dot(&interior, &series[i - half..=i + half], series[i])
            } else {
                anchored_dot(
                    &self.weights(left, right)?,
                    &series[i - left..=i + right],
                    series[i],
                )
            };
            out.push(fitted);
        }
        Ok(out)
    }
}

/// `Σ w_k x_k` evaluated as `c + Σ w_k (x_k − c)`, using that the weights sum to one.
/// Locally constant input then comes back exactly.
fn anchored_dot(w: &[f64], xs: &[f64], c: f64) -> f64 {
    c + w.iter().zip(xs).map(|(a, b)| a * (b - c)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_is_preserved() {
        let xs = vec![0.42; 50];
        let ys = SavitzkyGolay::default().apply(&xs).unwrap();
        assert!(ys.iter().all(|&y| y == 0.42));
    }

    #[test]
    fn quadratic_is_reproduced() {
        let xs: Vec<f64> = (0..60)
            .map(|t| 0.5 - 0.03 * t as f64 + 0.0007 * (t * t) as f64)
            .collect();
        let ys = SavitzkyGolay::new(11, 2).unwrap().apply(&xs).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn interior_weights_match_tabulated_five_point_quadratic() {
        // Classic 5-point quadratic smoothing coefficients (-3, 12, 17, 12, -3) / 35.
        let w = SavitzkyGolay::new(5, 2).unwrap().weights(2, 2).unwrap();
        let expected = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|c| c / 35.0);
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(SavitzkyGolay::new(30, 3).is_err());
        assert!(SavitzkyGolay::new(5, 5).is_err());
        assert!(matches!(
            SavitzkyGolay::new(7, 2).unwrap().apply(&[1.0; 6]),
            Err(Error::TooShort { needed: 7, len: 6 })
        ));
    }
}
