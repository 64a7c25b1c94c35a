//! Daily log returns.
//!
//! Day indices follow the price axis: a price panel covers days `0..=T` and
//! its returns cover days `1..=T`, where the return on day `t` is
//! `ln(close(t) / close(t - 1))`.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Inclusive range of days `[start, end]` on the returns axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    /// The `len`-day window finishing on `end`. `end + 1` must be at least `len`.
    pub fn trailing(end: usize, len: usize) -> Self {
        Self {
            start: end + 1 - len,
            end,
        }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

/// N×T matrix of log returns; row `i` is asset `i`, column `t - 1` is day `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    returns: DMatrix<f64>,
}

impl ReturnsPanel {
    /// Builds log returns from an N×(T+1) matrix of closing prices.
    pub fn from_closes(closes: &DMatrix<f64>) -> Result<Self> {
        let (n, cols) = closes.shape();
        if cols < 2 {
            return Err(Error::TooShort {
                needed: 2,
                len: cols,
            });
        }
        for i in 0..n {
            for t in 0..cols {
                let c = closes[(i, t)];
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::NonPositivePrice { asset: i, day: t });
                }
            }
        }
        let returns = DMatrix::from_fn(n, cols - 1, |i, t| {
            libm::log(closes[(i, t + 1)] / closes[(i, t)])
        });
        Ok(Self { returns })
    }

    /// Wraps an existing N×T matrix whose column `t - 1` holds day `t`.
    pub fn from_matrix(returns: DMatrix<f64>) -> Self {
        Self { returns }
    }

    pub fn n_assets(&self) -> usize {
        self.returns.nrows()
    }

    /// Number of return days `T`.
    pub fn days(&self) -> usize {
        self.returns.ncols()
    }

    /// Return of asset `asset` on day `day` (1-based).
    pub fn get(&self, asset: usize, day: usize) -> f64 {
        self.returns[(asset, day - 1)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.returns
    }

    /// Returns of one asset over `window`.
    pub fn window_row(&self, asset: usize, window: Window) -> Vec<f64> {
        (window.start..=window.end)
            .map(|d| self.get(asset, d))
            .collect()
    }

    /// Validates that `window` lies in `1..=T` and spans at least `min_len` days.
    pub fn check_window(&self, window: Window, min_len: usize) -> Result<()> {
        let days = self.days();
        if window.start < 1
            || window.end > days
            || window.end < window.start
            || window.len() < min_len
        {
            return Err(Error::InvalidWindow {
                start: window.start,
                end: window.end,
                days,
            });
        }
        Ok(())
    }

    /// Applies `f` to each trailing `window_days` window, for end days `window_days..=T`.
    pub(crate) fn rolling<T>(
        &self,
        window_days: usize,
        mut f: impl FnMut(Window) -> Result<T>,
    ) -> Result<(Vec<usize>, Vec<T>)> {
        if window_days < 2 {
            return Err(Error::InvalidParameter(alloc::format!(
                "rolling window must span at least 2 days, got {window_days}"
            )));
        }
        if self.days() < window_days {
            return Err(Error::TooShort {
                needed: window_days,
                len: self.days(),
            });
        }
        let mut days = Vec::with_capacity(self.days() - window_days + 1);
        let mut out = Vec::with_capacity(self.days() - window_days + 1);
        for end in window_days..=self.days() {
            days.push(end);
            out.push(f(Window::trailing(end, window_days))?);
        }
        Ok((days, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn row(closes: &[f64]) -> ReturnsPanel {
        ReturnsPanel::from_closes(&DMatrix::from_row_slice(1, closes.len(), closes)).unwrap()
    }

    #[test]
    fn constant_price_has_zero_returns() {
        let r = row(&[100.0, 100.0, 100.0]);
        assert_eq!(r.window_row(0, Window::new(1, 2)), [0.0, 0.0]);
    }

    #[test]
    fn exponential_prices_give_unit_returns() {
        let e = core::f64::consts::E;
        let r = row(&[1.0, e, e * e]);
        assert_relative_eq!(r.get(0, 1), 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.get(0, 2), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ten_percent_gain() {
        let r = row(&[100.0, 110.0]);
        assert_eq!(r.days(), 1);
        assert_relative_eq!(r.get(0, 1), 0.09531017980432493, epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_positive_close() {
        let closes = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 2.0]);
        assert_eq!(
            ReturnsPanel::from_closes(&closes),
            Err(Error::NonPositivePrice { asset: 0, day: 1 })
        );
    }

    #[test]
    fn window_validation() {
        let r = row(&[1.0, 2.0, 3.0, 4.0]);
        assert!(r.check_window(Window::new(1, 3), 2).is_ok());
        assert!(r.check_window(Window::new(0, 2), 2).is_err());
        assert!(r.check_window(Window::new(2, 4), 2).is_err());
        assert!(r.check_window(Window::new(2, 2), 2).is_err());
    }
}
