use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::Result;
use crate::returns::ReturnsPanel;
use crate::stats;

/// Trailing-window population standard deviation of each asset's returns.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPanel {
    pub window_days: usize,
    /// End days `window_days..=T`.
    pub days: Vec<usize>,
    /// N×W; column `k` belongs to `days[k]`.
    pub sigmas: DMatrix<f64>,
}

impl VolatilityPanel {
    pub fn n_assets(&self) -> usize {
        self.sigmas.nrows()
    }

    pub fn column_of(&self, day: usize) -> Option<usize> {
        self.days.binary_search(&day).ok()
    }

    /// Volatilities of all assets on `day`.
    pub fn on_day(&self, day: usize) -> Option<Vec<f64>> {
        self.column_of(day)
            .map(|k| self.sigmas.column(k).iter().copied().collect())
    }
}

pub fn rolling_volatility(returns: &ReturnsPanel, window_days: usize) -> Result<VolatilityPanel> {
    let n = returns.n_assets();
    let (days, columns) = returns.rolling(window_days, |w| {
        Ok((0..n)
            .map(|i| stats::population_std(&returns.window_row(i, w)))
            .collect::<Vec<f64>>())
    })?;
    let sigmas = DMatrix::from_fn(n, days.len(), |i, k| columns[k][i]);
    Ok(VolatilityPanel {
        window_days,
        days,
        sigmas,
    })
}
