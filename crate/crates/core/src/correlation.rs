//! Windowed correlation matrices of log returns and their normalized L1 norm.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kde::{gaussian_kde, DensityCurve};
use crate::returns::{ReturnsPanel, Window};
use crate::series::DaySeries;
use crate::stats;

/// Pearson correlation matrix of returns over an inclusive window of days.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub window: Window,
    pub matrix: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn n_assets(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Standardizes each asset's returns over `window` (population std) into an N×S matrix.
fn standardized(returns: &ReturnsPanel, window: Window) -> Result<DMatrix<f64>> {
    let n = returns.n_assets();
    let s = window.len();
    let mut z = DMatrix::zeros(n, s);
    for i in 0..n {
        let xs = returns.window_row(i, window);
        let m = stats::mean(&xs);
        let sd = stats::population_std(&xs);
        if stats::is_degenerate(sd, m) {
            return Err(Error::DegenerateAsset {
                asset: i,
                start: window.start,
                end: window.end,
            });
        }
        for (k, x) in xs.iter().enumerate() {
            z[(i, k)] = (x - m) / sd;
        }
    }
    Ok(z)
}

/// Correlation matrix over `window`, computed as `(1/S) Z Zᵀ` of the standardized returns.
pub fn correlation_matrix(returns: &ReturnsPanel, window: Window) -> Result<CorrelationMatrix> {
    returns.check_window(window, 2)?;
    let z = standardized(returns, window)?;
    let mut m = (&z * z.transpose()) / window.len() as f64;
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let v = m[(i, j)].clamp(-1.0, 1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(CorrelationMatrix { window, matrix: m })
}

/// Mean absolute entry, `(1/N²) Σ |m_ij|`, diagonal included.
pub fn l1_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() * m.ncols();
    if n == 0 {
        return 0.0;
    }
    m.iter().map(|v| libm::fabs(*v)).sum::<f64>() / n as f64
}

/// `ν(t)` for every end day `t = S..=T` of a trailing `window_days` window.
pub fn rolling_norm_series(returns: &ReturnsPanel, window_days: usize) -> Result<DaySeries> {
    let (days, values) = returns.rolling(window_days, |w| {
        correlation_matrix(returns, w).map(|c| l1_norm(&c.matrix))
    })?;
    Ok(DaySeries { days, values })
}

/// A labelled static window of days.
#[derive(Debug, Clone, PartialEq)]
pub struct Period {
    pub label: String,
    pub window: Window,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryStatsOptions {
    pub exclude_diagonal: bool,
    /// Number of grid points in each exported density curve.
    pub density_points: usize,
}

impl Default for EntryStatsOptions {
    fn default() -> Self {
        Self {
            exclude_diagonal: false,
            density_points: 512,
        }
    }
}

/// Distribution summary of the correlation entries over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEntryStats {
    pub label: String,
    pub window: Window,
    /// Signed mean of the entries.
    pub mean: f64,
    /// Population standard deviation of the entries.
    pub std: f64,
    /// Normalized L1 norm of the full matrix.
    pub l1_norm: f64,
    pub density: DensityCurve,
}

/// Entries of `m` in row-major order, optionally skipping the diagonal.
pub fn matrix_entries(m: &DMatrix<f64>, exclude_diagonal: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !(exclude_diagonal && i == j) {
                out.push(m[(i, j)]);
            }
        }
    }
    out
}

pub fn period_entry_stats(
    returns: &ReturnsPanel,
    periods: &[Period],
    options: EntryStatsOptions,
) -> Result<Vec<PeriodEntryStats>> {
    periods
        .iter()
        .map(|p| {
            let w = p.window;
            if returns.check_window(w, 2).is_err() {
                return Err(Error::PeriodOutOfRange {
                    label: p.label.clone(),
                    start: w.start,
                    end: w.end,
                    days: returns.days(),
                });
            }
            let c = correlation_matrix(returns, w)?;
            let mut entries = matrix_entries(&c.matrix, options.exclude_diagonal);
            if entries.is_empty() {
                // A single asset with its diagonal excluded leaves nothing to summarize.
                return Err(Error::InvalidParameter(
                    "no correlation entries left after excluding the diagonal".into(),
                ));
            }
            let mean = stats::mean(&entries);
            let std = stats::population_std(&entries);
            let density = gaussian_kde(&mut entries, options.density_points);
            Ok(PeriodEntryStats {
                label: p.label.clone(),
                window: w,
                mean,
                std,
                l1_norm: l1_norm(&c.matrix),
                density,
            })
        })
        .collect()
}
