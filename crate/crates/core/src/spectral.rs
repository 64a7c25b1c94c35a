//! Market-mode strength: the normalized leading eigenvalue of rolling
//! correlation matrices, and the rolling total market size it is compared to.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::correlation::{correlation_matrix, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::returns::{ReturnsPanel, Window};
use crate::series::DaySeries;
use crate::stats;

/// Eigenvalues more negative than this are a numerical failure, not rounding.
pub const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 10_000;
const POWER_MAX_ITER: usize = 200_000;

/// Eigenvalues of a symmetric positive semi-definite matrix, largest first.
pub fn eigen_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    for v in values.iter_mut() {
        if *v < -NEGATIVE_EIGENVALUE_TOLERANCE {
            return Err(Error::Numerical(format!(
                "eigenvalue {v:e} is negative beyond tolerance"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Operator 2-norm of a symmetric matrix by power iteration on Rayleigh quotients.
pub fn power_iteration_norm(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    // Uneven start so that the leading eigenvector is never orthogonal to it by symmetry.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + libm::sin(1.0 + i as f64) / 2.0);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = m * &v;
        let next = v.dot(&w);
        let residual = (&w - &v * next).norm();
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(0.0);
        }
        let converged = residual <= 1e-11 * libm::fabs(next)
            || libm::fabs(next - lambda) <= 1e-15 * libm::fabs(next);
        lambda = next;
        if converged {
            return Ok(libm::fabs(lambda));
        }
        v = w / wn;
    }
    Err(Error::Numerical(format!(
        "power iteration did not converge in {POWER_MAX_ITER} steps"
    )))
}

/// Both routes to the normalized leading eigenvalue of one matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNormCheck {
    /// `λ₁ / N` from the full eigendecomposition.
    pub lambda1_normalized: f64,
    /// `‖Ψ‖_op / N` from power iteration.
    pub opnorm_over_n: f64,
    pub difference: f64,
    /// `|Σλ_i − N|`.
    pub trace_gap: f64,
}

pub fn verify_operator_norm_identity(m: &CorrelationMatrix) -> Result<OperatorNormCheck> {
    let n = m.n_assets() as f64;
    let spectrum = eigen_spectrum(&m.matrix)?;
    let lambda1_normalized = spectrum.first().copied().unwrap_or(0.0) / n;
    let opnorm_over_n = power_iteration_norm(&m.matrix)? / n;
    Ok(OperatorNormCheck {
        lambda1_normalized,
        opnorm_over_n,
        difference: libm::fabs(lambda1_normalized - opnorm_over_n),
        trace_gap: libm::fabs(spectrum.iter().sum::<f64>() - n),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralSeries {
    pub days: Vec<usize>,
    /// `λ₁(t) / N`.
    pub lambda1: Vec<f64>,
    /// Full spectra per day, when requested.
    pub spectra: Option<Vec<Vec<f64>>>,
}

impl SpectralSeries {
    pub fn as_day_series(&self) -> DaySeries {
        DaySeries {
            days: self.days.clone(),
            values: self.lambda1.clone(),
        }
    }
}

pub fn lambda1_series(
    returns: &ReturnsPanel,
    window_days: usize,
    keep_spectra: bool,
) -> Result<SpectralSeries> {
    let n = returns.n_assets() as f64;
    let (days, spectra) = returns.rolling(window_days, |w| {
        eigen_spectrum(&correlation_matrix(returns, w)?.matrix)
    })?;
    let lambda1 = spectra.iter().map(|s| s[0] / n).collect();
    Ok(SpectralSeries {
        days,
        lambda1,
        spectra: keep_spectra.then_some(spectra),
    })
}

/// Trailing `window_days` average of the cross-asset market-cap total.
///
/// `caps` is N×(T+1) on the price-day axis; values are reported for end days `window_days..=T`.
pub fn rolling_market_size(caps: &DMatrix<f64>, window_days: usize) -> Result<DaySeries> {
    let last_day = caps.ncols().saturating_sub(1);
    if window_days < 1 {
        return Err(Error::InvalidParameter(
            "market-size window must be positive".into(),
        ));
    }
    if last_day < window_days {
        return Err(Error::TooShort {
            needed: window_days + 1,
            len: caps.ncols(),
        });
    }
    let totals: Vec<f64> = caps.column_iter().map(|c| c.sum()).collect();
    let mut days = Vec::new();
    let mut values = Vec::new();
    for end in window_days..=last_day {
        let w = Window::trailing(end, window_days);
        days.push(end);
        values.push(totals[w.start..=w.end].iter().sum::<f64>() / window_days as f64);
    }
    Ok(DaySeries { days, values })
}

/// Pearson correlation of two day-aligned series.
pub fn series_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    stats::pearson(x, y)
}
