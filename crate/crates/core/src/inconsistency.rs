//! Inconsistency between the size, return and volatility similarity
//! structures of a panel.
//!
//! For each end day `t`, three distance matrices over the trailing window are
//! rescaled to affinities `1 - D / max(D)`, and the normalized L1 norms of
//! `A_size - A_returns` and `A_size - A_volatility` are tracked over time.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::correlation::l1_norm;
use crate::error::{Error, Result};
use crate::returns::{ReturnsPanel, Window};
use crate::volatility::VolatilityPanel;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrices {
    /// `(1/S) |Σ_k (M_i(k) − M_j(k))|`
    pub size: DMatrix<f64>,
    /// `|Σ_k (R_i(k) − R_j(k))|`, no averaging.
    pub returns: DMatrix<f64>,
    /// `|σ_i(t) − σ_j(t)|`
    pub volatility: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AffinityKind {
    Size,
    Returns,
    Volatility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    pub day: usize,
    pub kind: AffinityKind,
    pub matrix: DMatrix<f64>,
}

fn pairwise_abs_diff(values: &[f64], scale: f64) -> DMatrix<f64> {
    let n = values.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            libm::fabs(values[i] - values[j]) * scale
        }
    })
}

/// The three distance matrices for end day `day` of a `window_days` window.
///
/// `caps` is N×(T+1) on the price-day axis; `vol` must use the same window.
pub fn distance_matrices(
    caps: &DMatrix<f64>,
    returns: &ReturnsPanel,
    vol: &VolatilityPanel,
    day: usize,
    window_days: usize,
) -> Result<DistanceMatrices> {
    let n = returns.n_assets();
    if caps.nrows() != n || vol.n_assets() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: caps.nrows().min(vol.n_assets()),
        });
    }
    if caps.ncols() != returns.days() + 1 {
        return Err(Error::LengthMismatch {
            left: caps.ncols(),
            right: returns.days() + 1,
        });
    }
    if vol.window_days != window_days {
        return Err(Error::InvalidParameter(alloc::format!(
            "volatility window {} differs from distance window {window_days}",
            vol.window_days
        )));
    }
    if day < window_days || day > returns.days() {
        return Err(Error::InvalidWindow {
            start: day + 1 - window_days.min(day + 1),
            end: day,
            days: returns.days(),
        });
    }
    let w = Window::trailing(day, window_days);
    let cap_sums: Vec<f64> = (0..n)
        .map(|i| (w.start..=w.end).map(|k| caps[(i, k)]).sum())
        .collect();
    let ret_sums: Vec<f64> = (0..n)
        .map(|i| (w.start..=w.end).map(|k| returns.get(i, k)).sum())
        .collect();
    let sigmas = vol.on_day(day).ok_or(Error::InvalidWindow {
        start: w.start,
        end: w.end,
        days: returns.days(),
    })?;
    Ok(DistanceMatrices {
        size: pairwise_abs_diff(&cap_sums, 1.0 / window_days as f64),
        returns: pairwise_abs_diff(&ret_sums, 1.0),
        volatility: pairwise_abs_diff(&sigmas, 1.0),
    })
}

/// `1 − D / max(D)`; an all-zero `D` maps to all ones.
pub fn to_affinity(d: &DMatrix<f64>) -> DMatrix<f64> {
    let max = d.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return DMatrix::from_element(d.nrows(), d.ncols(), 1.0);
    }
    d.map(|v| 1.0 - v / max)
}

/// Affinities of all three kinds for one end day.
pub fn affinities(dist: &DistanceMatrices, day: usize) -> [AffinityMatrix; 3] {
    [
        AffinityMatrix {
            day,
            kind: AffinityKind::Size,
            matrix: to_affinity(&dist.size),
        },
        AffinityMatrix {
            day,
            kind: AffinityKind::Returns,
            matrix: to_affinity(&dist.returns),
        },
        AffinityMatrix {
            day,
            kind: AffinityKind::Volatility,
            matrix: to_affinity(&dist.volatility),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InconsistencySeries {
    pub days: Vec<usize>,
    /// Size vs returns.
    pub nu_mr: Vec<f64>,
    /// Size vs volatility.
    pub nu_msigma: Vec<f64>,
}

/// Size-returns and size-volatility inconsistency matrices for one day.
pub fn inconsistency_matrices(dist: &DistanceMatrices) -> (DMatrix<f64>, DMatrix<f64>) {
    let a_m = to_affinity(&dist.size);
    let inc_mr = &a_m - to_affinity(&dist.returns);
    let inc_ms = &a_m - to_affinity(&dist.volatility);
    (inc_mr, inc_ms)
}

pub fn inconsistency_norms(
    caps: &DMatrix<f64>,
    returns: &ReturnsPanel,
    vol: &VolatilityPanel,
    window_days: usize,
) -> Result<InconsistencySeries> {
    let (days, pairs) = returns.rolling(window_days, |w| {
        let dist = distance_matrices(caps, returns, vol, w.end, window_days)?;
        let (mr, ms) = inconsistency_matrices(&dist);
        Ok((l1_norm(&mr), l1_norm(&ms)))
    })?;
    let (nu_mr, nu_msigma) = pairs.into_iter().unzip();
    Ok(InconsistencySeries {
        days,
        nu_mr,
        nu_msigma,
    })
}
