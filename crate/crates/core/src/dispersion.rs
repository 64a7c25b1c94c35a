//! Volatility dispersion: how evenly total volatility is spread over assets.
//!
//! Each day's volatilities are normalized into a probability vector `p(t)`.
//! Days are compared with the L1-Wasserstein distance between the empirical
//! measures `(1/N) Σ δ_{p_i}`, which for equal-size supports reduces to the
//! mean absolute difference of the sorted vectors.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::series::DaySeries;
use crate::volatility::VolatilityPanel;

#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityDistribution {
    pub day: usize,
    pub p: Vec<f64>,
}

/// Normalizes raw volatilities to sum to one.
pub fn normalize(sigmas: &[f64], day: usize) -> Result<VolatilityDistribution> {
    let total: f64 = sigmas.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateDate { day });
    }
    Ok(VolatilityDistribution {
        day,
        p: sigmas.iter().map(|s| s / total).collect(),
    })
}

pub fn volatility_distribution(
    vol: &VolatilityPanel,
    day: usize,
) -> Result<VolatilityDistribution> {
    let sigmas = vol.on_day(day).ok_or(Error::InvalidWindow {
        start: day,
        end: day,
        days: vol.days.last().copied().unwrap_or(0),
    })?;
    normalize(&sigmas, day)
}

fn sorted(p: &[f64]) -> Vec<f64> {
    let mut v = p.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn sorted_l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum::<f64>() / a.len() as f64
}

/// L1-Wasserstein distance between the empirical measures of two equal-length vectors.
pub fn wasserstein(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if p.is_empty() {
        return Ok(0.0);
    }
    Ok(sorted_l1(&sorted(p), &sorted(q)))
}

/// Largest possible distance between two probability vectors of length `n`.
pub fn wasserstein_upper_bound(n: usize) -> f64 {
    let n = n as f64;
    (2.0 / n) * (1.0 - 1.0 / n)
}

/// `Σ (p_i − 1/N)²`.
pub fn intra_volatility_variance(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    p.iter().map(|a| (a - u) * (a - u)).sum()
}

/// Pairwise distances between the normalized volatility vectors of all usable days.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionMatrix {
    pub days: Vec<usize>,
    pub matrix: DMatrix<f64>,
    /// Days dropped because every volatility was zero.
    pub excluded: Vec<usize>,
}

/// Normalized vectors for every usable day, plus the days that had to be skipped.
pub fn distributions(vol: &VolatilityPanel) -> (Vec<VolatilityDistribution>, Vec<usize>) {
    let mut good = Vec::new();
    let mut excluded = Vec::new();
    for (k, &day) in vol.days.iter().enumerate() {
        let sigmas: Vec<f64> = vol.sigmas.column(k).iter().copied().collect();
        match normalize(&sigmas, day) {
            Ok(d) => good.push(d),
            Err(_) => excluded.push(day),
        }
    }
    (good, excluded)
}

pub fn dispersion_matrix(vol: &VolatilityPanel) -> Result<DispersionMatrix> {
    let (dists, excluded) = distributions(vol);
    if dists.len() < 2 {
        return Err(Error::TooFewDates);
    }
    let sorted_p: Vec<Vec<f64>> = dists.iter().map(|d| sorted(&d.p)).collect();
    let w = dists.len();
    let mut matrix = DMatrix::zeros(w, w);
    for s in 0..w {
        for t in (s + 1)..w {
            let d = sorted_l1(&sorted_p[s], &sorted_p[t]);
            matrix[(s, t)] = d;
            matrix[(t, s)] = d;
        }
    }
    Ok(DispersionMatrix {
        days: dists.iter().map(|d| d.day).collect(),
        matrix,
        excluded,
    })
}

/// `Var(p(t))` for every usable day; skipped days are returned separately.
pub fn variance_series(vol: &VolatilityPanel) -> (DaySeries, Vec<usize>) {
    let (dists, excluded) = distributions(vol);
    let series = DaySeries {
        days: dists.iter().map(|d| d.day).collect(),
        values: dists
            .iter()
            .map(|d| intra_volatility_variance(&d.p))
            .collect(),
    };
    (series, excluded)
}
