//! Gaussian kernel density estimate with Silverman's rule-of-thumb bandwidth.

use alloc::vec::Vec;

use crate::stats;

const FALLBACK_BANDWIDTH: f64 = 1e-3;

/// Density evaluated on an evenly spaced grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DensityCurve {
    pub bandwidth: f64,
    pub points: Vec<(f64, f64)>,
}

/// `0.9 · min(σ, IQR/1.34) · n^(-1/5)`, with sample σ.
pub fn silverman_bandwidth(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n < 2 {
        return FALLBACK_BANDWIDTH;
    }
    let sd = libm::sqrt(stats::population_variance(sorted) * n as f64 / (n - 1) as f64);
    let iqr = stats::sorted_quantile(sorted, 0.75) - stats::sorted_quantile(sorted, 0.25);
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr / 1.34),
        (true, false) => sd,
        (false, true) => iqr / 1.34,
        (false, false) => return FALLBACK_BANDWIDTH,
    };
    0.9 * spread * libm::pow(n as f64, -0.2)
}

/// Evaluates the KDE of `samples` on `points` grid nodes spanning three bandwidths past the data.
/// `samples` is sorted in place.
pub fn gaussian_kde(samples: &mut [f64], points: usize) -> DensityCurve {
    if samples.is_empty() || points == 0 {
        return DensityCurve::default();
    }
    samples.sort_by(f64::total_cmp);
    let h = silverman_bandwidth(samples);
    let lo = samples[0] - 3.0 * h;
    let hi = samples[samples.len() - 1] + 3.0 * h;
    let step = if points > 1 {
        (hi - lo) / (points - 1) as f64
    } else {
        0.0
    };
    let norm = 1.0 / (samples.len() as f64 * h * libm::sqrt(2.0 * core::f64::consts::PI));
    let points = (0..points)
        .map(|k| {
            let x = lo + step * k as f64;
            let d: f64 = samples
                .iter()
                .map(|s| libm::exp(-0.5 * ((x - s) / h) * ((x - s) / h)))
                .sum();
            (x, d * norm)
        })
        .collect();
    DensityCurve {
        bandwidth: h,
        points,
    }
}
