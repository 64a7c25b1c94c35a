//! Small descriptive-statistics helpers shared by the analysis modules.

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Two-pass population variance (divisor `n`).
pub fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub fn population_std(xs: &[f64]) -> f64 {
    libm::sqrt(population_variance(xs))
}

/// True when the spread of `xs` is indistinguishable from rounding noise.
pub(crate) fn is_degenerate(std: f64, mean: f64) -> bool {
    !(std > 64.0 * f64::EPSILON * libm::fabs(mean))
}

/// Pearson correlation of two aligned series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            len: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let n = x.len() as f64;
    if is_degenerate(libm::sqrt(sxx / n), mx) || is_degenerate(libm::sqrt(syy / n), my) {
        return Err(Error::DegenerateSeries);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Linear-interpolation sample quantile of already sorted data, `q` in [0, 1].
pub(crate) fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = libm::ceil(pos) as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}
