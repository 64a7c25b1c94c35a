//! Turning points of a smoothed series.
//!
//! Detection is two-step. Candidates are found by scanning forward for points
//! that are the maximum (peak) or minimum (trough) of their clamped `±l`
//! neighbourhood, keeping peaks and troughs alternating: a higher peak
//! replaces the current one, a lower or equal one is dropped, and a trough is
//! only accepted below the last peak (symmetrically from a trough).
//! Refinement then drops later peaks smaller than `delta` times the previous
//! peak, and drops adjacent pairs whose mean log change per day is below
//! `epsilon`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPointParams {
    /// Neighbourhood half-width in days.
    pub l: usize,
    /// Peak-ratio threshold.
    pub delta: f64,
    /// Log-gradient threshold.
    pub epsilon: f64,
}

impl Default for TurningPointParams {
    fn default() -> Self {
        Self {
            l: 17,
            delta: 0.2,
            epsilon: 0.01,
        }
    }
}

impl TurningPointParams {
    pub fn new(l: usize, delta: f64, epsilon: f64) -> Result<Self> {
        let p = Self { l, delta, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 1 {
            return Err(Error::InvalidParameter(
                "turning-point l must be at least 1".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "turning-point delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "turning-point epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TurningKind {
    Peak,
    Trough,
}

impl TurningKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TurningKind::Peak => "peak",
            TurningKind::Trough => "trough",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    /// Position in the input series.
    pub index: usize,
    /// Min-adjusted value at `index`.
    pub value: f64,
    pub kind: TurningKind,
}

/// Alternating, index-ordered turning points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TurningPointSequence {
    points: Vec<TurningPoint>,
}

impl TurningPointSequence {
    /// Wraps `points` after checking order, alternation and peak dominance.
    pub fn from_points(points: Vec<TurningPoint>) -> Result<Self> {
        for pair in points.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b.index <= a.index {
                return Err(Error::InvalidParameter(
                    "turning points must have increasing indices".into(),
                ));
            }
            if a.kind == b.kind {
                return Err(Error::InvalidParameter(
                    "turning points must alternate".into(),
                ));
            }
            let (peak, trough) = if a.kind == TurningKind::Peak {
                (a, b)
            } else {
                (b, a)
            };
            if !(peak.value > trough.value) {
                return Err(Error::InvalidParameter(
                    "peaks must exceed their adjacent troughs".into(),
                ));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[TurningPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn peaks(&self) -> impl Iterator<Item = &TurningPoint> {
        self.points.iter().filter(|p| p.kind == TurningKind::Peak)
    }

    pub fn troughs(&self) -> impl Iterator<Item = &TurningPoint> {
        self.points.iter().filter(|p| p.kind == TurningKind::Trough)
    }
}

/// Shifts `series` so that its minimum is zero.
pub fn min_adjust(series: &[f64]) -> Vec<f64> {
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    series.iter().map(|v| v - min).collect()
}

/// Extremes of the clamped neighbourhood `[t - l, t + l]`.
fn neighbourhood(series: &[f64], t: usize, l: usize) -> (f64, f64) {
    let lo = t.saturating_sub(l);
    let hi = (t + l).min(series.len() - 1);
    series[lo..=hi]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| {
            (mn.min(*v), mx.max(*v))
        })
}

/// Candidate alternating sequence on a min-adjusted series.
pub fn detect_candidates(
    series: &[f64],
    params: &TurningPointParams,
) -> Result<TurningPointSequence> {
    params.validate()?;
    if series.len() <= 2 * params.l {
        return Err(Error::TooShort {
            needed: 2 * params.l + 1,
            len: series.len(),
        });
    }
    let mut points: Vec<TurningPoint> = Vec::new();
    for (t, &v) in series.iter().enumerate() {
        let (lo, hi) = neighbourhood(series, t, params.l);
        if lo == hi {
            // Flat neighbourhood: nothing non-trivial here.
            continue;
        }
        let kind = if v == hi {
            TurningKind::Peak
        } else if v == lo {
            TurningKind::Trough
        } else {
            continue;
        };
        let candidate = TurningPoint {
            index: t,
            value: v,
            kind,
        };
        match points.last_mut() {
            None => points.push(candidate),
            Some(last) if last.kind == kind => {
                let better = match kind {
                    TurningKind::Peak => v > last.value,
                    TurningKind::Trough => v < last.value,
                };
                if better {
                    *last = candidate;
                }
            }
            Some(last) => {
                let nontrivial = match kind {
                    TurningKind::Peak => v > last.value,
                    TurningKind::Trough => v < last.value,
                };
                if nontrivial {
                    points.push(candidate);
                }
            }
        }
    }
    Ok(TurningPointSequence { points })
}

fn log_gradient_magnitude(a: &TurningPoint, b: &TurningPoint) -> f64 {
    if a.value <= 0.0 || b.value <= 0.0 {
        return f64::INFINITY;
    }
    libm::fabs(libm::log(b.value) - libm::log(a.value)) / (b.index - a.index) as f64
}

/// Applies the peak-ratio rule to a fixpoint, then the log-gradient rule.
pub fn refine(seq: &TurningPointSequence, params: &TurningPointParams) -> TurningPointSequence {
    let mut pts = seq.points.clone();
    peak_ratio_pass(&mut pts, params.delta);
    log_gradient_pass(&mut pts, params.epsilon);
    TurningPointSequence { points: pts }
}

fn peak_ratio_pass(pts: &mut Vec<TurningPoint>, delta: f64) {
    let mut anchor = match pts.iter().position(|p| p.kind == TurningKind::Peak) {
        Some(i) => i,
        None => return,
    };
    loop {
        let Some(next) = (anchor + 1..pts.len()).find(|&i| pts[i].kind == TurningKind::Peak) else {
            return;
        };
        let first = pts[anchor].value;
        let ratio_too_small = first > 0.0 && pts[next].value / first < delta;
        if !ratio_too_small {
            anchor = next;
            continue;
        }
        pts.remove(next);
        // The troughs either side of the removed peak are now adjacent.
        if next < pts.len()
            && next >= 1
            && pts[next - 1].kind == TurningKind::Trough
            && pts[next].kind == TurningKind::Trough
        {
            if pts[next - 1].value > pts[next].value {
                pts.remove(next - 1);
            } else {
                pts.remove(next);
            }
        }
    }
}

fn log_gradient_pass(pts: &mut Vec<TurningPoint>, epsilon: f64) {
    let mut i = 0;
    while i + 1 < pts.len() {
        if log_gradient_magnitude(&pts[i], &pts[i + 1]) < epsilon {
            if i + 2 == pts.len() {
                pts.remove(i + 1);
                return;
            }
            pts.drain(i..=i + 1);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
}

/// Min-adjusts `series`, detects candidates and refines them.
pub fn find_turning_points(
    series: &[f64],
    params: &TurningPointParams,
) -> Result<TurningPointSequence> {
    let adjusted = min_adjust(series);
    let candidates = detect_candidates(&adjusted, params)?;
    Ok(refine(&candidates, params))
}
