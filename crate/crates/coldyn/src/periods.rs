//! Named calendar periods and their mapping onto return days.

use chrono::NaiveDate;
use coldyn_core::{Period, Window};
use serde::{Deserialize, Serialize};

use crate::panel::PricePanel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedPeriod {
    pub label: String,
    #[serde(deserialize_with = "crate::config::de_date")]
    pub start: NaiveDate,
    #[serde(deserialize_with = "crate::config::de_date")]
    pub end: NaiveDate,
}

impl NamedPeriod {
    pub fn new(label: &str, start: NaiveDate, end: NaiveDate) -> Self {
        Self {
            label: label.to_string(),
            start,
            end,
        }
    }

    /// Lowercase label with runs of non-alphanumerics collapsed to `_`.
    pub fn slug(&self) -> String {
        let mut out = String::new();
        for c in self.label.chars() {
            if c.is_ascii_alphanumeric() {
                out.push(c.to_ascii_lowercase());
            } else if !out.is_empty() && !out.ends_with('_') {
                out.push('_');
            }
        }
        while out.ends_with('_') {
            out.pop();
        }
        out
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PeriodError {
    #[error("period `{0}` ends before it starts")]
    Reversed(String),
    #[error("periods `{0}` and `{1}` overlap or are out of order")]
    Overlap(String, String),
}

/// Ordered, non-overlapping list of named periods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodPartition {
    periods: Vec<NamedPeriod>,
}

impl PeriodPartition {
    pub fn new(periods: Vec<NamedPeriod>) -> Result<Self, PeriodError> {
        for p in &periods {
            if p.end < p.start {
                return Err(PeriodError::Reversed(p.label.clone()));
            }
        }
        for w in periods.windows(2) {
            if w[1].start <= w[0].end {
                return Err(PeriodError::Overlap(w[0].label.clone(), w[1].label.clone()));
            }
        }
        Ok(Self { periods })
    }

    pub fn periods(&self) -> &[NamedPeriod] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Maps each period onto a window of return days.
    ///
    /// Returns day `t` is the log return ending on `dates[t]`, so a period starting on
    /// the panel's first date begins at day 1. Periods straddling a panel edge are
    /// clipped to it; periods with fewer than two return days inside are skipped.
    pub fn resolve(&self, panel: &PricePanel) -> Resolution {
        let range = panel.range();
        let mut out = Resolution::default();
        for p in &self.periods {
            let start = p.start.max(range.start);
            let end = p.end.min(range.end);
            let window = match (panel.day_of(start), panel.day_of(end)) {
                (Some(a), Some(b)) if end >= start && b > a.max(1) => Window::new(a.max(1), b),
                _ => {
                    out.skipped.push(p.label.clone());
                    continue;
                }
            };
            if start != p.start || end != p.end {
                out.clipped.push(p.label.clone());
            }
            out.periods.push(Period {
                label: p.label.clone(),
                window,
            });
        }
        out
    }
}

/// Periods mapped onto a particular panel.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Resolution {
    pub periods: Vec<Period>,
    /// Labels of periods cut short by the panel's date range.
    pub clipped: Vec<String>,
    /// Labels of periods with too little overlap to analyse.
    pub skipped: Vec<String>,
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

/// The five market phases between 2019-01-01 and 2021-06-30.
pub fn default_periods() -> PeriodPartition {
    PeriodPartition::new(vec![
        NamedPeriod::new("Pre-COVID", date(2019, 1, 1), date(2020, 2, 28)),
        NamedPeriod::new("Peak COVID", date(2020, 3, 1), date(2020, 5, 30)),
        NamedPeriod::new("Post-COVID", date(2020, 5, 31), date(2020, 8, 31)),
        NamedPeriod::new("Bull", date(2020, 9, 1), date(2021, 4, 14)),
        NamedPeriod::new("Bear", date(2021, 4, 15), date(2021, 6, 30)),
    ])
    .expect("default periods are ordered")
}
