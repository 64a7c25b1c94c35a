use alloc::string::String;

/// Failures raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("asset {asset} has zero variance over days [{start}, {end}]")]
    DegenerateAsset {
        asset: usize,
        start: usize,
        end: usize,
    },
    #[error("window [{start}, {end}] is invalid for a series covering days 1..={days}")]
    InvalidWindow {
        start: usize,
        end: usize,
        days: usize,
    },
    #[error("period `{label}` spanning days [{start}, {end}] lies outside days 1..={days}")]
    PeriodOutOfRange {
        label: String,
        start: usize,
        end: usize,
        days: usize,
    },
    #[error("series too short: need at least {needed} points, got {len}")]
    TooShort { needed: usize, len: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-positive close for asset {asset} at day {day}")]
    NonPositivePrice { asset: usize, day: usize },
    #[error("constant series, correlation undefined")]
    DegenerateSeries,
    #[error("all volatilities are zero on day {day}")]
    DegenerateDate { day: usize },
    #[error("fewer than two usable dates")]
    TooFewDates,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures of the numerics themselves rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_)
                | Error::DegenerateAsset { .. }
                | Error::DegenerateSeries
                | Error::DegenerateDate { .. }
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
