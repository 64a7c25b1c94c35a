//! Numerical core for collective-dynamics analysis of daily asset panels.
//!
//! Everything here is allocation-only (`no_std` + `alloc`): panels arrive as
//! dense matrices on a day-index axis and all outputs are indexed by day.
//! Calendar dates, file formats and the command line live in the `coldyn`
//! crate.
//!
//! Day convention: prices cover days `0..=T`, log returns cover `1..=T`, and a
//! rolling statistic with window `S` is reported for end days `S..=T`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cluster;
pub mod correlation;
pub mod dispersion;
pub mod error;
pub mod inconsistency;
pub mod kde;
pub mod returns;
pub mod series;
pub mod smoothing;
pub mod spectral;
pub mod stats;
pub mod turning_points;
pub mod volatility;

pub use cluster::{hierarchical_cluster, Dendrogram, Linkage, Merge};
pub use correlation::{
    correlation_matrix, l1_norm, period_entry_stats, rolling_norm_series, CorrelationMatrix,
    EntryStatsOptions, Period, PeriodEntryStats,
};
pub use dispersion::{
    dispersion_matrix, intra_volatility_variance, variance_series, volatility_distribution,
    wasserstein, DispersionMatrix, VolatilityDistribution,
};
pub use error::{Error, Result};
pub use inconsistency::{
    distance_matrices, inconsistency_norms, to_affinity, DistanceMatrices, InconsistencySeries,
};
pub use returns::{ReturnsPanel, Window};
pub use series::DaySeries;
pub use smoothing::SavitzkyGolay;
pub use spectral::{
    eigen_spectrum, lambda1_series, rolling_market_size, series_correlation,
    verify_operator_norm_identity, OperatorNormCheck, SpectralSeries,
};
pub use turning_points::{
    detect_candidates, find_turning_points, min_adjust, refine, TurningKind, TurningPoint,
    TurningPointParams, TurningPointSequence,
};
pub use volatility::{rolling_volatility, VolatilityPanel};
