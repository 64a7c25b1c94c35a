//! File formats, configuration and command pipelines around `coldyn-core`.

pub mod config;
pub mod error;
pub mod export;
pub mod fetch;
pub mod panel;
pub mod periods;
pub mod pipeline;
pub mod tickers;

pub use config::RunConfig;
pub use error::AppError;
pub use panel::{
    load_panel, parse_panel, AssetMeta, DateRange, DropRecord, LoadedPanel, PricePanel,
};
pub use periods::{default_periods, NamedPeriod, PeriodPartition};
pub use pipeline::{
    cmd_all, cmd_correlation, cmd_dispersion, cmd_inconsistency, cmd_spectral, Analysis,
};
