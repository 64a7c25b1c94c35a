//! Daily close and market-cap panels loaded from CSV.
//!
//! Both files share one layout: a header row, an ISO-8601 date in the first
//! column and one column per ticker. Assets with any missing or invalid value
//! inside the requested date range are dropped and reported, and the
//! remaining dates must form an unbroken run of calendar days.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use coldyn_core::ReturnsPanel;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::tickers;

#[derive(Debug, thiserror::Error)]
pub enum PanelError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}: row {row}, column `{column}`: {message}")]
    Parse {
        source_name: String,
        row: u64,
        column: String,
        message: String,
    },
    #[error("no assets survive alignment over {start}..={end}")]
    Empty { start: NaiveDate, end: NaiveDate },
    #[error("dates are not contiguous; missing: {}", format_dates(.missing))]
    Gap { missing: Vec<NaiveDate> },
    #[error("invalid panel: {0}")]
    Invalid(String),
}

fn format_dates(dates: &[NaiveDate]) -> String {
    const SHOWN: usize = 20;
    let mut s: Vec<String> = dates.iter().take(SHOWN).map(|d| d.to_string()).collect();
    if dates.len() > SHOWN {
        s.push(format!("... ({} total)", dates.len()));
    }
    s.join(", ")
}

/// Inclusive calendar-date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        self.start.iter_days().take_while({
            let end = self.end;
            move |d| *d <= end
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetMeta {
    pub ticker: String,
    pub name: String,
}

/// Aligned daily closes and market caps: N assets over days `0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    assets: Vec<AssetMeta>,
    closes: DMatrix<f64>,
    market_caps: DMatrix<f64>,
}

impl PricePanel {
    pub fn new(
        dates: Vec<NaiveDate>,
        assets: Vec<AssetMeta>,
        closes: DMatrix<f64>,
        market_caps: DMatrix<f64>,
    ) -> Result<Self, PanelError> {
        let shape = (assets.len(), dates.len());
        if closes.shape() != shape || market_caps.shape() != shape {
            return Err(PanelError::Invalid(format!(
                "expected {}x{} matrices, got closes {:?} and caps {:?}",
                shape.0,
                shape.1,
                closes.shape(),
                market_caps.shape()
            )));
        }
        for w in dates.windows(2) {
            if w[0].succ_opt() != Some(w[1]) {
                return Err(PanelError::Invalid(format!(
                    "dates {} and {} are not consecutive days",
                    w[0], w[1]
                )));
            }
        }
        let mut seen = HashMap::new();
        for (i, a) in assets.iter().enumerate() {
            if a.ticker.is_empty() {
                return Err(PanelError::Invalid(format!(
                    "asset {i} has an empty ticker"
                )));
            }
            if seen.insert(a.ticker.as_str(), i).is_some() {
                return Err(PanelError::Invalid(format!(
                    "duplicate ticker {}",
                    a.ticker
                )));
            }
        }
        for t in 0..dates.len() {
            for (i, a) in assets.iter().enumerate() {
                let c = closes[(i, t)];
                if !(c > 0.0 && c.is_finite()) {
                    return Err(PanelError::Invalid(format!(
                        "close of {} on {} is not positive",
                        a.ticker, dates[t]
                    )));
                }
                let m = market_caps[(i, t)];
                if !(m >= 0.0 && m.is_finite()) {
                    return Err(PanelError::Invalid(format!(
                        "market cap of {} on {} is negative",
                        a.ticker, dates[t]
                    )));
                }
            }
        }
        Ok(Self {
            dates,
            assets,
            closes,
            market_caps,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[AssetMeta] {
        &self.assets
    }

    pub fn closes(&self) -> &DMatrix<f64> {
        &self.closes
    }

    pub fn market_caps(&self) -> &DMatrix<f64> {
        &self.market_caps
    }

    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    /// Last day index `T`.
    pub fn last_day(&self) -> usize {
        self.dates.len().saturating_sub(1)
    }

    pub fn range(&self) -> DateRange {
        DateRange::new(self.dates[0], self.dates[self.dates.len() - 1])
    }

    /// Day index of `date`, if inside the panel.
    pub fn day_of(&self, date: NaiveDate) -> Option<usize> {
        let offset = (date - self.dates[0]).num_days();
        (offset >= 0 && (offset as usize) < self.dates.len()).then_some(offset as usize)
    }

    pub fn date_of(&self, day: usize) -> NaiveDate {
        self.dates[day]
    }

    pub fn log_returns(&self) -> ReturnsPanel {
        ReturnsPanel::from_closes(&self.closes).expect("panel invariants guarantee positive closes")
    }

    pub fn write_csv(&self, closes_path: &Path, caps_path: &Path) -> Result<(), PanelError> {
        for (path, m) in [(closes_path, &self.closes), (caps_path, &self.market_caps)] {
            let text = self.matrix_csv(m);
            let io = |source| PanelError::Io {
                path: path.to_path_buf(),
                source,
            };
            fs::File::create(path)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(io)?;
        }
        Ok(())
    }

    /// CSV text of closes and caps. Values use the shortest exact decimal form, so reloading is lossless.
    pub fn to_csv_strings(&self) -> (String, String) {
        (
            self.matrix_csv(&self.closes),
            self.matrix_csv(&self.market_caps),
        )
    }

    fn matrix_csv(&self, m: &DMatrix<f64>) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = std::iter::once("date")
            .chain(self.assets.iter().map(|a| a.ticker.as_str()))
            .collect();
        w.write_record(&header).expect("in-memory write");
        for (t, d) in self.dates.iter().enumerate() {
            let mut row = vec![d.to_string()];
            row.extend((0..self.n_assets()).map(|i| m[(i, t)].to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

/// One asset removed during alignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropRecord {
    pub ticker: String,
    pub reason: String,
    pub first_missing_date: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedPanel {
    pub panel: PricePanel,
    pub dropped: Vec<DropRecord>,
}

struct Table {
    source_name: String,
    tickers: Vec<String>,
    dates: Vec<NaiveDate>,
    /// `cells[row][ticker]`
    cells: Vec<Vec<Option<f64>>>,
}

fn parse_cell(raw: &str) -> Result<Option<f64>, String> {
    let s = raw.trim();
    if s.is_empty() || ["na", "nan", "null", "none"].contains(&s.to_ascii_lowercase().as_str()) {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|e| format!("`{s}` is not a number ({e})"))
}

fn parse_table(text: &str, source_name: &str) -> Result<Table, PanelError> {
    let perr = |row: u64, column: &str, message: String| PanelError::Parse {
        source_name: source_name.to_string(),
        row,
        column: column.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| perr(1, "header", e.to_string()))?
        .clone();
    if header.len() < 2 {
        return Err(perr(
            1,
            "header",
            "expected a date column followed by at least one ticker".into(),
        ));
    }
    let tickers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut seen = HashMap::new();
    for t in &tickers {
        if t.is_empty() {
            return Err(perr(1, "header", "empty ticker name".into()));
        }
        if seen.insert(t.clone(), ()).is_some() {
            return Err(perr(1, t, "duplicate ticker".into()));
        }
    }
    let mut dates = Vec::new();
    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map(|p| p.line()).unwrap_or(0);
            perr(row, "-", e.to_string())
        })?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| {
            perr(
                row,
                &header[0],
                format!("`{}` is not an ISO-8601 date ({e})", &record[0]),
            )
        })?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(perr(
                    row,
                    &header[0],
                    format!("date {date} does not increase on {prev}"),
                ));
            }
        }
        let values = record
            .iter()
            .skip(1)
            .zip(&tickers)
            .map(|(cell, t)| parse_cell(cell).map_err(|m| perr(row, t, m)))
            .collect::<Result<Vec<_>, _>>()?;
        dates.push(date);
        cells.push(values);
    }
    Ok(Table {
        source_name: source_name.to_string(),
        tickers,
        dates,
        cells,
    })
}

impl Table {
    fn restrict(&self, range: DateRange) -> Result<(Vec<usize>, Vec<NaiveDate>), PanelError> {
        let rows: Vec<usize> = (0..self.dates.len())
            .filter(|&r| range.contains(self.dates[r]))
            .collect();
        let present: Vec<NaiveDate> = rows.iter().map(|&r| self.dates[r]).collect();
        let missing: Vec<NaiveDate> = range
            .days()
            .filter(|d| present.binary_search(d).is_err())
            .collect();
        if !missing.is_empty() {
            return Err(PanelError::Gap { missing });
        }
        Ok((rows, present))
    }
}

/// Reads and aligns two CSV texts. With no `range`, the close file's full date span is used.
pub fn parse_panel(
    closes_text: &str,
    caps_text: &str,
    range: Option<DateRange>,
) -> Result<LoadedPanel, PanelError> {
    parse_named(closes_text, "closes", caps_text, "market caps", range)
}

fn parse_named(
    closes_text: &str,
    closes_name: &str,
    caps_text: &str,
    caps_name: &str,
    range: Option<DateRange>,
) -> Result<LoadedPanel, PanelError> {
    let closes = parse_table(closes_text, closes_name)?;
    let caps = parse_table(caps_text, caps_name)?;
    let range = match range {
        Some(r) => r,
        None => match (closes.dates.first(), closes.dates.last()) {
            (Some(a), Some(b)) => DateRange::new(*a, *b),
            _ => {
                return Err(PanelError::Invalid(format!(
                    "{} has no data rows",
                    closes.source_name
                )))
            }
        },
    };
    if range.end < range.start {
        return Err(PanelError::Invalid(format!(
            "empty date range {}..={}",
            range.start, range.end
        )));
    }
    let (close_rows, dates) = closes.restrict(range)?;
    let (cap_rows, _) = caps.restrict(range)?;

    let cap_index: HashMap<&str, usize> = caps
        .tickers
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut dropped = Vec::new();
    let mut kept: Vec<(String, usize, usize)> = Vec::new();
    'asset: for (ci, ticker) in closes.tickers.iter().enumerate() {
        let Some(&ki) = cap_index.get(ticker.as_str()) else {
            dropped.push(DropRecord {
                ticker: ticker.clone(),
                reason: format!("missing from {}", caps.source_name),
                first_missing_date: None,
            });
            continue;
        };
        for (k, date) in dates.iter().enumerate() {
            let close = closes.cells[close_rows[k]][ci];
            let cap = caps.cells[cap_rows[k]][ki];
            let reason = match (close, cap) {
                (None, _) => Some("missing close"),
                (Some(c), _) if !(c > 0.0 && c.is_finite()) => Some("non-positive close"),
                (_, None) => Some("missing market cap"),
                (_, Some(m)) if !(m >= 0.0 && m.is_finite()) => Some("negative market cap"),
                _ => None,
            };
            if let Some(reason) = reason {
                dropped.push(DropRecord {
                    ticker: ticker.clone(),
                    reason: reason.to_string(),
                    first_missing_date: Some(*date),
                });
                continue 'asset;
            }
        }
        kept.push((ticker.clone(), ci, ki));
    }
    for t in &caps.tickers {
        if !closes.tickers.contains(t) {
            dropped.push(DropRecord {
                ticker: t.clone(),
                reason: format!("missing from {}", closes.source_name),
                first_missing_date: None,
            });
        }
    }
    if kept.is_empty() {
        return Err(PanelError::Empty {
            start: range.start,
            end: range.end,
        });
    }
    let n = kept.len();
    let closes_m = DMatrix::from_fn(n, dates.len(), |i, t| {
        closes.cells[close_rows[t]][kept[i].1].unwrap()
    });
    let caps_m = DMatrix::from_fn(n, dates.len(), |i, t| {
        caps.cells[cap_rows[t]][kept[i].2].unwrap()
    });
    let assets = kept
        .iter()
        .map(|(t, _, _)| AssetMeta {
            ticker: t.clone(),
            name: tickers::name_for(t).to_string(),
        })
        .collect();
    let panel = PricePanel::new(dates, assets, closes_m, caps_m)?;
    Ok(LoadedPanel { panel, dropped })
}

pub fn load_panel(
    closes_path: &Path,
    caps_path: &Path,
    range: Option<DateRange>,
) -> Result<LoadedPanel, PanelError> {
    let read = |p: &Path| {
        fs::read_to_string(p).map_err(|source| PanelError::Io {
            path: p.to_path_buf(),
            source,
        })
    };
    let closes = read(closes_path)?;
    let caps = read(caps_path)?;
    parse_named(
        &closes,
        &closes_path.display().to_string(),
        &caps,
        &caps_path.display().to_string(),
        range,
    )
}
