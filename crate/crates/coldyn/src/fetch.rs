//! Minimal HTTP client for per-ticker daily history.
//!
//! The endpoint must answer a GET on the interpolated URL template with CSV
//! headed `date,close,market_cap`. Fetched text is written to disk by the
//! caller; the analysis commands only ever read those files.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::panel::DateRange;

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("input error: {0}")]
    Input(String),
    #[error("transport error fetching {url}: HTTP status {status}")]
    Status { url: String, status: u16 },
    #[error("transport error fetching {url}: {message}")]
    Transport { url: String, message: String },
    #[error("schema error for {ticker}: {message}")]
    Schema { ticker: String, message: String },
}

pub const EXPECTED_HEADER: [&str; 3] = ["date", "close", "market_cap"];

/// Substitutes `{ticker}`, `{start}` and `{end}` in `template`.
pub fn render_url(template: &str, ticker: &str, range: DateRange) -> String {
    template
        .replace("{ticker}", ticker)
        .replace("{start}", &range.start.to_string())
        .replace("{end}", &range.end.to_string())
}

/// One day of a single asset's history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub date: NaiveDate,
    pub close: Option<f64>,
    pub market_cap: Option<f64>,
}

/// Downloads one ticker's history and returns it as CSV text restricted to `range`.
pub fn fetch_daily_history(
    url_template: &str,
    ticker: &str,
    range: DateRange,
) -> Result<String, FetchError> {
    if ticker.trim().is_empty() {
        return Err(FetchError::Input("empty ticker".into()));
    }
    if range.end < range.start {
        return Err(FetchError::Input(format!(
            "empty date range {}..={}",
            range.start, range.end
        )));
    }
    let url = render_url(url_template, ticker, range);
    let body = match ureq::get(&url).call() {
        Ok(mut resp) => resp
            .body_mut()
            .read_to_string()
            .map_err(|e| FetchError::Transport {
                url: url.clone(),
                message: e.to_string(),
            })?,
        Err(ureq::Error::StatusCode(status)) => return Err(FetchError::Status { url, status }),
        Err(e) => {
            return Err(FetchError::Transport {
                url,
                message: e.to_string(),
            })
        }
    };
    let rows = parse_history(ticker, &body)?;
    Ok(history_csv(rows.iter().filter(|r| range.contains(r.date))))
}

/// Parses and checks a history response.
pub fn parse_history(ticker: &str, text: &str) -> Result<Vec<HistoryRow>, FetchError> {
    let schema = |message: String| FetchError::Schema {
        ticker: ticker.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| schema(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != EXPECTED_HEADER {
        return Err(schema(format!(
            "expected header `{}`, got `{}`",
            EXPECTED_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| schema(e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|e| schema(format!("line {line}: bad date `{}`: {e}", &rec[0])))?;
        let num = |s: &str| -> Result<Option<f64>, FetchError> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|e| schema(format!("line {line}: bad number `{s}`: {e}")))
            }
        };
        rows.push(HistoryRow {
            date,
            close: num(&rec[1])?,
            market_cap: num(&rec[2])?,
        });
    }
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn history_csv<'a>(rows: impl Iterator<Item = &'a HistoryRow>) -> String {
    let mut out = EXPECTED_HEADER.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.date,
            fmt_opt(r.close),
            fmt_opt(r.market_cap)
        ));
    }
    out
}

/// Builds panel CSV texts (closes, market caps) from per-ticker histories.
///
/// Every calendar day in `range` gets a row; days a ticker lacks are left blank,
/// which the loader later reports as a drop.
pub fn assemble_panel_csv(
    histories: &[(String, Vec<HistoryRow>)],
    range: DateRange,
) -> (String, String) {
    let lookup: Vec<BTreeMap<NaiveDate, HistoryRow>> = histories
        .iter()
        .map(|(_, rows)| rows.iter().map(|r| (r.date, *r)).collect())
        .collect();
    let mut header = String::from("date");
    for (t, _) in histories {
        header.push(',');
        header.push_str(t);
    }
    header.push('\n');
    let mut closes = header.clone();
    let mut caps = header;
    for d in range.days() {
        closes.push_str(&d.to_string());
        caps.push_str(&d.to_string());
        for m in &lookup {
            let row = m.get(&d);
            closes.push(',');
            closes.push_str(&fmt_opt(row.and_then(|r| r.close)));
            caps.push(',');
            caps.push_str(&fmt_opt(row.and_then(|r| r.market_cap)));
        }
        closes.push('\n');
        caps.push('\n');
    }
    (closes, caps)
}
