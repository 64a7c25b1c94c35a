//! Run configuration: TOML with dotted keys, every field defaulted.
//!
//! ```toml
//! data.dir = "data"
//! windows.correlation_days = 90
//! tp.delta = 0.2
//! ```

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use coldyn_core::{Linkage, SavitzkyGolay, TurningPointParams};
use serde::{Deserialize, Serialize};

use crate::panel::DateRange;
use crate::periods::{default_periods, NamedPeriod, PeriodPartition};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("override `{0}` must have the form key=value")]
    Override(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub dir: PathBuf,
    pub closes_file: String,
    pub market_caps_file: String,
    #[serde(deserialize_with = "de_opt_date")]
    pub from: Option<NaiveDate>,
    #[serde(deserialize_with = "de_opt_date")]
    pub to: Option<NaiveDate>,
    pub url_template: String,
    /// Tickers for `fetch`; empty selects the default 52-asset universe.
    pub tickers: Vec<String>,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("data"),
            closes_file: "closes.csv".into(),
            market_caps_file: "market_caps.csv".into(),
            from: None,
            to: None,
            url_template: "http://localhost:8080/history/{ticker}?start={start}&end={end}".into(),
            tickers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub correlation_days: usize,
    pub spectral_days: usize,
    pub inconsistency_days: usize,
    pub volatility_days: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            correlation_days: 90,
            spectral_days: 90,
            inconsistency_days: 90,
            volatility_days: 90,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TpConfig {
    pub l: usize,
    pub delta: f64,
    pub epsilon: f64,
}

impl Default for TpConfig {
    fn default() -> Self {
        let p = TurningPointParams::default();
        Self {
            l: p.l,
            delta: p.delta,
            epsilon: p.epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgConfig {
    pub window: usize,
    pub degree: usize,
}

impl Default for SgConfig {
    fn default() -> Self {
        let sg = SavitzkyGolay::default();
        Self {
            window: sg.window(),
            degree: sg.degree(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsConfig {
    pub exclude_diagonal: bool,
    pub density_points: usize,
}

impl Default for StatsConfig {
    fn default() -> Self {
        Self {
            exclude_diagonal: false,
            density_points: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub linkage: String,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            linkage: Linkage::default().as_str().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Also write per-date inconsistency matrices and the full dispersion matrix.
    pub matrices: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            matrices: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    pub windows: WindowConfig,
    pub tp: TpConfig,
    pub sg: SgConfig,
    pub stats: StatsConfig,
    pub cluster: ClusterConfig,
    pub output: OutputConfig,
    pub periods: Vec<NamedPeriod>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: DataConfig::default(),
            windows: WindowConfig::default(),
            tp: TpConfig::default(),
            sg: SgConfig::default(),
            stats: StatsConfig::default(),
            cluster: ClusterConfig::default(),
            output: OutputConfig::default(),
            periods: default_periods().periods().to_vec(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Sets one dotted key from its textual value, e.g. `tp.delta=0.25`.
    ///
    /// The value is read as a TOML literal when possible and as a bare string otherwise.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        let mut tree =
            toml::Value::try_from(&*self).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let value = parse_literal(raw);
        let parts: Vec<&str> = key.split('.').collect();
        let (last, parents) = parts.split_last().expect("split yields at least one part");
        let mut node = &mut tree;
        for p in parents {
            node = node
                .get_mut(*p)
                .filter(|v| v.is_table())
                .ok_or_else(|| ConfigError::Invalid(format!("unknown config key `{key}`")))?;
        }
        let table = node
            .as_table_mut()
            .ok_or_else(|| ConfigError::Invalid(format!("unknown config key `{key}`")))?;
        // Optional fields are absent from the serialized tree when unset.
        let known = table.contains_key(*last) || matches!(key, "data.from" | "data.to");
        if !known {
            return Err(ConfigError::Invalid(format!("unknown config key `{key}`")));
        }
        let value = match (table.get(*last), value) {
            (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
            (Some(toml::Value::String(_)), v) if !v.is_str() => {
                toml::Value::String(raw.to_string())
            }
            (_, v) => v,
        };
        table.insert(last.to_string(), value);
        *self = tree.try_into().map_err(|e: toml::de::Error| {
            ConfigError::Invalid(format!("`{key}`: {}", e.message()))
        })?;
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<(), ConfigError> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| ConfigError::Override(o.to_string()))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let w = &self.windows;
        for (name, v) in [
            ("windows.correlation_days", w.correlation_days),
            ("windows.spectral_days", w.spectral_days),
            ("windows.inconsistency_days", w.inconsistency_days),
            ("windows.volatility_days", w.volatility_days),
        ] {
            if v < 2 {
                return Err(ConfigError::Invalid(format!(
                    "{name} must be at least 2, got {v}"
                )));
            }
        }
        if w.inconsistency_days != w.volatility_days {
            return Err(ConfigError::Invalid(format!(
                "windows.inconsistency_days ({}) must equal windows.volatility_days ({})",
                w.inconsistency_days, w.volatility_days
            )));
        }
        self.tp_params()?;
        self.smoother()?;
        self.linkage()?;
        self.partition()?;
        self.date_range()?;
        if self.stats.density_points < 2 {
            return Err(ConfigError::Invalid(
                "stats.density_points must be at least 2".into(),
            ));
        }
        for f in [&self.data.closes_file, &self.data.market_caps_file] {
            if f.is_empty() {
                return Err(ConfigError::Invalid(
                    "data file names must not be empty".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn tp_params(&self) -> Result<TurningPointParams, ConfigError> {
        TurningPointParams::new(self.tp.l, self.tp.delta, self.tp.epsilon)
            .map_err(|e| ConfigError::Invalid(format!("tp: {e}")))
    }

    pub fn smoother(&self) -> Result<SavitzkyGolay, ConfigError> {
        SavitzkyGolay::new(self.sg.window, self.sg.degree)
            .map_err(|e| ConfigError::Invalid(format!("sg: {e}")))
    }

    pub fn linkage(&self) -> Result<Linkage, ConfigError> {
        self.cluster
            .linkage
            .parse()
            .map_err(|e| ConfigError::Invalid(format!("cluster.linkage: {e}")))
    }

    pub fn partition(&self) -> Result<PeriodPartition, ConfigError> {
        PeriodPartition::new(self.periods.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn date_range(&self) -> Result<Option<DateRange>, ConfigError> {
        match (self.data.from, self.data.to) {
            (Some(a), Some(b)) if b < a => Err(ConfigError::Invalid(format!(
                "data.to ({b}) precedes data.from ({a})"
            ))),
            (Some(a), Some(b)) => Ok(Some(DateRange::new(a, b))),
            (None, None) => Ok(None),
            _ => Err(ConfigError::Invalid(
                "data.from and data.to must be given together".into(),
            )),
        }
    }

    pub fn closes_path(&self) -> PathBuf {
        self.data.dir.join(&self.data.closes_file)
    }

    pub fn market_caps_path(&self) -> PathBuf {
        self.data.dir.join(&self.data.market_caps_file)
    }
}

/// A date written either as a TOML date literal or as an ISO-8601 string.
#[derive(Deserialize)]
#[serde(untagged)]
enum DateRepr {
    Toml(toml::value::Datetime),
    Text(String),
}

impl DateRepr {
    fn into_date<E: serde::de::Error>(self) -> Result<NaiveDate, E> {
        match self {
            DateRepr::Text(s) => s
                .parse()
                .map_err(|e| E::custom(format!("bad date `{s}`: {e}"))),
            DateRepr::Toml(dt) => match (dt.date, dt.time) {
                (Some(d), None) => {
                    NaiveDate::from_ymd_opt(d.year.into(), d.month.into(), d.day.into())
                        .ok_or_else(|| E::custom(format!("bad date `{dt}`")))
                }
                _ => Err(E::custom(format!("expected a plain date, got `{dt}`"))),
            },
        }
    }
}

pub(crate) fn de_date<'de, D: serde::Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
    DateRepr::deserialize(d)?.into_date()
}

fn de_opt_date<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<NaiveDate>, D::Error> {
    Option::<DateRepr>::deserialize(d)?
        .map(DateRepr::into_date)
        .transpose()
}

fn parse_literal(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.windows.correlation_days, 90);
        assert_eq!(c.tp.l, 17);
        assert_eq!(c.sg.window, 31);
        assert_eq!(c.cluster.linkage, "average");
        assert_eq!(c.periods.len(), 5);
    }

    #[test]
    fn echo_round_trips() {
        let mut c = RunConfig::default();
        c.data.from = Some("2019-01-01".parse().unwrap());
        c.data.to = Some("2021-06-30".parse().unwrap());
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn dotted_keys_parse() {
        let c = RunConfig::from_toml(
            "windows.correlation_days = 60\ntp.delta = 0.3\ndata.dir = \"x\"\n",
        )
        .unwrap();
        assert_eq!(c.windows.correlation_days, 60);
        assert_eq!(c.tp.delta, 0.3);
        assert_eq!(c.data.dir, PathBuf::from("x"));
        assert_eq!(c.windows.spectral_days, 90);
    }

    #[test]
    fn dates_as_literals_or_strings() {
        let text = "data.from = 2019-01-01\ndata.to = \"2021-06-30\"\n\
                    [[periods]]\nlabel = \"x\"\nstart = 2019-02-01\nend = \"2019-03-01\"\n";
        let c = RunConfig::from_toml(text).unwrap();
        assert_eq!(c.data.from, Some("2019-01-01".parse().unwrap()));
        assert_eq!(c.data.to, Some("2021-06-30".parse().unwrap()));
        assert_eq!(
            c.periods[0].start,
            "2019-02-01".parse::<NaiveDate>().unwrap()
        );
        assert!(RunConfig::from_toml("data.from = 2019-01-01T10:00:00\n").is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(RunConfig::from_toml("windows.corr = 60\n").is_err());
        assert!(RunConfig::default().set("tp.lambda", "3").is_err());
        assert!(RunConfig::default().set("nope", "3").is_err());
    }

    #[test]
    fn set_overrides() {
        let mut c = RunConfig::default();
        c.apply_overrides(&[
            "tp.delta=1",
            "cluster.linkage=single",
            "data.from=2020-01-01",
            "data.to=2020-02-01",
        ])
        .unwrap();
        assert_eq!(c.tp.delta, 1.0);
        assert_eq!(c.cluster.linkage, "single");
        assert_eq!(
            c.date_range().unwrap().unwrap().start,
            "2020-01-01".parse::<NaiveDate>().unwrap()
        );
        assert!(c.set("windows.correlation_days", "abc").is_err());
        assert!(c.apply_overrides(&["tp.delta"]).is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = RunConfig::default();
        c.sg.window = 30;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.windows.spectral_days = 1;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.tp.epsilon = 0.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.cluster.linkage = "ward".into();
        assert!(c.validate().is_err());
    }
}
