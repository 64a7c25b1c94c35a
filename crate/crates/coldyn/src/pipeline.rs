//! The four analysis commands over one loaded panel.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use coldyn_core::{
    self as core, correlation_matrix, dispersion_matrix, find_turning_points, hierarchical_cluster,
    inconsistency_norms, period_entry_stats, rolling_market_size, rolling_norm_series,
    rolling_volatility, series_correlation, variance_series, verify_operator_norm_identity,
    DaySeries, Dendrogram, EntryStatsOptions, InconsistencySeries, PeriodEntryStats, ReturnsPanel,
    TurningPointSequence, VolatilityPanel, Window,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::AppError;
use crate::export::{ensure_dir, fmt_f64, round12, write_json, write_text, Table};
use crate::panel::{load_panel, DropRecord, LoadedPanel, PricePanel};

pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";
pub const DROP_REPORT_FILE: &str = "drop_report.json";

/// A validated configuration together with the panel it describes.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub config: RunConfig,
    pub panel: PricePanel,
    pub dropped: Vec<DropRecord>,
    pub returns: ReturnsPanel,
}

impl Analysis {
    /// Validates `config` and loads the panel files it names.
    pub fn load(config: RunConfig) -> Result<Self, AppError> {
        config.validate()?;
        let loaded = load_panel(
            &config.closes_path(),
            &config.market_caps_path(),
            config.date_range()?,
        )?;
        Self::from_loaded(config, loaded)
    }

    pub fn from_loaded(config: RunConfig, loaded: LoadedPanel) -> Result<Self, AppError> {
        config.validate()?;
        let returns = loaded.panel.log_returns();
        Ok(Self {
            config,
            panel: loaded.panel,
            dropped: loaded.dropped,
            returns,
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.config.output.dir
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir().join(name)
    }

    /// Creates the output directory and writes the resolved config and drop report.
    pub fn write_preamble(&self) -> Result<(), AppError> {
        ensure_dir(self.out_dir())?;
        write_text(&self.out(RESOLVED_CONFIG_FILE), &self.config.to_toml())?;
        write_json(&self.out(DROP_REPORT_FILE), &self.dropped)?;
        Ok(())
    }

    /// Calendar date of return day (or price day) `day`.
    pub fn date(&self, day: usize) -> NaiveDate {
        self.panel.date_of(day)
    }

    fn iso(&self, day: usize) -> String {
        self.date(day).to_string()
    }

    fn ticker(&self, asset: usize) -> &str {
        self.panel
            .assets()
            .get(asset)
            .map(|a| a.ticker.as_str())
            .unwrap_or("?")
    }

    /// Wraps a core error, replacing day and asset indices with dates and tickers.
    pub fn fail(&self, stage: &'static str, err: core::Error) -> AppError {
        let span = |a: usize, b: usize| {
            let last = self.panel.last_day();
            format!("{}..={}", self.iso(a.min(last)), self.iso(b.min(last)))
        };
        let message = match &err {
            core::Error::DegenerateAsset { asset, start, end } => {
                format!(
                    "asset {} has zero return variance over {}",
                    self.ticker(*asset),
                    span(*start, *end)
                )
            }
            core::Error::DegenerateDate { day } => {
                format!(
                    "every asset has zero volatility on {}",
                    self.iso((*day).min(self.panel.last_day()))
                )
            }
            core::Error::NonPositivePrice { asset, day } => {
                format!(
                    "non-positive close for {} on {}",
                    self.ticker(*asset),
                    self.iso((*day).min(self.panel.last_day()))
                )
            }
            other => other.to_string(),
        };
        AppError::Analysis {
            stage,
            message,
            numerical: err.is_numerical(),
        }
    }
}

fn day_series_table<S: AsRef<str>>(
    a: &Analysis,
    header: &[S],
    days: &[usize],
    columns: &[&[f64]],
) -> Table {
    let mut t = Table::new(header);
    for (k, &d) in days.iter().enumerate() {
        let mut row = vec![a.iso(d)];
        row.extend(columns.iter().map(|c| fmt_f64(c[k])));
        t.push(row);
    }
    t
}

#[derive(Debug, Clone)]
pub struct CorrelationReport {
    pub norm: DaySeries,
    pub smoothed: Vec<f64>,
    pub turning_points: TurningPointSequence,
    pub period_stats: Vec<PeriodEntryStats>,
    pub clipped_periods: Vec<String>,
    pub skipped_periods: Vec<String>,
}

#[derive(Serialize)]
struct PeriodJson {
    period: String,
    start: NaiveDate,
    end: NaiveDate,
    days: usize,
    mean: f64,
    std: f64,
    l1_norm: f64,
    bandwidth: f64,
    clipped: bool,
}

pub fn run_correlation(a: &Analysis) -> Result<CorrelationReport, AppError> {
    const STAGE: &str = "correlation";
    let cfg = &a.config;
    let norm = rolling_norm_series(&a.returns, cfg.windows.correlation_days)
        .map_err(|e| a.fail(STAGE, e))?;
    let smoothed = cfg
        .smoother()?
        .apply(&norm.values)
        .map_err(|e| a.fail("smoothing", e))?;
    let turning_points = find_turning_points(&smoothed, &cfg.tp_params()?)
        .map_err(|e| a.fail("turning points", e))?;
    let resolution = cfg.partition()?.resolve(&a.panel);
    let options = EntryStatsOptions {
        exclude_diagonal: cfg.stats.exclude_diagonal,
        density_points: cfg.stats.density_points,
    };
    let period_stats = period_entry_stats(&a.returns, &resolution.periods, options)
        .map_err(|e| a.fail(STAGE, e))?;
    Ok(CorrelationReport {
        norm,
        smoothed,
        turning_points,
        period_stats,
        clipped_periods: resolution.clipped,
        skipped_periods: resolution.skipped,
    })
}

pub fn write_correlation(a: &Analysis, r: &CorrelationReport) -> Result<(), AppError> {
    day_series_table(
        a,
        &["date", "raw", "smoothed"],
        &r.norm.days,
        &[&r.norm.values, &r.smoothed],
    )
    .write(&a.out("norm_series.csv"))?;
    let dates: Vec<String> = r.norm.days.iter().map(|&d| a.iso(d)).collect();
    write_json(
        &a.out("norm_series.json"),
        &json!({
            "window_days": a.config.windows.correlation_days,
            "dates": dates,
            "raw": r.norm.values.iter().map(|v| round12(*v)).collect::<Vec<_>>(),
            "smoothed": r.smoothed.iter().map(|v| round12(*v)).collect::<Vec<_>>(),
        }),
    )?;

    let mut tp = Table::new(&["index", "date", "value", "kind"]);
    for p in r.turning_points.points() {
        tp.push(vec![
            p.index.to_string(),
            a.iso(r.norm.days[p.index]),
            fmt_f64(r.smoothed[p.index]),
            p.kind.as_str().to_string(),
        ]);
    }
    tp.write(&a.out("turning_points.csv"))?;

    let mut ps = Table::new(&["period", "mean", "std"]);
    let mut json_rows = Vec::new();
    for s in &r.period_stats {
        ps.push(vec![s.label.clone(), fmt_f64(s.mean), fmt_f64(s.std)]);
        json_rows.push(PeriodJson {
            period: s.label.clone(),
            start: a.date(s.window.start),
            end: a.date(s.window.end),
            days: s.window.len(),
            mean: round12(s.mean),
            std: round12(s.std),
            l1_norm: round12(s.l1_norm),
            bandwidth: round12(s.density.bandwidth),
            clipped: r.clipped_periods.contains(&s.label),
        });
        let mut dens = Table::new(&["x", "density"]);
        for (x, y) in &s.density.points {
            dens.push(vec![fmt_f64(*x), fmt_f64(*y)]);
        }
        dens.write(&a.out(&format!("density_{}.csv", slug(&s.label))))?;
    }
    ps.write(&a.out("period_stats.csv"))?;
    write_json(
        &a.out("period_stats.json"),
        &json!({
            "exclude_diagonal": a.config.stats.exclude_diagonal,
            "periods": json_rows,
            "skipped": r.skipped_periods,
        }),
    )?;
    Ok(())
}

fn slug(label: &str) -> String {
    crate::periods::NamedPeriod::new(label, NaiveDate::MIN, NaiveDate::MIN).slug()
}

pub fn cmd_correlation(a: &Analysis) -> Result<CorrelationReport, AppError> {
    a.write_preamble()?;
    let r = run_correlation(a)?;
    write_correlation(a, &r)?;
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// `λ₁(t)/N` on end days `S..=T`.
    pub lambda1: DaySeries,
    /// Rolling mean total market size on the same days.
    pub market_size: DaySeries,
    /// `None` when either series is constant.
    pub rho: Option<f64>,
    pub max_opnorm_gap: f64,
    pub max_trace_gap: f64,
}

pub fn run_spectral(a: &Analysis) -> Result<SpectralReport, AppError> {
    const STAGE: &str = "spectral";
    let s = a.config.windows.spectral_days;
    let t = a.returns.days();
    if s < 2 || t < s {
        return Err(a.fail(
            STAGE,
            core::Error::TooShort {
                needed: s + 1,
                len: t + 1,
            },
        ));
    }
    let mut lambda1 = DaySeries::default();
    let (mut max_opnorm_gap, mut max_trace_gap) = (0.0_f64, 0.0_f64);
    for end in s..=t {
        let m = correlation_matrix(&a.returns, Window::trailing(end, s))
            .map_err(|e| a.fail(STAGE, e))?;
        let check = verify_operator_norm_identity(&m).map_err(|e| a.fail(STAGE, e))?;
        lambda1.days.push(end);
        lambda1.values.push(check.lambda1_normalized);
        max_opnorm_gap = max_opnorm_gap.max(check.difference);
        max_trace_gap = max_trace_gap.max(check.trace_gap);
    }
    let market_size =
        rolling_market_size(a.panel.market_caps(), s).map_err(|e| a.fail(STAGE, e))?;
    debug_assert_eq!(market_size.days, lambda1.days);
    let rho = match series_correlation(&market_size.values, &lambda1.values) {
        Ok(r) => Some(r),
        Err(core::Error::DegenerateSeries) => None,
        Err(e) => return Err(a.fail(STAGE, e)),
    };
    Ok(SpectralReport {
        lambda1,
        market_size,
        rho,
        max_opnorm_gap,
        max_trace_gap,
    })
}

pub fn write_spectral(a: &Analysis, r: &SpectralReport) -> Result<(), AppError> {
    day_series_table(
        a,
        &["date", "lambda1"],
        &r.lambda1.days,
        &[&r.lambda1.values],
    )
    .write(&a.out("lambda1_series.csv"))?;
    day_series_table(
        a,
        &["date", "market_size"],
        &r.market_size.days,
        &[&r.market_size.values],
    )
    .write(&a.out("market_size.csv"))?;
    day_series_table(
        a,
        &["date", "lambda1", "market_size"],
        &r.lambda1.days,
        &[&r.lambda1.values, &r.market_size.values],
    )
    .write(&a.out("spectral_series.csv"))?;
    let rho = match r.rho {
        Some(v) => json!(round12(v)),
        None => json!("degenerate"),
    };
    write_json(
        &a.out("correlation_summary.json"),
        &json!({
            "window_days": a.config.windows.spectral_days,
            "dates": r.lambda1.len(),
            "rho_market_size_lambda1": rho,
            "max_operator_norm_gap": round12(r.max_opnorm_gap),
            "max_trace_gap": round12(r.max_trace_gap),
        }),
    )?;
    Ok(())
}

pub fn cmd_spectral(a: &Analysis) -> Result<SpectralReport, AppError> {
    a.write_preamble()?;
    let r = run_spectral(a)?;
    write_spectral(a, &r)?;
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct InconsistencyReport {
    pub series: InconsistencySeries,
    pub volatility: VolatilityPanel,
}

impl InconsistencyReport {
    /// Share of dates where `ν_MΣ < ν_MR`.
    pub fn fraction_sigma_below_returns(&self) -> f64 {
        let s = &self.series;
        if s.days.is_empty() {
            return 0.0;
        }
        s.nu_msigma
            .iter()
            .zip(&s.nu_mr)
            .filter(|(a, b)| a < b)
            .count() as f64
            / s.days.len() as f64
    }
}

pub fn run_inconsistency(a: &Analysis) -> Result<InconsistencyReport, AppError> {
    const STAGE: &str = "inconsistency";
    let w = &a.config.windows;
    let volatility =
        rolling_volatility(&a.returns, w.volatility_days).map_err(|e| a.fail(STAGE, e))?;
    let series = inconsistency_norms(
        a.panel.market_caps(),
        &a.returns,
        &volatility,
        w.inconsistency_days,
    )
    .map_err(|e| a.fail(STAGE, e))?;
    Ok(InconsistencyReport { series, volatility })
}

pub fn write_inconsistency(a: &Analysis, r: &InconsistencyReport) -> Result<(), AppError> {
    let s = &r.series;
    day_series_table(
        a,
        &["date", "nu_MR", "nu_MSigma"],
        &s.days,
        &[&s.nu_mr, &s.nu_msigma],
    )
    .write(&a.out("inconsistency_norms.csv"))?;
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    write_json(
        &a.out("inconsistency_summary.json"),
        &json!({
            "window_days": a.config.windows.inconsistency_days,
            "dates": s.days.len(),
            "mean_nu_MR": round12(mean(&s.nu_mr)),
            "mean_nu_MSigma": round12(mean(&s.nu_msigma)),
            "fraction_MSigma_below_MR": round12(r.fraction_sigma_below_returns()),
        }),
    )?;
    if a.config.output.matrices {
        let dir = a.out("inconsistency_matrices");
        ensure_dir(&dir)?;
        let window = a.config.windows.inconsistency_days;
        for &day in &s.days {
            let dist = core::distance_matrices(
                a.panel.market_caps(),
                &a.returns,
                &r.volatility,
                day,
                window,
            )
            .map_err(|e| a.fail("inconsistency", e))?;
            let (mr, ms) = core::inconsistency::inconsistency_matrices(&dist);
            let rows = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
                m.row_iter()
                    .map(|r| r.iter().map(|v| round12(*v)).collect())
                    .collect()
            };
            write_json(
                &dir.join(format!("{}.json", a.iso(day))),
                &json!({
                    "date": a.iso(day),
                    "tickers": a.panel.assets().iter().map(|x| x.ticker.as_str()).collect::<Vec<_>>(),
                    "affinity_size": rows(&core::to_affinity(&dist.size)),
                    "affinity_returns": rows(&core::to_affinity(&dist.returns)),
                    "affinity_volatility": rows(&core::to_affinity(&dist.volatility)),
                    "inconsistency_MR": rows(&mr),
                    "inconsistency_MSigma": rows(&ms),
                }),
            )?;
        }
    }
    Ok(())
}

pub fn cmd_inconsistency(a: &Analysis) -> Result<InconsistencyReport, AppError> {
    a.write_preamble()?;
    let r = run_inconsistency(a)?;
    write_inconsistency(a, &r)?;
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct DispersionReport {
    pub variance: DaySeries,
    /// Days left out because every asset had zero volatility.
    pub excluded: Vec<usize>,
    /// Days of the dendrogram leaves, in leaf order.
    pub days: Vec<usize>,
    pub matrix: nalgebra::DMatrix<f64>,
    pub dendrogram: Dendrogram,
    /// Label per leaf; 1 marks the minority cluster.
    pub cut: Vec<usize>,
}

pub fn run_dispersion(a: &Analysis) -> Result<DispersionReport, AppError> {
    const STAGE: &str = "dispersion";
    let vol = rolling_volatility(&a.returns, a.config.windows.volatility_days)
        .map_err(|e| a.fail(STAGE, e))?;
    let (variance, excluded) = variance_series(&vol);
    let dm = dispersion_matrix(&vol).map_err(|e| a.fail(STAGE, e))?;
    let dendrogram = hierarchical_cluster(&dm.matrix, a.config.linkage()?)
        .map_err(|e| a.fail("clustering", e))?;
    let cut = dendrogram
        .two_cluster_cut()
        .map_err(|e| a.fail("clustering", e))?;
    Ok(DispersionReport {
        variance,
        excluded,
        days: dm.days,
        matrix: dm.matrix,
        dendrogram,
        cut,
    })
}

fn dendrogram_tree(a: &Analysis, r: &DispersionReport) -> Value {
    let leaves = r.dendrogram.leaves();
    let mut nodes: Vec<Option<Value>> = r
        .days
        .iter()
        .enumerate()
        .map(|(id, &d)| Some(json!({ "id": id, "date": a.iso(d) })))
        .collect();
    for (step, m) in r.dendrogram.merges().iter().enumerate() {
        let left = nodes[m.left].take().expect("each cluster merges once");
        let right = nodes[m.right].take().expect("each cluster merges once");
        nodes.push(Some(json!({
            "id": leaves + step,
            "height": round12(m.height),
            "size": m.size,
            "children": [left, right],
        })));
    }
    nodes.pop().flatten().unwrap_or(Value::Null)
}

pub fn write_dispersion(a: &Analysis, r: &DispersionReport) -> Result<(), AppError> {
    day_series_table(
        a,
        &["date", "variance"],
        &r.variance.days,
        &[&r.variance.values],
    )
    .write(&a.out("variance_series.csv"))?;

    let mut dt = Table::new(&["step", "cluster_a", "cluster_b", "height", "size"]);
    for (step, m) in r.dendrogram.merges().iter().enumerate() {
        dt.push(vec![
            step.to_string(),
            m.left.to_string(),
            m.right.to_string(),
            fmt_f64(m.height),
            m.size.to_string(),
        ]);
    }
    dt.write(&a.out("dendrogram.csv"))?;
    write_json(
        &a.out("dendrogram.json"),
        &json!({ "linkage": a.config.cluster.linkage, "leaves": r.dendrogram.leaves(), "root": dendrogram_tree(a, r) }),
    )?;

    let mut ct = Table::new(&["date", "cluster"]);
    for (&d, &c) in r.days.iter().zip(&r.cut) {
        ct.push(vec![a.iso(d), c.to_string()]);
    }
    ct.write(&a.out("two_cluster_cut.csv"))?;

    let minority: Vec<String> = r
        .days
        .iter()
        .zip(&r.cut)
        .filter(|(_, c)| **c == 1)
        .map(|(d, _)| a.iso(*d))
        .collect();
    write_json(
        &a.out("dispersion_summary.json"),
        &json!({
            "window_days": a.config.windows.volatility_days,
            "linkage": a.config.cluster.linkage,
            "dates": r.days.len(),
            "excluded_dates": r.excluded.iter().map(|&d| a.iso(d)).collect::<Vec<_>>(),
            "minority_size": minority.len(),
            "minority_first": minority.first(),
            "minority_last": minority.last(),
        }),
    )?;

    if a.config.output.matrices {
        let mut mt = Table::new(&r.days.iter().map(|&d| a.iso(d)).collect::<Vec<_>>());
        for row in r.matrix.row_iter() {
            mt.push(row.iter().map(|v| fmt_f64(*v)).collect());
        }
        mt.write(&a.out("dispersion_matrix.csv"))?;
    }
    Ok(())
}

pub fn cmd_dispersion(a: &Analysis) -> Result<DispersionReport, AppError> {
    a.write_preamble()?;
    let r = run_dispersion(a)?;
    write_dispersion(a, &r)?;
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct AllReports {
    pub correlation: CorrelationReport,
    pub spectral: SpectralReport,
    pub inconsistency: InconsistencyReport,
    pub dispersion: DispersionReport,
}

/// Runs the four commands in order; the first failure aborts.
pub fn cmd_all(a: &Analysis) -> Result<AllReports, AppError> {
    a.write_preamble()?;
    let correlation = run_correlation(a)?;
    write_correlation(a, &correlation)?;
    let spectral = run_spectral(a)?;
    write_spectral(a, &spectral)?;
    let inconsistency = run_inconsistency(a)?;
    write_inconsistency(a, &inconsistency)?;
    let dispersion = run_dispersion(a)?;
    write_dispersion(a, &dispersion)?;
    Ok(AllReports {
        correlation,
        spectral,
        inconsistency,
        dispersion,
    })
}
