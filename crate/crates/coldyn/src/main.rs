use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use coldyn::fetch::{assemble_panel_csv, fetch_daily_history, parse_history};
use coldyn::pipeline::{self, Analysis};
use coldyn::{export, tickers, AppError, RunConfig};

#[derive(Parser)]
#[command(
    name = "coldyn",
    version,
    about = "Correlation, spectral, inconsistency and dispersion analysis of daily asset panels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Download per-ticker daily history and write panel CSVs into the data directory.
    Fetch {
        /// Ticker to fetch; repeat for several. Defaults to data.tickers or the built-in universe.
        #[arg(long = "ticker")]
        tickers: Vec<String>,
    },
    /// Rolling correlation norm, turning points and per-period entry statistics.
    Correlation,
    /// Leading-eigenvalue series against rolling market size.
    Spectral,
    /// Size, return and volatility inconsistency norms.
    Inconsistency,
    /// Volatility dispersion, its dendrogram and the two-cluster cut.
    Dispersion,
    /// All four analyses over one loaded panel.
    All,
}

#[derive(Args)]
struct Overrides {
    /// TOML config file with dotted keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Set any config key, e.g. `--set tp.delta=0.25`. Applied before the dedicated flags.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    from: Option<NaiveDate>,
    #[arg(long, global = true)]
    to: Option<NaiveDate>,
    #[arg(long, global = true)]
    correlation_days: Option<usize>,
    #[arg(long, global = true)]
    spectral_days: Option<usize>,
    #[arg(long, global = true)]
    inconsistency_days: Option<usize>,
    #[arg(long, global = true)]
    volatility_days: Option<usize>,
    #[arg(long, global = true)]
    tp_l: Option<usize>,
    #[arg(long, global = true)]
    tp_delta: Option<f64>,
    #[arg(long, global = true)]
    tp_epsilon: Option<f64>,
    #[arg(long, global = true)]
    sg_window: Option<usize>,
    #[arg(long, global = true)]
    sg_degree: Option<usize>,
    /// Leave the unit diagonal out of per-period entry statistics.
    #[arg(long, global = true)]
    exclude_diagonal: bool,
    #[arg(long, global = true)]
    density_points: Option<usize>,
    /// single, complete or average.
    #[arg(long, global = true)]
    linkage: Option<String>,
    /// Also write per-date inconsistency matrices and the dispersion matrix.
    #[arg(long, global = true)]
    matrices: bool,
    #[arg(long, global = true)]
    url_template: Option<String>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig, AppError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        c.apply_overrides(&self.set)?;
        fn put<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        put(&mut c.data.dir, &self.data_dir);
        put(&mut c.output.dir, &self.out_dir);
        if self.from.is_some() {
            c.data.from = self.from;
        }
        if self.to.is_some() {
            c.data.to = self.to;
        }
        put(&mut c.data.url_template, &self.url_template);
        put(&mut c.windows.correlation_days, &self.correlation_days);
        put(&mut c.windows.spectral_days, &self.spectral_days);
        put(&mut c.windows.inconsistency_days, &self.inconsistency_days);
        put(&mut c.windows.volatility_days, &self.volatility_days);
        put(&mut c.tp.l, &self.tp_l);
        put(&mut c.tp.delta, &self.tp_delta);
        put(&mut c.tp.epsilon, &self.tp_epsilon);
        put(&mut c.sg.window, &self.sg_window);
        put(&mut c.sg.degree, &self.sg_degree);
        put(&mut c.stats.density_points, &self.density_points);
        put(&mut c.cluster.linkage, &self.linkage);
        c.stats.exclude_diagonal |= self.exclude_diagonal;
        c.output.matrices |= self.matrices;
        c.validate()?;
        Ok(c)
    }
}

fn fetch(config: &RunConfig, requested: &[String]) -> Result<(), AppError> {
    let range = config.date_range()?.ok_or_else(|| {
        coldyn::config::ConfigError::Invalid("fetch needs --from and --to".into())
    })?;
    let list: Vec<String> = if !requested.is_empty() {
        requested.to_vec()
    } else if !config.data.tickers.is_empty() {
        config.data.tickers.clone()
    } else {
        tickers::default_tickers()
    };
    let raw_dir = config.data.dir.join("raw");
    export::ensure_dir(&raw_dir)?;
    let mut histories = Vec::new();
    for t in &list {
        let text = fetch_daily_history(&config.data.url_template, t, range)?;
        export::write_text(&raw_dir.join(format!("{t}.csv")), &text)?;
        let rows = parse_history(t, &text)?;
        eprintln!("fetched {t}: {} rows", rows.len());
        histories.push((t.clone(), rows));
    }
    let (closes, caps) = assemble_panel_csv(&histories, range);
    export::write_text(&config.closes_path(), &closes)?;
    export::write_text(&config.market_caps_path(), &caps)?;
    eprintln!(
        "wrote {} and {}",
        config.closes_path().display(),
        config.market_caps_path().display()
    );
    Ok(())
}

fn load(config: RunConfig) -> Result<Analysis, AppError> {
    let a = Analysis::load(config)?;
    let range = a.panel.range();
    eprintln!(
        "loaded {} assets over {}..={} ({} dates)",
        a.panel.n_assets(),
        range.start,
        range.end,
        a.panel.dates().len()
    );
    for d in &a.dropped {
        match d.first_missing_date {
            Some(date) => eprintln!("dropped {}: {} on {date}", d.ticker, d.reason),
            None => eprintln!("dropped {}: {}", d.ticker, d.reason),
        }
    }
    Ok(a)
}

fn report_periods(r: &pipeline::CorrelationReport) {
    for p in &r.clipped_periods {
        eprintln!("period {p} clipped to the panel's date range");
    }
    for p in &r.skipped_periods {
        eprintln!("period {p} skipped: too little overlap with the panel");
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let config = cli.opts.resolve()?;
    match cli.command {
        Command::Fetch { tickers } => fetch(&config, &tickers)?,
        Command::Correlation => report_periods(&pipeline::cmd_correlation(&load(config)?)?),
        Command::Spectral => {
            let r = pipeline::cmd_spectral(&load(config)?)?;
            match r.rho {
                Some(rho) => eprintln!("rho(market size, lambda1) = {}", export::fmt_f64(rho)),
                None => eprintln!("rho(market size, lambda1) undefined: constant series"),
            }
        }
        Command::Inconsistency => {
            pipeline::cmd_inconsistency(&load(config)?)?;
        }
        Command::Dispersion => {
            pipeline::cmd_dispersion(&load(config)?)?;
        }
        Command::All => report_periods(&pipeline::cmd_all(&load(config)?)?.correlation),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; help and version requests succeed.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
