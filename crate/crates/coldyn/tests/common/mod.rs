#![allow(dead_code)]

use std::path::Path;

use chrono::NaiveDate;
use coldyn::{AssetMeta, PricePanel, RunConfig};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

/// Prices from log returns: `close[i][0] = start`, then cumulative products.
pub fn closes_from_returns(returns: &DMatrix<f64>, start: f64) -> DMatrix<f64> {
    let (n, t) = returns.shape();
    let mut c = DMatrix::from_element(n, t + 1, start);
    for i in 0..n {
        for d in 1..=t {
            c[(i, d)] = c[(i, d - 1)] * returns[(i, d - 1)].exp();
        }
    }
    c
}

pub fn panel(first: &str, closes: DMatrix<f64>, caps: DMatrix<f64>) -> PricePanel {
    let days = closes.ncols();
    let dates: Vec<NaiveDate> = date(first).iter_days().take(days).collect();
    let assets = (0..closes.nrows())
        .map(|i| AssetMeta {
            ticker: format!("T{i:02}"),
            name: format!("T{i:02}"),
        })
        .collect();
    PricePanel::new(dates, assets, closes, caps).unwrap()
}

/// One-factor panel with asset-specific noise; `beta(t)` sets the factor loading on return day `t`.
pub fn factor_returns(
    seed: u64,
    n: usize,
    days: usize,
    beta: impl Fn(usize) -> f64,
) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Normal::new(0.0, 0.03).unwrap();
    let e = Normal::new(0.0, 0.04).unwrap();
    let factor: Vec<f64> = (0..days).map(|_| f.sample(&mut rng)).collect();
    DMatrix::from_fn(n, days, |_, t| beta(t + 1) * factor[t] + e.sample(&mut rng))
}

/// Caps proportional to price with fixed random supplies.
pub fn caps_for(closes: &DMatrix<f64>, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = rand_distr::Uniform::new(1e6, 1e9).unwrap();
    let supply: Vec<f64> = (0..closes.nrows()).map(|_| u.sample(&mut rng)).collect();
    DMatrix::from_fn(closes.nrows(), closes.ncols(), |i, t| {
        closes[(i, t)] * supply[i]
    })
}

pub fn factor_panel(seed: u64, n: usize, days: usize, first: &str) -> PricePanel {
    let r = factor_returns(seed, n, days, |t| {
        if (400..500).contains(&t) {
            2.5
        } else {
            0.6
        }
    });
    let closes = closes_from_returns(&r, 100.0);
    let caps = caps_for(&closes, seed + 1);
    panel(first, closes, caps)
}

/// Two volatility regimes with window 2: every asset alternates `±c` until return
/// day `boundary`, after which asset 0 alternates `9c, −c`. Window-2 volatilities are
/// then uniform on end days before `boundary` and concentrated from `boundary` on
/// (`boundary` must be even).
pub fn two_regime_returns(n: usize, days: usize, boundary: usize) -> DMatrix<f64> {
    let c = 0.01;
    DMatrix::from_fn(n, days, |i, k| {
        let t = k + 1;
        let up = t % 2 == 0;
        match (i, t >= boundary) {
            (0, true) if up => 9.0 * c,
            _ if up => c,
            _ => -c,
        }
    })
}

pub fn write_panel(dir: &Path, p: &PricePanel) {
    std::fs::create_dir_all(dir).unwrap();
    p.write_csv(&dir.join("closes.csv"), &dir.join("market_caps.csv"))
        .unwrap();
}

pub fn config(data: &Path, out: &Path) -> RunConfig {
    let mut c = RunConfig::default();
    c.data.dir = data.to_path_buf();
    c.output.dir = out.to_path_buf();
    c
}
