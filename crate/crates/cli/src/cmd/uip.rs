use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use plflab_core::econometrics::{uip_regress, Frequency, RateSeries, RegressionResult};
use plflab_core::panel::{per_period, FxTable, Panel, RateKind};
use serde::{Deserialize, Serialize};

use super::{load_fx, load_panel, FreqArg, RateArg};
use crate::error::{CliError, Result};
use crate::io::{csv_bytes, emit, Ctx};

#[derive(Args, Debug)]
pub struct UipArgs {
    /// Panel CSV (default: $PLFLAB_DATA_DIR/panel.csv)
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Exchange-rate CSV (default: $PLFLAB_DATA_DIR/fx.csv)
    #[arg(long)]
    pub fx: Option<PathBuf>,
    /// Platform to analyse; may be omitted when the panel has only one
    #[arg(long)]
    pub platform: Option<String>,
    /// Market pairs I:J, comma separated (default: every pair in the fx file)
    #[arg(long, value_delimiter = ',')]
    pub pairs: Vec<String>,
    #[arg(long, value_enum, default_value = "daily")]
    pub frequency: FreqArg,
    /// Newey-West lags (default: floor(4 (n/100)^(2/9)))
    #[arg(long)]
    pub hac_lags: Option<usize>,
    /// Which interest rate to use as iota
    #[arg(long, value_enum, default_value = "borrow")]
    pub rate: RateArg,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One results row: the regression for one market pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UipRow {
    pub platform: String,
    pub market_i: String,
    pub market_j: String,
    pub n_obs: usize,
    pub hac_lags: usize,
    pub alpha: f64,
    pub se_alpha: f64,
    pub p_alpha: f64,
    pub beta: f64,
    pub se_beta: f64,
    pub p_beta: f64,
    pub r_squared: f64,
    pub wald_strict: f64,
    pub p_strict: f64,
    pub wald_weak: f64,
    pub p_weak: f64,
}

pub const HEADER: [&str; 16] = [
    "platform", "market_i", "market_j", "n_obs", "hac_lags", "alpha", "se_alpha", "p_alpha", "beta", "se_beta",
    "p_beta", "r_squared", "wald_strict", "p_strict", "wald_weak", "p_weak",
];

impl UipRow {
    fn new(platform: &str, i: &str, j: &str, r: &RegressionResult) -> Self {
        UipRow {
            platform: platform.into(),
            market_i: i.into(),
            market_j: j.into(),
            n_obs: r.n_obs,
            hac_lags: r.hac_lags,
            alpha: r.alpha_hat,
            se_alpha: r.se_alpha,
            p_alpha: r.p_alpha,
            beta: r.beta_hat,
            se_beta: r.se_beta,
            p_beta: r.p_beta,
            r_squared: r.r_squared,
            wald_strict: r.wald_strict,
            p_strict: r.p_strict,
            wald_weak: r.wald_weak,
            p_weak: r.p_weak,
        }
    }
}

fn pick_platform(panel: &Panel, given: Option<&str>) -> Result<String> {
    let all: BTreeSet<String> = panel.rows.iter().map(|r| r.platform.clone()).collect();
    let listing = || all.iter().cloned().collect::<Vec<_>>().join(", ");
    match given {
        Some(p) if all.contains(p) => Ok(p.to_string()),
        Some(p) => Err(CliError::Input(format!("unknown platform {p:?}; available: {}", listing()))),
        None if all.len() == 1 => Ok(all.into_iter().next().expect("one platform")),
        None => Err(CliError::Input(format!("panel has several platforms; pick one with --platform ({})", listing()))),
    }
}

fn parse_pairs(specs: &[String], fx: &FxTable) -> Result<Vec<(String, String)>> {
    if specs.is_empty() {
        return Ok(fx.pairs());
    }
    specs
        .iter()
        .map(|s| match s.split_once(':') {
            Some((i, j)) if !i.is_empty() && !j.is_empty() && i != j => Ok((i.to_string(), j.to_string())),
            _ => Err(CliError::Input(format!("--pairs expects I:J with two distinct markets, got {s:?}"))),
        })
        .collect()
}

struct Inputs<'a> {
    panel: &'a Panel,
    fx: &'a FxTable,
    platform: &'a str,
    kind: RateKind,
    freq: Frequency,
}

impl Inputs<'_> {
    /// `(S, iota_i, iota_j)` restricted to common periods, rates per period.
    fn series(&self, i: &str, j: &str) -> Result<Vec<RateSeries>> {
        let s = self.fx.series(i, j, self.freq)?;
        let rate = |m: &str| -> Result<RateSeries> {
            Ok(per_period(&self.panel.rate_series(self.platform, m, self.kind, self.freq)?, self.freq))
        };
        let (ii, ij) = (rate(i)?, rate(j)?);
        Ok(RateSeries::align(&[&s, &ii, &ij]))
    }
}

pub fn run(ctx: &Ctx, args: &UipArgs) -> Result<()> {
    let panel = load_panel(ctx, &ctx.input_or_default(args.panel.as_deref(), "panel.csv", "--panel")?)?;
    let fx = load_fx(ctx, &ctx.input_or_default(args.fx.as_deref(), "fx.csv", "--fx")?)?;
    let platform = pick_platform(&panel, args.platform.as_deref())?;
    let markets: BTreeSet<String> =
        panel.rows.iter().filter(|r| r.platform == platform).map(|r| r.market.clone()).collect();
    if markets.len() < 2 {
        return Err(CliError::Input(format!(
            "platform {platform:?} has a single market in the panel; UIP needs at least two"
        )));
    }
    let pairs = parse_pairs(&args.pairs, &fx)?;
    if pairs.is_empty() {
        return Err(CliError::Input("exchange-rate file lists no pairs".into()));
    }
    for (i, j) in &pairs {
        for m in [i, j] {
            if !markets.contains(m) {
                let have = markets.iter().cloned().collect::<Vec<_>>().join(", ");
                return Err(CliError::Input(format!("market {m:?} not in panel for {platform}; available: {have}")));
            }
        }
    }
    let inputs = Inputs { panel: &panel, fx: &fx, platform: &platform, kind: args.rate.into(), freq: args.frequency.into() };
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (i, j) in &pairs {
        let aligned = inputs.series(i, j)?;
        match uip_regress(&aligned[0], &aligned[1], &aligned[2], args.hac_lags) {
            Ok(r) => rows.push(UipRow::new(&platform, i, j, &r)),
            Err(e) => {
                eprintln!("warning: skipping {i}:{j}: {e}");
                skipped.push(format!("{i}:{j}"));
            }
        }
    }
    emit(args.out.as_deref(), &csv_bytes(&HEADER, &rows)?)?;
    if skipped.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("estimation failed for {} pair(s): {}", skipped.len(), skipped.join(", "))))
    }
}
