use std::path::PathBuf;

use clap::Args;
use plflab_core::analytics::{
    concentration, illiquidity_bands, try_median, BandKind, LiquiditySeries, DEFAULT_THRESHOLDS,
};
use plflab_core::market_engine::read_snapshots;
use serde::{Deserialize, Serialize};

use super::load_panel;
use crate::error::{csv_error, CliError, Result};
use crate::io::{create_dir, csv_bytes, write_bytes, write_json, Ctx};

#[derive(Args, Debug)]
pub struct LiquidityArgs {
    /// Panel CSV; one series per (platform, market)
    #[arg(long, conflicts_with = "snapshots")]
    pub panel: Option<PathBuf>,
    /// Simulator snapshots.csv instead of a panel
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Only this platform (panel input)
    #[arg(long)]
    pub platform: Option<String>,
    /// Only this market (panel input)
    #[arg(long)]
    pub market: Option<String>,
    /// Account balances CSV `account,balance` for the concentration curve
    #[arg(long)]
    pub balances: Option<PathBuf>,
    /// Band edges T0,T1,T2: mid [T0,T1), high [T1,T2), illiquid >= T2
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = DEFAULT_THRESHOLDS)]
    pub thresholds: Vec<f64>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

/// A labelled utilization path: `periods` are dates or block numbers.
struct Series {
    name: String,
    periods: Vec<String>,
    data: LiquiditySeries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub series: String,
    pub band: String,
    /// First and last period inside the band (inclusive).
    pub start: String,
    pub end: String,
    pub periods: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiquidityRow {
    pub series: String,
    pub period: String,
    pub total_supply: f64,
    pub total_borrows: f64,
    pub available: f64,
    pub utilization: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceRow {
    pub account: String,
    pub balance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub rank: usize,
    pub account: String,
    pub balance: f64,
    pub cumulative_share: f64,
}

#[derive(Serialize)]
struct SeriesSummary {
    series: String,
    periods: usize,
    median_total_supply: f64,
    median_available: f64,
    mean_utilization: f64,
    frac_mid: f64,
    frac_high: f64,
    frac_illiquid: f64,
    episodes_mid: usize,
    episodes_high: usize,
    episodes_illiquid: usize,
}

#[derive(Serialize)]
struct ConcentrationSummary {
    accounts: usize,
    total: f64,
    top_1: f64,
    top_3: f64,
    top_10: f64,
    accounts_for_half: usize,
}

#[derive(Serialize)]
struct Summary {
    thresholds: [f64; 3],
    series: Vec<SeriesSummary>,
    concentration: Option<ConcentrationSummary>,
}

fn input_err(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

fn from_panel(ctx: &Ctx, args: &LiquidityArgs, path: &std::path::Path) -> Result<Vec<Series>> {
    let panel = load_panel(ctx, path)?;
    let mut keys: Vec<(String, String)> =
        panel.rows.iter().map(|r| (r.platform.clone(), r.market.clone())).collect();
    keys.sort();
    keys.dedup();
    keys.retain(|(p, m)| {
        args.platform.as_ref().is_none_or(|x| x == p) && args.market.as_ref().is_none_or(|x| x == m)
    });
    if keys.is_empty() {
        return Err(CliError::Input("no panel rows match --platform/--market".into()));
    }
    Ok(keys
        .iter()
        .map(|(p, m)| {
            let rows = panel.rows_for(p, m);
            Series {
                name: format!("{p}/{m}"),
                periods: rows.iter().map(|r| r.date.to_string()).collect(),
                data: LiquiditySeries::new(
                    rows.iter().map(|r| r.total_supply).collect(),
                    rows.iter().map(|r| r.total_borrows).collect(),
                ),
            }
        })
        .collect())
}

fn from_snapshots(ctx: &Ctx, path: &std::path::Path) -> Result<Series> {
    let snaps = read_snapshots(ctx.open(path)?).map_err(|e| csv_error(&path.display().to_string(), e))?;
    if snaps.is_empty() {
        return Err(CliError::Input(format!("{}: no snapshot rows", path.display())));
    }
    Ok(Series {
        name: "snapshots".into(),
        periods: snaps.iter().map(|s| s.block.to_string()).collect(),
        data: LiquiditySeries::new(
            snaps.iter().map(|s| s.gross_deposits.to_f64()).collect(),
            snaps.iter().map(|s| s.total_loans.to_f64()).collect(),
        ),
    })
}

fn read_balances(ctx: &Ctx, path: &std::path::Path) -> Result<Vec<BalanceRow>> {
    let mut rdr = csv::Reader::from_reader(ctx.open(path)?);
    let rows: Vec<BalanceRow> = rdr
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_error(&path.display().to_string(), e))?;
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no balance rows", path.display())));
    }
    Ok(rows)
}

pub fn run(ctx: &Ctx, args: &LiquidityArgs) -> Result<()> {
    let thresholds: [f64; 3] = args.thresholds.clone().try_into().map_err(|_| input_err("--thresholds needs 3 values"))?;
    let series = match (&args.panel, &args.snapshots) {
        (Some(p), _) => from_panel(ctx, args, p)?,
        (None, Some(s)) => vec![from_snapshots(ctx, s)?],
        (None, None) if args.balances.is_none() => {
            return Err(CliError::Input("give --panel, --snapshots or --balances".into()))
        }
        (None, None) => Vec::new(),
    };

    let mut band_rows = Vec::new();
    let mut liq_rows = Vec::new();
    let mut summaries = Vec::new();
    for s in &series {
        let us = s.data.utilization();
        let available = s.data.available();
        let bands = illiquidity_bands(&us, &thresholds).map_err(input_err)?;
        let count = |k: BandKind| bands.iter().filter(|b| b.band == k).map(|b| b.end - b.start).sum::<usize>();
        let episodes = |k: BandKind| bands.iter().filter(|b| b.band == k).count();
        let n = us.len() as f64;
        summaries.push(SeriesSummary {
            series: s.name.clone(),
            periods: us.len(),
            median_total_supply: try_median(&s.data.total_supply).map_err(input_err)?,
            median_available: try_median(&available).map_err(input_err)?,
            mean_utilization: us.iter().sum::<f64>() / n,
            frac_mid: count(BandKind::Mid) as f64 / n,
            frac_high: count(BandKind::High) as f64 / n,
            frac_illiquid: count(BandKind::Illiquid) as f64 / n,
            episodes_mid: episodes(BandKind::Mid),
            episodes_high: episodes(BandKind::High),
            episodes_illiquid: episodes(BandKind::Illiquid),
        });
        band_rows.extend(bands.iter().map(|b| BandRow {
            series: s.name.clone(),
            band: b.band.as_str().into(),
            start: s.periods[b.start].clone(),
            end: s.periods[b.end - 1].clone(),
            periods: b.end - b.start,
        }));
        for (i, period) in s.periods.iter().enumerate() {
            liq_rows.push(LiquidityRow {
                series: s.name.clone(),
                period: period.clone(),
                total_supply: s.data.total_supply[i],
                total_borrows: s.data.total_borrows[i],
                available: available[i],
                utilization: us[i],
            });
        }
    }

    let conc = match &args.balances {
        Some(path) => {
            let rows = read_balances(ctx, path)?;
            let balances: Vec<f64> = rows.iter().map(|r| r.balance).collect();
            let c = concentration(&balances).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            // stable order: by balance descending, ties by file order
            let mut order: Vec<usize> = (0..rows.len()).collect();
            order.sort_by(|&a, &b| balances[b].total_cmp(&balances[a]));
            let curve: Vec<ConcentrationRow> = order
                .iter()
                .enumerate()
                .map(|(k, &i)| ConcentrationRow {
                    rank: k + 1,
                    account: rows[i].account.clone(),
                    balance: rows[i].balance,
                    cumulative_share: c.curve[k],
                })
                .collect();
            let summary = ConcentrationSummary {
                accounts: rows.len(),
                total: balances.iter().sum(),
                top_1: c.top_k_share(1),
                top_3: c.top_k_share(3),
                top_10: c.top_k_share(10),
                accounts_for_half: c.accounts_for_share(0.5),
            };
            Some((curve, summary))
        }
        None => None,
    };

    create_dir(&args.out)?;
    if !series.is_empty() {
        write_bytes(&args.out.join("bands.csv"), &csv_bytes(&["series", "band", "start", "end", "periods"], &band_rows)?)?;
        write_bytes(
            &args.out.join("liquidity.csv"),
            &csv_bytes(
                &["series", "period", "total_supply", "total_borrows", "available", "utilization"],
                &liq_rows,
            )?,
        )?;
    }
    let concentration = match conc {
        Some((curve, summary)) => {
            write_bytes(
                &args.out.join("concentration.csv"),
                &csv_bytes(&["rank", "account", "balance", "cumulative_share"], &curve)?,
            )?;
            Some(summary)
        }
        None => None,
    };
    for s in &summaries {
        println!(
            "{}: {} periods, mid {:.1}%, high {:.1}%, illiquid {:.1}% ({} illiquid episode(s))",
            s.series,
            s.periods,
            100.0 * s.frac_mid,
            100.0 * s.frac_high,
            100.0 * s.frac_illiquid,
            s.episodes_illiquid
        );
    }
    if let Some(c) = &concentration {
        println!("concentration: top 1 {:.1}%, top 3 {:.1}%, {} account(s) hold half", 100.0 * c.top_1, 100.0 * c.top_3, c.accounts_for_half);
    }
    write_json(&args.out.join("summary.json"), &Summary { thresholds, series: summaries, concentration })
}
