//! Writes a small synthetic data set for trying the other subcommands.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::Args;
use plflab_core::panel::{synthetic_uip_panel, synthetic_vecm_panel, Panel};
use plflab_core::rate_models::cdai_schedule;
use plflab_core::Scenario;

use super::liquidity::BalanceRow;
use crate::error::{csv_error, Result};
use crate::io::{create_dir, csv_bytes, write_bytes, write_json};

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Days of panel data
    #[arg(long, default_value_t = 730)]
    pub days: usize,
}

fn panel_bytes(p: &Panel) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    p.write(&mut buf).map_err(|e| csv_error("panel", e))?;
    Ok(buf)
}

pub fn run(args: &DemoArgs) -> Result<()> {
    let start = NaiveDate::from_ymd_opt(2019, 12, 17).expect("valid date");
    create_dir(&args.out)?;
    let (uip, fx) = synthetic_uip_panel("compound", &["DAI", "USDC", "ETH"], start, args.days, args.seed);
    write_bytes(&args.out.join("panel.csv"), &panel_bytes(&uip)?)?;
    let mut buf = Vec::new();
    fx.write(&mut buf).map_err(|e| csv_error("fx", e))?;
    write_bytes(&args.out.join("fx.csv"), &buf)?;
    let vecm = synthetic_vecm_panel(["compound", "aave", "dydx"], "DAI", start, args.days, args.seed);
    write_bytes(&args.out.join("vecm_panel.csv"), &panel_bytes(&vecm)?)?;
    // heavy-tailed holdings: balance of the k-th account ~ k^-1.5
    let balances: Vec<BalanceRow> = (1..=200)
        .map(|k: i32| BalanceRow { account: format!("acct{k:03}"), balance: (1e6 / f64::from(k).powf(1.5)).round() })
        .collect();
    write_bytes(&args.out.join("balances.csv"), &csv_bytes(&["account", "balance"], &balances)?)?;
    write_json(&args.out.join("scenario.json"), &Scenario::kink_reference())?;
    let model = cdai_schedule().by_date("2020-04-27").map(|e| e.model.clone());
    if let Some(m) = model {
        write_json(&args.out.join("cdai_2020-04-27.json"), &m)?;
    }
    println!("demo data written to {}", args.out.display());
    Ok(())
}
