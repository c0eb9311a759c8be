use std::path::PathBuf;

use clap::Args;
use plflab_core::market_engine::write_snapshots;
use plflab_core::simulator::{self, SimSummary};
use serde::Serialize;

use super::load_scenario;
use crate::error::{csv_error, Result};
use crate::io::{create_dir, write_bytes, write_json, Ctx};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scenario JSON file
    #[arg(required_unless_present = "reference")]
    pub scenario: Option<PathBuf>,
    /// Run the built-in kink-clustering reference scenario instead
    #[arg(long, conflicts_with = "scenario")]
    pub reference: bool,
    /// Output directory (receives snapshots.csv and summary.json)
    #[arg(long)]
    pub out: PathBuf,
    /// Override the scenario's rng_seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    rng_seed: u64,
    horizon_blocks: u64,
    #[serde(flatten)]
    summary: &'a SimSummary,
}

pub fn run(ctx: &Ctx, args: &SimulateArgs) -> Result<()> {
    let scenario = load_scenario(ctx, args.scenario.as_deref(), args.seed)?;
    let out = simulator::run(&scenario)?;
    create_dir(&args.out)?;
    let mut csv = Vec::new();
    write_snapshots(&mut csv, &out.snapshots).map_err(|e| csv_error("snapshots", e))?;
    write_bytes(&args.out.join("snapshots.csv"), &csv)?;
    let summary = SummaryFile {
        rng_seed: scenario.rng_seed,
        horizon_blocks: scenario.horizon_blocks,
        summary: &out.summary,
    };
    write_json(&args.out.join("summary.json"), &summary)?;
    println!(
        "{} blocks, mean utilization {:.4}, modal {:.3}, {:.2}% of blocks at or above U = 1 -> {}",
        out.summary.blocks,
        out.summary.mean_utilization,
        out.summary.modal_utilization,
        100.0 * out.summary.frac_illiquid,
        args.out.display()
    );
    Ok(())
}
