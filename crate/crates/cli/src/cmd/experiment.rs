use std::path::PathBuf;

use clap::Args;
use plflab_core::simulator::{kink_placement_experiment, smooth_vs_kinked_experiment, ExperimentRow};
use plflab_core::RateModel;

use super::{load_model, load_scenario, parse_fixed};
use crate::error::{CliError, Result};
use crate::io::{csv_bytes, emit, Ctx};

pub const HEADER: [&str; 8] = [
    "label",
    "kink",
    "mean_distance_from_one",
    "frac_above_095",
    "mean_borrow_rate_annual",
    "modal_utilization",
    "utilization_sd",
    "liquidations",
];

#[derive(Args, Debug)]
pub struct KinkArgs {
    /// Scenario JSON with a kinked model (default: built-in reference)
    pub scenario: Option<PathBuf>,
    /// Kink positions to compare, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.7,0.8,0.9,0.95")]
    pub kinks: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SmoothArgs {
    /// Scenario JSON (default: built-in reference)
    pub scenario: Option<PathBuf>,
    /// Smooth alternative model JSON (default: polynomial model with a 50% ceiling and the base reserve factor)
    #[arg(long)]
    pub alt_model: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit_rows(out: Option<&std::path::Path>, rows: &[ExperimentRow]) -> Result<()> {
    emit(out, &csv_bytes(&HEADER, rows)?)
}

pub fn run_kink(ctx: &Ctx, args: &KinkArgs) -> Result<()> {
    let base = load_scenario(ctx, args.scenario.as_deref(), args.seed)?;
    let kinks = args.kinks.iter().map(|k| parse_fixed(k, "--kinks")).collect::<Result<Vec<_>>>()?;
    if kinks.is_empty() {
        return Err(CliError::Input("--kinks is empty".into()));
    }
    emit_rows(args.out.as_deref(), &kink_placement_experiment(&base, &kinks)?)
}

pub fn run_smooth(ctx: &Ctx, args: &SmoothArgs) -> Result<()> {
    let base = load_scenario(ctx, args.scenario.as_deref(), args.seed)?;
    let alt = match &args.alt_model {
        Some(p) => load_model(ctx, p)?,
        None => {
            let lambda = base.model_schedule[0].model.reserve_factor().unwrap_or_default();
            RateModel::default_nonlinear(lambda)
        }
    };
    emit_rows(args.out.as_deref(), &smooth_vs_kinked_experiment(&base, &alt)?)
}
