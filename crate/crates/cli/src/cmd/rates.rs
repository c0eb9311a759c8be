use std::path::PathBuf;

use chrono::NaiveDate;
use clap::Args;
use plflab_core::rate_models::{annualize, borrow_rate, cdai_schedule, saving_rate, RateError};
use plflab_core::{FixedDec, RateModel, DEFAULT_BLOCKS_PER_YEAR};

use super::{load_model, parse_fixed};
use crate::error::{CliError, Result};
use crate::io::{emit, Ctx};

/// Upper bound on grid size, to catch typos like a step of 1e-12.
const MAX_POINTS: usize = 1_000_000;

#[derive(Args, Debug)]
pub struct RatesArgs {
    /// Rate-model JSON file
    #[arg(long, required_unless_present = "cdai_date", conflicts_with = "cdai_date")]
    pub model: Option<PathBuf>,
    /// Use the bundled cDAI parameters in force on this date (YYYY-MM-DD)
    #[arg(long)]
    pub cdai_date: Option<String>,
    /// Utilization grid LO:HI:STEP (inclusive of HI when it falls on the grid)
    #[arg(long, default_value = "0:1:0.01", conflicts_with = "points")]
    pub grid: String,
    /// Explicit utilization points, comma separated
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<String>,
    /// Report per-block rates instead of annualized ones
    #[arg(long)]
    pub per_block: bool,
    #[arg(long, default_value_t = DEFAULT_BLOCKS_PER_YEAR as u64)]
    pub blocks_per_year: u64,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn cdai_model(date: &str) -> Result<RateModel> {
    let day: NaiveDate = date
        .parse()
        .map_err(|e| CliError::Input(format!("--cdai-date {date:?}: {e}")))?;
    let schedule = cdai_schedule();
    let dated = |e: &plflab_core::rate_models::ModelSpec| e.date.as_deref().and_then(|d| d.parse::<NaiveDate>().ok());
    schedule
        .entries
        .iter()
        .rfind(|e| dated(e).is_some_and(|d| d <= day))
        .map(|e| e.model.clone())
        .ok_or_else(|| {
            let first = schedule.entries.first().and_then(|e| e.date.clone()).unwrap_or_default();
            CliError::Input(format!("no cDAI parameters before {first}"))
        })
}

pub fn grid_points(spec: &str) -> Result<Vec<FixedDec>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(CliError::Input(format!("--grid expects LO:HI:STEP, got {spec:?}")));
    };
    let (lo, hi, step) = (parse_fixed(lo, "--grid")?, parse_fixed(hi, "--grid")?, parse_fixed(step, "--grid")?);
    if step <= FixedDec::ZERO {
        return Err(CliError::Input("--grid step must be positive".into()));
    }
    if lo.is_negative() || hi < lo {
        return Err(CliError::Input("--grid needs 0 <= LO <= HI".into()));
    }
    let mut out = Vec::new();
    let mut u = lo;
    while u <= hi {
        if out.len() == MAX_POINTS {
            return Err(CliError::Input(format!("--grid has more than {MAX_POINTS} points")));
        }
        out.push(u);
        u = u.checked_add(step).map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok(out)
}

fn numerical(e: impl ToString) -> CliError {
    CliError::Numerical(e.to_string())
}

pub fn run(ctx: &Ctx, args: &RatesArgs) -> Result<()> {
    let model = match (&args.model, &args.cdai_date) {
        (Some(p), _) => load_model(ctx, p)?,
        (None, Some(d)) => cdai_model(d)?,
        (None, None) => unreachable!("clap requires one of the two"),
    };
    let points = if args.points.is_empty() {
        grid_points(&args.grid)?
    } else {
        args.points.iter().map(|p| parse_fixed(p, "--points")).collect::<Result<_>>()?
    };
    if points.iter().any(|u| u.is_negative()) {
        return Err(CliError::Input("utilization must be >= 0".into()));
    }
    let bpy = args.blocks_per_year as i128;
    if bpy == 0 {
        return Err(CliError::Input("--blocks-per-year must be positive".into()));
    }
    let scale = |r: FixedDec| if args.per_block { Ok(r) } else { annualize(r, bpy).map_err(numerical) };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["utilization", "borrow_rate", "supply_rate"]).map_err(numerical)?;
    for u in points {
        let b = scale(borrow_rate(&model, u).map_err(numerical)?)?;
        // the aave variable model has no closed-form supply side here
        let s = match saving_rate(&model, u) {
            Ok(s) => scale(s)?.to_string(),
            Err(RateError::NotDefinedForModel(_)) => String::new(),
            Err(e) => return Err(numerical(e)),
        };
        w.write_record([u.to_string(), b.to_string(), s]).map_err(numerical)?;
    }
    emit(args.out.as_deref(), &w.into_inner().map_err(numerical)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_and_exact() {
        let g = grid_points("0:1:0.25").unwrap();
        let as_str: Vec<String> = g.iter().map(|u| u.to_string()).collect();
        assert_eq!(as_str.len(), 5);
        assert_eq!(g[4], FixedDec::ONE);
        assert_eq!(grid_points("0.5:0.5:0.1").unwrap().len(), 1);
        // 0.3 does not land on 1.0, so the last point stays below HI
        assert_eq!(grid_points("0:1:0.3").unwrap().last().unwrap().to_string(), "0.900000000000000000");
    }

    #[test]
    fn bad_grids_are_input_errors() {
        for spec in ["0:1:0", "0:1:-0.1", "1:0:0.1", "-0.1:1:0.1", "0:1", "a:b:c", "0:1:0.0000000001"] {
            let e = grid_points(spec).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{spec}");
        }
    }

    #[test]
    fn cdai_lookup_uses_the_row_in_force() {
        let schedule = cdai_schedule();
        let first = schedule.entries[0].date.clone().unwrap();
        assert_eq!(cdai_model(&first).unwrap(), schedule.entries[0].model);
        assert_eq!(cdai_model("2030-01-01").unwrap(), schedule.entries.last().unwrap().model);
        assert!(cdai_model("2019-01-01").is_err());
        assert!(cdai_model("not a date").is_err());
    }
}
