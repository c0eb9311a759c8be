pub mod demo;
pub mod experiment;
pub mod liquidity;
pub mod rates;
pub mod simulate;
pub mod uip;
pub mod vecm;

use std::path::Path;

use clap::ValueEnum;
use plflab_core::econometrics::Frequency;
use plflab_core::panel::{FxTable, Panel, RateKind};
use plflab_core::{FixedDec, RateModel, Scenario};

use crate::error::{CliError, Result};
use crate::io::Ctx;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FreqArg {
    Daily,
    Weekly,
}

impl From<FreqArg> for Frequency {
    fn from(f: FreqArg) -> Self {
        match f {
            FreqArg::Daily => Frequency::Daily,
            FreqArg::Weekly => Frequency::Weekly,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RateArg {
    Borrow,
    Supply,
}

impl From<RateArg> for RateKind {
    fn from(r: RateArg) -> Self {
        match r {
            RateArg::Borrow => RateKind::Borrow,
            RateArg::Supply => RateKind::Supply,
        }
    }
}

/// Scenario from JSON (or the built-in reference when `path` is `None`),
/// with an optional seed override, validated.
pub fn load_scenario(ctx: &Ctx, path: Option<&Path>, seed: Option<u64>) -> Result<Scenario> {
    let mut s = match path {
        Some(p) => {
            let text = ctx.read_to_string(p)?;
            serde_json::from_str::<Scenario>(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
        }
        None => Scenario::kink_reference(),
    };
    if let Some(seed) = seed {
        s.rng_seed = seed;
    }
    s.validate()?;
    Ok(s)
}

pub fn load_model(ctx: &Ctx, path: &Path) -> Result<RateModel> {
    let text = ctx.read_to_string(path)?;
    let model: RateModel =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    model.validate().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(model)
}

pub fn load_panel(ctx: &Ctx, path: &Path) -> Result<Panel> {
    let panel = Panel::read(ctx.open(path)?).map_err(|e| with_path(path, e.into()))?;
    if panel.rows.is_empty() {
        return Err(CliError::Input(format!("{}: panel has no rows", path.display())));
    }
    Ok(panel)
}

pub fn load_fx(ctx: &Ctx, path: &Path) -> Result<FxTable> {
    FxTable::read(ctx.open(path)?).map_err(|e| with_path(path, e.into()))
}

fn with_path(path: &Path, e: CliError) -> CliError {
    let msg = |m: String| format!("{}: {m}", path.display());
    match e {
        CliError::Input(m) => CliError::Input(msg(m)),
        CliError::Io(m) => CliError::Io(msg(m)),
        CliError::Numerical(m) => CliError::Numerical(msg(m)),
    }
}

pub fn parse_fixed(s: &str, what: &str) -> Result<FixedDec> {
    s.trim()
        .parse::<FixedDec>()
        .map_err(|e| CliError::Input(format!("{what}: cannot parse {s:?}: {e}")))
}
