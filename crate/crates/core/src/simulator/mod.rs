//! Agent-based driver for a single market.
//!
//! Each block, in order: scheduled model changes, price updates, agent
//! actions (agents see the previous block's rates), liquidation of
//! undercollateralized borrowers by a built-in liquidator, accrual, and a
//! snapshot. A run is a pure function of its [`Scenario`].

mod scenario;

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed_point::FixedDec;
use crate::market_engine::{Action, EngineError, Event, MarketState, Snapshot};
use crate::rate_models::RateModel;

pub use scenario::{AgentKind, AgentSpec, PricePoint, Scenario, ScheduledModel, SCHEMA_VERSION};

pub const LIQUIDATOR: &str = "liquidator";
/// Histogram bin width used for modal utilization.
pub const UTILIZATION_BIN: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("two model changes scheduled at block {0}")]
    ScheduleConflict(u64),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("block {block} is outside the horizon of {horizon} blocks")]
    BlockOutOfRange { block: u64, horizon: u64 },
    #[error("engine invariant violated at block {block}: {msg}")]
    Invariant { block: u64, msg: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub blocks: u64,
    pub mean_utilization: f64,
    pub median_utilization: f64,
    pub modal_utilization: f64,
    pub utilization_sd: f64,
    /// Share of blocks with U in [0.8, 0.9), [0.9, 1.0) and [1.0, inf).
    pub frac_mid_band: f64,
    pub frac_high_band: f64,
    pub frac_illiquid: f64,
    pub frac_above_095: f64,
    pub mean_borrow_rate_annual: f64,
    pub liquidations: u64,
    /// Withdrawals cut short because cash ran out.
    pub constrained_withdrawals: u64,
    pub final_exchange_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<Event>,
    pub summary: SimSummary,
}

impl SimOutput {
    pub fn utilization(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.utilization.to_f64()).collect()
    }
}

struct Runner<'a> {
    scenario: &'a Scenario,
    market: MarketState,
    events: Vec<Event>,
    rng: Xoshiro256PlusPlus,
    liquidations: u64,
    constrained_withdrawals: u64,
}

impl Runner<'_> {
    fn apply(&mut self, block: u64, action: Action) -> Result<(), EngineError> {
        let event = Event { block, action };
        self.market.apply(&event)?;
        self.events.push(event);
        Ok(())
    }

    fn noise(&mut self) -> f64 {
        loop {
            let z: f64 = self.rng.sample(StandardNormal);
            if z.abs() <= 3.0 {
                return z;
            }
        }
    }

    fn step_for(&mut self, agent: &AgentSpec, gap: f64) -> f64 {
        let size = agent.size.to_f64();
        let drift = agent.responsiveness.to_f64() * size * gap.clamp(-1.0, 1.0);
        let noise_scale = agent.noise_scale.to_f64();
        let z = if noise_scale > 0.0 { self.noise() } else { 0.0 };
        drift + noise_scale * size * z
    }

    fn open_positions(&mut self) -> Result<(), EngineError> {
        for (i, agent) in self.scenario.agents.iter().enumerate() {
            let id = account_id(agent.kind, i);
            if agent.kind == AgentKind::Borrower && agent.collateral > FixedDec::ZERO {
                self.apply(0, Action::AddCollateral { account: id.clone(), amount: agent.collateral })?;
            }
            if agent.initial > FixedDec::ZERO {
                let action = match agent.kind {
                    AgentKind::Supplier => Action::Mint { account: id, amount: agent.initial },
                    AgentKind::Borrower => Action::Borrow { account: id, amount: agent.initial },
                };
                self.apply(0, action)?;
            }
        }
        Ok(())
    }

    fn act(&mut self, block: u64, observed_borrow: f64, observed_supply: f64) -> Result<(), EngineError> {
        for (i, agent) in self.scenario.agents.iter().enumerate() {
            let id = account_id(agent.kind, i);
            let target = agent.target_rate.to_f64();
            match agent.kind {
                AgentKind::Borrower => {
                    let step = self.step_for(agent, (target - observed_borrow) / target);
                    let debt = self.market.debt_of(&id)?;
                    if step > 0.0 {
                        let headroom = self
                            .market
                            .collateral_value(&id)?
                            .checked_div(self.market.liquidation.liquidation_threshold)?
                            .saturating_sub_zero(debt);
                        let amount = FixedDec::from_f64(step)?
                            .min(agent.size.saturating_sub_zero(debt))
                            .min(self.market.cash())
                            .min(headroom);
                        if amount > FixedDec::ZERO {
                            self.apply(block, Action::Borrow { account: id, amount })?;
                        }
                    } else if step < 0.0 {
                        let amount = FixedDec::from_f64(-step)?.min(debt);
                        if amount > FixedDec::ZERO {
                            self.apply(block, Action::Repay { account: id, amount })?;
                        }
                    }
                }
                AgentKind::Supplier => {
                    let step = self.step_for(agent, (observed_supply - target) / target);
                    let value = self.market.supplied_value(&id)?;
                    if step > 0.0 {
                        let amount = FixedDec::from_f64(step)?.min(agent.size.saturating_sub_zero(value));
                        if amount > FixedDec::ZERO {
                            self.apply(block, Action::Mint { account: id, amount })?;
                        }
                    } else if step < 0.0 {
                        let wanted = FixedDec::from_f64(-step)?.min(value);
                        let cash = self.market.cash();
                        if wanted > cash {
                            self.constrained_withdrawals += 1;
                        }
                        let rate = self.market.exchange_rate()?;
                        let held = self.market.accounts.get(&id).map(|p| p.supplied_shares).unwrap_or_default();
                        let shares = wanted.min(cash).checked_div(rate)?.min(held);
                        if shares > FixedDec::ZERO {
                            self.apply(block, Action::Redeem { account: id, shares })?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn liquidate_unhealthy(&mut self, block: u64) -> Result<(), EngineError> {
        for (i, agent) in self.scenario.agents.iter().enumerate() {
            if agent.kind != AgentKind::Borrower {
                continue;
            }
            let id = account_id(agent.kind, i);
            if !self.market.is_liquidatable(&id)? {
                continue;
            }
            let repay = self.market.liquidation.close_factor.checked_mul(self.market.debt_of(&id)?)?;
            if repay > FixedDec::ZERO {
                self.apply(
                    block,
                    Action::Liquidate { liquidator: LIQUIDATOR.into(), borrower: id, amount: repay },
                )?;
                self.liquidations += 1;
            }
        }
        Ok(())
    }
}

fn account_id(kind: AgentKind, index: usize) -> String {
    match kind {
        AgentKind::Supplier => format!("s{index}"),
        AgentKind::Borrower => format!("b{index}"),
    }
}

/// Run a scenario to its horizon.
pub fn run(scenario: &Scenario) -> Result<SimOutput, SimError> {
    scenario.validate()?;
    let bpy = scenario.blocks_per_year as i128;
    let first = &scenario.model_schedule[0];
    let market = MarketState::new(
        first.model.clone(),
        scenario.reserve_factor,
        scenario.ceiling_policy,
        scenario.liquidation,
    )?;
    let mut r = Runner {
        scenario,
        market,
        events: Vec::new(),
        rng: Xoshiro256PlusPlus::seed_from_u64(scenario.rng_seed),
        liquidations: 0,
        constrained_withdrawals: 0,
    };
    let mut snapshots = Vec::with_capacity(scenario.horizon_blocks as usize);
    let mut schedule = scenario.model_schedule.iter().peekable();
    let mut prices = scenario.price_path.iter().peekable();
    let mut observed = (0.0, 0.0);

    for block in 0..scenario.horizon_blocks {
        while let Some(s) = schedule.next_if(|s| s.block <= block) {
            r.apply(block, Action::SetModel { model: s.model.clone() })?;
        }
        while let Some(p) = prices.next_if(|p| p.block <= block) {
            r.apply(block, Action::SetPrice { price: p.price })?;
        }
        r.market.accrue(block)?;
        if block == 0 {
            r.open_positions()?;
            observed = annual_rates(&r.market, bpy)?;
        }
        r.act(block, observed.0, observed.1)?;
        r.liquidate_unhealthy(block)?;
        r.market.accrue(block)?;
        if cfg!(debug_assertions) {
            r.market
                .check_invariants()
                .map_err(|msg| SimError::Invariant { block, msg })?;
        }
        snapshots.push(r.market.snapshot()?);
        observed = annual_rates(&r.market, bpy)?;
    }

    let summary = summarize(&snapshots, bpy, &r)?;
    Ok(SimOutput { snapshots, events: r.events, summary })
}

/// Run independent scenarios in parallel; results keep input order.
pub fn run_batch(scenarios: &[Scenario]) -> Vec<Result<SimOutput, SimError>> {
    scenarios.par_iter().map(run).collect()
}

fn annual_rates(m: &MarketState, bpy: i128) -> Result<(f64, f64), EngineError> {
    Ok((
        m.borrow_rate()?.mul_int(bpy)?.to_f64(),
        m.supply_rate()?.mul_int(bpy)?.to_f64(),
    ))
}

fn summarize(snaps: &[Snapshot], bpy: i128, r: &Runner<'_>) -> Result<SimSummary, SimError> {
    let us: Vec<f64> = snaps.iter().map(|s| s.utilization.to_f64()).collect();
    let n = us.len().max(1) as f64;
    let frac = |f: &dyn Fn(f64) -> bool| us.iter().filter(|&&u| f(u)).count() as f64 / n;
    let mean = us.iter().sum::<f64>() / n;
    let var = us.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / n;
    let mut rate_sum = 0.0;
    for s in snaps {
        rate_sum += s.borrow_rate.mul_int(bpy).map_err(EngineError::from)?.to_f64();
    }
    Ok(SimSummary {
        blocks: snaps.len() as u64,
        mean_utilization: mean,
        median_utilization: if us.is_empty() { 0.0 } else { crate::analytics::median_locked(&us) },
        modal_utilization: modal_bin_center(&us, UTILIZATION_BIN),
        utilization_sd: var.sqrt(),
        frac_mid_band: frac(&|u| (0.8..0.9).contains(&u)),
        frac_high_band: frac(&|u| (0.9..1.0).contains(&u)),
        frac_illiquid: frac(&|u| u >= 1.0),
        frac_above_095: frac(&|u| u > 0.95),
        mean_borrow_rate_annual: rate_sum / n,
        liquidations: r.liquidations,
        constrained_withdrawals: r.constrained_withdrawals,
        final_exchange_rate: r.market.exchange_rate()?.to_f64(),
    })
}

/// Counts per bin `[k w, (k + 1) w)` for `k = 0..`, covering the largest value.
pub fn utilization_histogram(us: &[f64], bin_width: f64) -> Vec<(f64, usize)> {
    let max = us.iter().cloned().fold(0.0_f64, f64::max);
    let bins = (max / bin_width).floor() as usize + 1;
    let mut counts = vec![0usize; bins];
    for &u in us {
        let k = ((u.max(0.0)) / bin_width).floor() as usize;
        counts[k.min(bins - 1)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| ((k as f64 + 0.5) * bin_width, c))
        .collect()
}

/// Center of the fullest histogram bin; ties go to the lower bin.
pub fn modal_bin_center(us: &[f64], bin_width: f64) -> f64 {
    let hist = utilization_histogram(us, bin_width);
    let mut best = (0.0, 0usize);
    for (center, count) in hist {
        if count > best.1 {
            best = (center, count);
        }
    }
    best.0
}

/// Fraction of observations within `[lo, hi]`.
pub fn mass_within(us: &[f64], lo: f64, hi: f64) -> f64 {
    if us.is_empty() {
        return 0.0;
    }
    us.iter().filter(|&&u| u >= lo && u <= hi).count() as f64 / us.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub label: String,
    pub kink: Option<f64>,
    pub mean_distance_from_one: f64,
    pub frac_above_095: f64,
    pub mean_borrow_rate_annual: f64,
    pub modal_utilization: f64,
    pub utilization_sd: f64,
    pub liquidations: u64,
}

impl ExperimentRow {
    fn from_output(label: String, kink: Option<f64>, out: &SimOutput) -> Self {
        let us = out.utilization();
        let n = us.len().max(1) as f64;
        ExperimentRow {
            label,
            kink,
            mean_distance_from_one: us.iter().map(|u| (1.0 - u).abs()).sum::<f64>() / n,
            frac_above_095: out.summary.frac_above_095,
            mean_borrow_rate_annual: out.summary.mean_borrow_rate_annual,
            modal_utilization: out.summary.modal_utilization,
            utilization_sd: out.summary.utilization_sd,
            liquidations: out.summary.liquidations,
        }
    }
}

fn kinks_in(s: &Scenario) -> Option<FixedDec> {
    s.model_schedule.iter().find_map(|m| match m.model {
        RateModel::Kinked { u_star, .. } => Some(u_star),
        _ => None,
    })
}

/// Re-run `base` with the kink of every kinked schedule entry moved to each
/// candidate in turn.
pub fn kink_placement_experiment(
    base: &Scenario,
    kink_points: &[FixedDec],
) -> Result<Vec<ExperimentRow>, SimError> {
    if kinks_in(base).is_none() {
        return Err(SimError::InvalidScenario("base scenario has no kinked model".into()));
    }
    let variants: Vec<Scenario> = kink_points
        .iter()
        .map(|&k| {
            let mut s = base.clone();
            for entry in &mut s.model_schedule {
                if let Some(m) = entry.model.with_kink(k) {
                    entry.model = m;
                }
            }
            s
        })
        .collect();
    let outputs = run_batch(&variants);
    kink_points
        .iter()
        .zip(outputs)
        .map(|(k, out)| Ok(ExperimentRow::from_output(format!("kink={k}"), Some(k.to_f64()), &out?)))
        .collect()
}

/// Compare `base` with the same scenario under `alt` in place of every
/// scheduled model. Rows: base first, then the alternative.
pub fn smooth_vs_kinked_experiment(
    base: &Scenario,
    alt: &RateModel,
) -> Result<Vec<ExperimentRow>, SimError> {
    alt.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
    let mut swapped = base.clone();
    for entry in &mut swapped.model_schedule {
        entry.model = alt.clone();
    }
    let outputs = run_batch(&[base.clone(), swapped]);
    let kink = kinks_in(base).map(|k| k.to_f64());
    let alt_kink = match alt {
        RateModel::Kinked { u_star, .. } => Some(u_star.to_f64()),
        _ => None,
    };
    let mut rows = Vec::with_capacity(2);
    let mut it = outputs.into_iter();
    let base_out = it.next().expect("two runs")?;
    let alt_out = it.next().expect("two runs")?;
    let base_label = base.model_schedule[0].model.name();
    rows.push(ExperimentRow::from_output(format!("base:{base_label}"), kink, &base_out));
    rows.push(ExperimentRow::from_output(format!("alt:{}", alt.name()), alt_kink, &alt_out));
    Ok(rows)
}

/// Collateral price crash: from `block` on, every price is scaled by
/// `1 - drop`.
pub fn shock(scenario: &Scenario, block: u64, drop: FixedDec) -> Result<Scenario, SimError> {
    if block >= scenario.horizon_blocks {
        return Err(SimError::BlockOutOfRange { block, horizon: scenario.horizon_blocks });
    }
    if drop.is_negative() || drop >= FixedDec::ONE {
        return Err(SimError::InvalidScenario(format!("price drop must lie in [0, 1), got {drop}")));
    }
    if drop.is_zero() {
        return Ok(scenario.clone());
    }
    let keep = FixedDec::ONE.checked_sub(drop).map_err(EngineError::from)?;
    let mut out = scenario.clone();
    let at_block = scenario.price_at(block);
    let mut path: Vec<PricePoint> = scenario.price_path.iter().filter(|p| p.block < block).copied().collect();
    if !scenario.price_path.iter().any(|p| p.block == block) {
        path.push(PricePoint { block, price: at_block.checked_mul(keep).map_err(EngineError::from)? });
    }
    for p in scenario.price_path.iter().filter(|p| p.block >= block) {
        path.push(PricePoint { block: p.block, price: p.price.checked_mul(keep).map_err(EngineError::from)? });
    }
    out.price_path = path;
    Ok(out)
}

/// Independent sub-seed for replication `i` of a batch rooted at `root`
/// (SplitMix64 finalizer over `root + (i + 1) * golden gamma`).
pub fn derive_seed(root: u64, i: u64) -> u64 {
    let mut z = root.wrapping_add((i + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
