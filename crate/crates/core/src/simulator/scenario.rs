use serde::{Deserialize, Serialize};

use super::SimError;
use crate::fixed_point::FixedDec;
use crate::market_engine::{CeilingPolicy, LiquidationParams};
use crate::rate_models::{self, RateModel, DEFAULT_BLOCKS_PER_YEAR};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Supplier,
    Borrower,
}

/// A rate-responsive market participant.
///
/// Borrowers grow their debt while the observed annualized borrow rate is
/// below `target_rate` and shrink it otherwise; suppliers grow their deposit
/// while the annualized supply rate exceeds `target_rate`. The per-block step
/// is `responsiveness * size * gap` with `gap` the relative distance to the
/// target clipped to [-1, 1], plus `noise_scale * size` times a standard
/// normal draw truncated at three sigma. Positions stay within `[0, size]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub target_rate: FixedDec,
    pub size: FixedDec,
    pub responsiveness: FixedDec,
    pub noise_scale: FixedDec,
    /// Position taken at block 0 (deposit or debt, underlying units).
    #[serde(default)]
    pub initial: FixedDec,
    /// Collateral units posted at block 0; borrowers only.
    #[serde(default)]
    pub collateral: FixedDec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledModel {
    pub block: u64,
    pub model: RateModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PricePoint {
    pub block: u64,
    pub price: FixedDec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    /// Seeds a xoshiro256++ generator (via SplitMix64 expansion).
    pub rng_seed: u64,
    pub horizon_blocks: u64,
    #[serde(default = "default_blocks_per_year")]
    pub blocks_per_year: u64,
    pub ceiling_policy: CeilingPolicy,
    pub reserve_factor: FixedDec,
    #[serde(default)]
    pub liquidation: LiquidationParams,
    pub model_schedule: Vec<ScheduledModel>,
    #[serde(default)]
    pub price_path: Vec<PricePoint>,
    pub agents: Vec<AgentSpec>,
}

fn default_blocks_per_year() -> u64 {
    DEFAULT_BLOCKS_PER_YEAR as u64
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |m: String| Err(SimError::InvalidScenario(m));
        if self.schema_version != SCHEMA_VERSION {
            return invalid(format!("unsupported schema_version {}", self.schema_version));
        }
        if self.blocks_per_year == 0 {
            return invalid("blocks_per_year must be positive".into());
        }
        match self.model_schedule.first() {
            Some(first) if first.block == 0 => {}
            _ => return invalid("model_schedule must start at block 0".into()),
        }
        for w in self.model_schedule.windows(2) {
            if w[1].block == w[0].block {
                return Err(SimError::ScheduleConflict(w[1].block));
            }
            if w[1].block < w[0].block {
                return invalid("model_schedule blocks must be strictly increasing".into());
            }
        }
        for s in &self.model_schedule {
            s.model.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        }
        for w in self.price_path.windows(2) {
            if w[1].block <= w[0].block {
                return invalid("price_path blocks must be strictly increasing".into());
            }
        }
        if self.price_path.iter().any(|p| p.price.is_negative()) {
            return invalid("prices must be non-negative".into());
        }
        self.liquidation
            .validate()
            .map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        if self.reserve_factor.is_negative() || self.reserve_factor > FixedDec::ONE {
            return invalid("reserve_factor must lie in [0, 1]".into());
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.size <= FixedDec::ZERO {
                return invalid(format!("agent {i}: size must be positive"));
            }
            if a.responsiveness <= FixedDec::ZERO || a.responsiveness > FixedDec::ONE {
                return invalid(format!("agent {i}: responsiveness must lie in (0, 1]"));
            }
            if a.noise_scale.is_negative() || a.initial.is_negative() || a.initial > a.size {
                return invalid(format!("agent {i}: noise must be >= 0 and initial within [0, size]"));
            }
            if a.target_rate <= FixedDec::ZERO {
                return invalid(format!("agent {i}: target_rate must be positive"));
            }
            if a.collateral.is_negative() {
                return invalid(format!("agent {i}: collateral must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn price_at(&self, block: u64) -> FixedDec {
        self.price_path
            .iter()
            .take_while(|p| p.block <= block)
            .last()
            .map(|p| p.price)
            .unwrap_or(FixedDec::ONE)
    }

    /// Reference scenario for the kink-clustering experiment.
    ///
    /// cDAI parameters in force from 21 Feb 2020 (kink at 90%), 20 suppliers
    /// of 100 DAI each and 50 borrowers of 60 DAI each. Borrower reservation
    /// rates are spread evenly over 5%..13% annualized, straddling the ~8.2%
    /// rate at the kink; supplier required yields over 2%..8%. Every agent
    /// adjusts 2% of its size per block towards its target with 8% noise.
    /// Collateral is posted at 2.25x the borrower's size at the initial price
    /// of 100.
    pub fn kink_reference() -> Scenario {
        let d = |s: &str| s.parse::<FixedDec>().expect("constant");
        let model = rate_models::cdai_schedule()
            .by_date("2020-02-21")
            .expect("row present")
            .model
            .clone();
        let spread = |lo: f64, hi: f64, n: usize, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let fx = |x: f64| FixedDec::from_f64((x * 1e6).round() / 1e6).expect("finite");
        let mut agents = Vec::new();
        for i in 0..20 {
            agents.push(AgentSpec {
                kind: AgentKind::Supplier,
                target_rate: fx(spread(0.02, 0.08, 20, i)),
                size: d("100"),
                responsiveness: d("0.02"),
                noise_scale: d("0.08"),
                initial: d("100"),
                collateral: FixedDec::ZERO,
            });
        }
        for i in 0..50 {
            agents.push(AgentSpec {
                kind: AgentKind::Borrower,
                target_rate: fx(spread(0.05, 0.13, 50, i)),
                size: d("60"),
                responsiveness: d("0.02"),
                noise_scale: d("0.08"),
                initial: FixedDec::ZERO,
                collateral: d("1.35"),
            });
        }
        Scenario {
            schema_version: SCHEMA_VERSION,
            rng_seed: 20_200_221,
            horizon_blocks: 20_000,
            blocks_per_year: default_blocks_per_year(),
            ceiling_policy: CeilingPolicy::Uncapped,
            reserve_factor: d("0.1"),
            liquidation: LiquidationParams::default(),
            model_schedule: vec![ScheduledModel { block: 0, model }],
            price_path: vec![PricePoint { block: 0, price: d("100") }],
            agents,
        }
    }
}
