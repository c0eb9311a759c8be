//! Borrow and saving rates as functions of utilization.
//!
//! Three families cover the protocols studied: linear (Compound v1 style),
//! non-linear polynomial (dYdX), and kinked (Compound jump-rate / Aave
//! variable). All rates are per block; use [`annualize`] for reporting.
//! The Aave stable-rate machinery (market rate, stable rate, rebalancing)
//! lives alongside.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed_point::{mantissa_str, FixedDec, FixedError};

/// 15-second blocks.
pub const DEFAULT_BLOCKS_PER_YEAR: i128 = 2_102_400;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RateError {
    #[error("market has loans but no deposits")]
    IllFormedMarket,
    #[error("saving rate is not defined for the {0} model")]
    NotDefinedForModel(&'static str),
    #[error("no borrowed funds to weight by")]
    EmptyMarket,
    #[error("invalid rate-model parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Arithmetic(#[from] FixedError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum RateModel {
    Linear {
        #[serde(with = "mantissa_str")]
        alpha: FixedDec,
        #[serde(with = "mantissa_str")]
        beta: FixedDec,
    },
    #[serde(rename = "nonlinear")]
    NonLinear {
        #[serde(with = "mantissa_str")]
        alpha: FixedDec,
        #[serde(with = "mantissa_str")]
        beta: FixedDec,
        #[serde(with = "mantissa_str")]
        gamma: FixedDec,
        #[serde(with = "mantissa_str", default)]
        lambda: FixedDec,
    },
    Kinked {
        #[serde(with = "mantissa_str")]
        alpha: FixedDec,
        #[serde(with = "mantissa_str")]
        beta: FixedDec,
        #[serde(with = "mantissa_str")]
        gamma: FixedDec,
        #[serde(with = "mantissa_str")]
        u_star: FixedDec,
        #[serde(with = "mantissa_str", default)]
        lambda: FixedDec,
    },
    #[serde(rename = "aave")]
    AaveVariable {
        #[serde(with = "mantissa_str")]
        base: FixedDec,
        #[serde(with = "mantissa_str")]
        u_optimal: FixedDec,
        #[serde(with = "mantissa_str")]
        r_slope1: FixedDec,
        #[serde(with = "mantissa_str")]
        r_slope2: FixedDec,
    },
}

/// The two-slope shape shared by Aave's variable and stable rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AaveSlopes {
    pub u_optimal: FixedDec,
    pub r_slope1: FixedDec,
    pub r_slope2: FixedDec,
}

impl RateModel {
    pub fn name(&self) -> &'static str {
        match self {
            RateModel::Linear { .. } => "linear",
            RateModel::NonLinear { .. } => "nonlinear",
            RateModel::Kinked { .. } => "kinked",
            RateModel::AaveVariable { .. } => "aave",
        }
    }

    pub fn validate(&self) -> Result<(), RateError> {
        let non_negative = |name: &str, v: FixedDec| {
            if v.is_negative() {
                Err(RateError::InvalidParameter(format!("{name} must be >= 0, got {v}")))
            } else {
                Ok(())
            }
        };
        let unit_open_closed = |name: &str, v: FixedDec| {
            if v <= FixedDec::ZERO || v > FixedDec::ONE {
                Err(RateError::InvalidParameter(format!("{name} must lie in (0, 1], got {v}")))
            } else {
                Ok(())
            }
        };
        let fraction = |v: FixedDec| {
            if v.is_negative() || v > FixedDec::ONE {
                Err(RateError::InvalidParameter(format!("lambda must lie in [0, 1], got {v}")))
            } else {
                Ok(())
            }
        };
        match *self {
            RateModel::Linear { alpha, beta } => {
                non_negative("alpha", alpha)?;
                non_negative("beta", beta)
            }
            RateModel::NonLinear { alpha, beta, gamma, lambda } => {
                non_negative("alpha", alpha)?;
                non_negative("beta", beta)?;
                non_negative("gamma", gamma)?;
                fraction(lambda)
            }
            RateModel::Kinked { alpha, beta, gamma, u_star, lambda } => {
                non_negative("alpha", alpha)?;
                non_negative("beta", beta)?;
                non_negative("gamma", gamma)?;
                unit_open_closed("u_star", u_star)?;
                fraction(lambda)
            }
            RateModel::AaveVariable { base, u_optimal, r_slope1, r_slope2 } => {
                non_negative("base", base)?;
                non_negative("r_slope1", r_slope1)?;
                non_negative("r_slope2", r_slope2)?;
                unit_open_closed("u_optimal", u_optimal)
            }
        }
    }

    pub fn aave_slopes(&self) -> Option<AaveSlopes> {
        match *self {
            RateModel::AaveVariable { u_optimal, r_slope1, r_slope2, .. } => Some(AaveSlopes {
                u_optimal,
                r_slope1,
                r_slope2,
            }),
            _ => None,
        }
    }

    /// Reserve factor carried by the model, if the family has one.
    pub fn reserve_factor(&self) -> Option<FixedDec> {
        match *self {
            RateModel::NonLinear { lambda, .. } | RateModel::Kinked { lambda, .. } => Some(lambda),
            _ => None,
        }
    }

    /// Same model with the kink moved; `None` for non-kinked families.
    pub fn with_kink(&self, kink: FixedDec) -> Option<RateModel> {
        match *self {
            RateModel::Kinked { alpha, beta, gamma, lambda, .. } => Some(RateModel::Kinked {
                alpha,
                beta,
                gamma,
                u_star: kink,
                lambda,
            }),
            _ => None,
        }
    }

    /// Default dYdX-shaped polynomial: 10% / 30% / 10% annualized weights on
    /// U, U^32, U^64, so the rate at full utilization is the 50% ceiling.
    /// dYdX's production coefficients are not public in this form; this is a
    /// stand-in. `gamma` absorbs the per-block rounding so that
    /// `alpha + beta + gamma == floor(0.5 / blocks_per_year)` exactly.
    pub fn default_nonlinear(lambda: FixedDec) -> RateModel {
        RateModel::nonlinear_with_ceiling(
            FixedDec::from_mantissa(5 * SCALE_TENTH),
            DEFAULT_BLOCKS_PER_YEAR,
            lambda,
        )
        .expect("constant parameters are in range")
    }

    /// Polynomial model whose annualized rate at U = 1 is `ceiling`, split
    /// 20% / 60% / 20% across the U, U^32 and U^64 terms.
    pub fn nonlinear_with_ceiling(
        ceiling: FixedDec,
        blocks_per_year: i128,
        lambda: FixedDec,
    ) -> Result<RateModel, RateError> {
        let total = ceiling.div_int(blocks_per_year)?;
        let alpha = ceiling.div_int(5)?.div_int(blocks_per_year)?;
        let beta = ceiling.mul_int(3)?.div_int(5)?.div_int(blocks_per_year)?;
        let gamma = total.checked_sub(alpha)?.checked_sub(beta)?;
        let model = RateModel::NonLinear { alpha, beta, gamma, lambda };
        model.validate()?;
        Ok(model)
    }
}

const SCALE_TENTH: i128 = crate::fixed_point::SCALE / 10;

/// U = L / A. Zero when the market is empty; may exceed one.
pub fn utilization(total_loans: FixedDec, gross_deposits: FixedDec) -> Result<FixedDec, RateError> {
    if gross_deposits.is_zero() {
        return if total_loans.is_zero() {
            Ok(FixedDec::ZERO)
        } else {
            Err(RateError::IllFormedMarket)
        };
    }
    Ok(total_loans.checked_div(gross_deposits)?)
}

fn two_slope(base: FixedDec, slopes: &AaveSlopes, u: FixedDec) -> Result<FixedDec, RateError> {
    let AaveSlopes { u_optimal, r_slope1, r_slope2 } = *slopes;
    if u < u_optimal {
        return Ok(base.checked_add(u.checked_div(u_optimal)?.checked_mul(r_slope1)?)?);
    }
    let at_kink = base.checked_add(r_slope1)?;
    if u_optimal == FixedDec::ONE {
        // (1 - U_opt) vanishes: the upper segment degenerates to its left end.
        return Ok(at_kink);
    }
    let excess = u.checked_sub(u_optimal)?.checked_div(FixedDec::ONE.checked_sub(u_optimal)?)?;
    Ok(at_kink.checked_add(excess.checked_mul(r_slope2)?)?)
}

/// Per-block borrow rate at utilization `u`.
pub fn borrow_rate(model: &RateModel, u: FixedDec) -> Result<FixedDec, RateError> {
    if u.is_negative() {
        return Err(RateError::InvalidParameter(format!("utilization must be >= 0, got {u}")));
    }
    let rate = match *model {
        RateModel::Linear { alpha, beta } => alpha.checked_add(beta.checked_mul(u)?)?,
        RateModel::NonLinear { alpha, beta, gamma, .. } => {
            let u32 = u.pow_u(32)?;
            let u64 = u32.checked_mul(u32)?;
            alpha.checked_mul(u)?.checked_add(beta.checked_mul(u32)?)?.checked_add(gamma.checked_mul(u64)?)?
        }
        RateModel::Kinked { alpha, beta, gamma, u_star, .. } => {
            if u <= u_star {
                alpha.checked_add(beta.checked_mul(u)?)?
            } else {
                let excess = u.checked_sub(u_star)?;
                alpha.checked_add(FixedDec::mul_sum(&[(beta, u_star), (gamma, excess)])?)?
            }
        }
        RateModel::AaveVariable { base, .. } => {
            two_slope(base, &model.aave_slopes().expect("aave model"), u)?
        }
    };
    Ok(rate)
}

/// Per-block saving (supply) rate at utilization `u`.
pub fn saving_rate(model: &RateModel, u: FixedDec) -> Result<FixedDec, RateError> {
    let ib = borrow_rate(model, u)?;
    match *model {
        RateModel::Linear { .. } => Ok(ib.checked_mul(u)?),
        RateModel::NonLinear { lambda, .. } => {
            Ok(FixedDec::ONE.checked_sub(lambda)?.checked_mul(ib)?.checked_mul(u)?)
        }
        RateModel::Kinked { lambda, .. } => Ok(u.checked_mul(ib.checked_mul(FixedDec::ONE.checked_sub(lambda)?)?)?),
        RateModel::AaveVariable { .. } => Err(RateError::NotDefinedForModel("aave")),
    }
}

pub fn annualize(rate: FixedDec, blocks_per_year: i128) -> Result<FixedDec, FixedError> {
    rate.mul_int(blocks_per_year)
}

/// Inverse of [`annualize`], floored.
pub fn per_block(annual_rate: FixedDec, blocks_per_year: i128) -> Result<FixedDec, FixedError> {
    annual_rate.div_int(blocks_per_year)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformBorrow {
    pub borrow_rate: FixedDec,
    pub borrowed: FixedDec,
}

/// Borrow-side state seen by the stable-rate machinery: every platform's
/// rate and volume for one market, plus this platform's variable/stable split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformBorrowState {
    pub platforms: Vec<PlatformBorrow>,
    pub variable_borrowed: FixedDec,
    pub variable_rate: FixedDec,
    pub stable_borrowed: FixedDec,
    pub stable_rate: FixedDec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StablePosition {
    pub user_rate: FixedDec,
    pub window_blocks: u64,
    /// Relative change of the stable rate tolerated over the window.
    pub delta: FixedDec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RebalanceDecision {
    Up,
    Down,
    None,
}

/// Borrow-weighted mean rate across platforms.
pub fn market_rate(platforms: &[PlatformBorrow]) -> Result<FixedDec, RateError> {
    let mut weighted = FixedDec::ZERO;
    let mut total = FixedDec::ZERO;
    for p in platforms {
        if p.borrowed.is_negative() || p.borrow_rate.is_negative() {
            return Err(RateError::InvalidParameter("negative platform borrow state".into()));
        }
        weighted = weighted.checked_add(p.borrow_rate.checked_mul(p.borrowed)?)?;
        total = total.checked_add(p.borrowed)?;
    }
    if total.is_zero() {
        return Err(RateError::EmptyMarket);
    }
    Ok(weighted.checked_div(total)?)
}

/// Stable borrow rate: Aave's two-slope curve on top of the market rate.
pub fn stable_rate(market_rate: FixedDec, slopes: &AaveSlopes, u: FixedDec) -> Result<FixedDec, RateError> {
    if u.is_negative() {
        return Err(RateError::InvalidParameter(format!("utilization must be >= 0, got {u}")));
    }
    two_slope(market_rate, slopes, u)
}

/// Whether a stable-rate position must be moved. Uses the books as they
/// stand before the current block accrues.
pub fn rebalance_check(
    pos: &StablePosition,
    mkt: &PlatformBorrowState,
    latest_stable: FixedDec,
) -> Result<RebalanceDecision, RateError> {
    let total = mkt.variable_borrowed.checked_add(mkt.stable_borrowed)?;
    if total.is_zero() {
        return Err(RateError::EmptyMarket);
    }
    let overall = mkt
        .variable_borrowed
        .checked_mul(mkt.variable_rate)?
        .checked_add(mkt.stable_borrowed.checked_mul(mkt.stable_rate)?)?
        .checked_div(total)?;
    if pos.user_rate < overall {
        return Ok(RebalanceDecision::Up);
    }
    let ceiling = latest_stable.checked_mul(FixedDec::ONE.checked_add(pos.delta)?)?;
    if pos.user_rate > ceiling {
        return Ok(RebalanceDecision::Down);
    }
    Ok(RebalanceDecision::None)
}

/// Parameter file: a model plus the block it takes effect from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub model: RateModel,
    #[serde(default)]
    pub effective_from_block: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSchedule {
    pub market: String,
    pub entries: Vec<ModelSpec>,
}

impl ModelSchedule {
    pub fn validate(&self) -> Result<(), RateError> {
        for w in self.entries.windows(2) {
            if w[1].effective_from_block <= w[0].effective_from_block {
                return Err(RateError::InvalidParameter(
                    "schedule blocks must be strictly increasing".into(),
                ));
            }
        }
        self.entries.iter().try_for_each(|e| e.model.validate())
    }

    pub fn by_date(&self, date: &str) -> Option<&ModelSpec> {
        self.entries.iter().find(|e| e.date.as_deref() == Some(date))
    }
}

const CDAI_SCHEDULE_JSON: &str = include_str!("../data/cdai_schedule.json");

/// Compound cDAI parameter history, 17 Dec 2019 to 27 Apr 2020.
pub fn cdai_schedule() -> ModelSchedule {
    serde_json::from_str(CDAI_SCHEDULE_JSON).expect("bundled schedule parses")
}

pub fn cdai_schedule_json() -> &'static str {
    CDAI_SCHEDULE_JSON
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> FixedDec {
        s.parse().unwrap()
    }

    fn m(x: i128) -> FixedDec {
        FixedDec::from_mantissa(x)
    }

    fn kinked_apr6() -> RateModel {
        RateModel::Kinked {
            alpha: FixedDec::ZERO,
            beta: m(2_900_146_648),
            gamma: m(570_776_255_707),
            u_star: d("0.9"),
            lambda: d("0.1"),
        }
    }

    #[test]
    fn utilization_examples() {
        assert_eq!(utilization(d("50"), d("100")).unwrap(), d("0.5"));
        assert_eq!(utilization(d("0"), d("7")).unwrap(), FixedDec::ZERO);
        assert_eq!(utilization(d("105"), d("100")).unwrap(), d("1.05"));
        assert_eq!(utilization(d("0"), d("0")).unwrap(), FixedDec::ZERO);
        assert_eq!(utilization(d("1"), d("0")), Err(RateError::IllFormedMarket));
    }

    #[test]
    fn kinked_examples() {
        let k = kinked_apr6();
        assert_eq!(borrow_rate(&k, FixedDec::ZERO).unwrap(), FixedDec::ZERO);
        assert_eq!(borrow_rate(&k, d("0.9")).unwrap(), m(2_610_131_983));
        // just past the kink the jump multiplier applies
        let above = borrow_rate(&k, d("0.91")).unwrap();
        assert_eq!(above, m(2_610_131_983 + 5_707_762_557));
    }

    #[test]
    fn linear_example() {
        let l = RateModel::Linear { alpha: d("0.01"), beta: d("0.2") };
        assert_eq!(borrow_rate(&l, d("0.5")).unwrap(), d("0.11"));
        assert_eq!(saving_rate(&l, d("0.5")).unwrap(), d("0.055"));
    }

    #[test]
    fn nonlinear_examples() {
        let n = RateModel::NonLinear { alpha: d("0.1"), beta: d("0.3"), gamma: d("0.1"), lambda: d("0.1") };
        assert_eq!(borrow_rate(&n, FixedDec::ONE).unwrap(), d("0.5"));
        assert_eq!(saving_rate(&n, FixedDec::ONE).unwrap(), d("0.45"));
        assert_eq!(saving_rate(&n, FixedDec::ZERO).unwrap(), FixedDec::ZERO);
    }

    #[test]
    fn saving_rate_edges() {
        let mut k = kinked_apr6();
        assert_eq!(saving_rate(&k, FixedDec::ZERO).unwrap(), FixedDec::ZERO);
        if let RateModel::Kinked { lambda, .. } = &mut k {
            *lambda = FixedDec::ONE;
        }
        assert_eq!(saving_rate(&k, d("0.95")).unwrap(), FixedDec::ZERO);
        let aave = RateModel::AaveVariable { base: d("0.01"), u_optimal: d("0.8"), r_slope1: d("0.04"), r_slope2: d("0.75") };
        assert_eq!(saving_rate(&aave, d("0.5")), Err(RateError::NotDefinedForModel("aave")));
    }

    #[test]
    fn aave_variable_branches() {
        let aave = RateModel::AaveVariable { base: d("0.01"), u_optimal: d("0.8"), r_slope1: d("0.04"), r_slope2: d("0.75") };
        assert_eq!(borrow_rate(&aave, d("0.4")).unwrap(), d("0.03"));
        assert_eq!(borrow_rate(&aave, d("0.8")).unwrap(), d("0.05"));
        assert_eq!(borrow_rate(&aave, d("0.9")).unwrap(), d("0.425"));
        let full = RateModel::AaveVariable { base: d("0.01"), u_optimal: FixedDec::ONE, r_slope1: d("0.04"), r_slope2: d("0.75") };
        assert_eq!(borrow_rate(&full, d("0.5")).unwrap(), d("0.03"));
        assert_eq!(borrow_rate(&full, FixedDec::ONE).unwrap(), d("0.05"));
        assert_eq!(borrow_rate(&full, d("1.2")).unwrap(), d("0.05"));
    }

    #[test]
    fn market_rate_examples() {
        let p = |r: &str, b: &str| PlatformBorrow { borrow_rate: d(r), borrowed: d(b) };
        assert_eq!(market_rate(&[p("0.02", "5"), p("0.04", "5")]).unwrap(), d("0.03"));
        assert_eq!(market_rate(&[p("0.07", "3")]).unwrap(), d("0.07"));
        assert_eq!(market_rate(&[p("0.10", "1"), p("0.02", "9")]).unwrap(), d("0.028"));
        assert_eq!(market_rate(&[p("0.10", "0")]), Err(RateError::EmptyMarket));
        assert_eq!(market_rate(&[]), Err(RateError::EmptyMarket));
    }

    #[test]
    fn stable_rate_examples() {
        let slopes = AaveSlopes { u_optimal: d("0.9"), r_slope1: d("0.02"), r_slope2: d("0.5") };
        assert_eq!(stable_rate(d("0.03"), &slopes, d("0.9")).unwrap(), d("0.05"));
        assert_eq!(stable_rate(d("0.03"), &slopes, FixedDec::ZERO).unwrap(), d("0.03"));
        assert_eq!(stable_rate(d("0.03"), &slopes, d("0.95")).unwrap(), d("0.3"));
    }

    fn book(avg: &str) -> PlatformBorrowState {
        PlatformBorrowState {
            platforms: vec![],
            variable_borrowed: d("10"),
            variable_rate: d(avg),
            stable_borrowed: d("10"),
            stable_rate: d(avg),
        }
    }

    #[test]
    fn rebalance_examples() {
        let pos = |r: &str, delta: &str| StablePosition { user_rate: d(r), window_blocks: 5760, delta: d(delta) };
        assert_eq!(rebalance_check(&pos("0.05", "0.1"), &book("0.06"), d("0.06")).unwrap(), RebalanceDecision::Up);
        assert_eq!(rebalance_check(&pos("0.06", "0.1"), &book("0.06"), d("0.06")).unwrap(), RebalanceDecision::None);
        assert_eq!(rebalance_check(&pos("0.12", "0.1"), &book("0.12"), d("0.10")).unwrap(), RebalanceDecision::Down);
        let mut empty = book("0.1");
        empty.variable_borrowed = FixedDec::ZERO;
        empty.stable_borrowed = FixedDec::ZERO;
        assert_eq!(rebalance_check(&pos("0.1", "0.1"), &empty, d("0.1")), Err(RateError::EmptyMarket));
    }

    #[test]
    fn up_takes_priority_over_down() {
        // user below the book average but above the latest stable band
        let pos = StablePosition { user_rate: d("0.10"), window_blocks: 1, delta: FixedDec::ZERO };
        assert_eq!(rebalance_check(&pos, &book("0.2"), d("0.05")).unwrap(), RebalanceDecision::Up);
    }

    #[test]
    fn default_nonlinear_ceiling() {
        let model = RateModel::default_nonlinear(d("0.1"));
        let per_block_ceiling = borrow_rate(&model, FixedDec::ONE).unwrap();
        assert_eq!(per_block_ceiling, m(237_823_439_878));
        let annual = annualize(per_block_ceiling, DEFAULT_BLOCKS_PER_YEAR).unwrap().to_f64();
        assert!((annual - 0.5).abs() < 1e-12, "{annual}");
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let bad = RateModel::Kinked { alpha: FixedDec::ZERO, beta: d("1"), gamma: d("1"), u_star: d("1.1"), lambda: FixedDec::ZERO };
        assert!(bad.validate().is_err());
        let bad = RateModel::NonLinear { alpha: d("0.1"), beta: d("0.1"), gamma: d("0.1"), lambda: d("1.5") };
        assert!(bad.validate().is_err());
        assert!(kinked_apr6().validate().is_ok());
    }

    #[test]
    fn negative_utilization_rejected() {
        assert!(borrow_rate(&kinked_apr6(), d("-0.1")).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let json = r#"{"model":"kinked","alpha":"0","beta":"2900146648","gamma":"570776255707","u_star":"9e17","effective_from_block":"0"}"#;
        assert!(serde_json::from_str::<ModelSpec>(json).is_err(), "block must be a number");
        let json = r#"{"model":"kinked","alpha":"0","beta":"2900146648","gamma":"570776255707","u_star":"9e17","effective_from_block":12}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.effective_from_block, 12);
        assert_eq!(spec.model.with_kink(d("0.9")).unwrap(), RateModel::Kinked {
            alpha: FixedDec::ZERO,
            beta: m(2_900_146_648),
            gamma: m(570_776_255_707),
            u_star: d("0.9"),
            lambda: FixedDec::ZERO,
        });
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn bundled_schedule_has_ten_rows() {
        let s = cdai_schedule();
        s.validate().unwrap();
        assert_eq!(s.entries.len(), 10);
        let apr27 = s.by_date("2020-04-27").unwrap();
        match apr27.model {
            RateModel::Kinked { alpha, beta, gamma, u_star, .. } => {
                assert_eq!(alpha, FixedDec::ZERO);
                assert_eq!(beta, m(10_569_930_661));
                assert_eq!(gamma, m(570_776_255_707));
                assert_eq!(u_star, d("0.9"));
            }
            _ => panic!("cDAI is kinked"),
        }
    }
}
