//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use plflab_core::analytics::{Band, BandKind};
use plflab_core::market_engine::{Action, Event};
use plflab_core::{CeilingPolicy, FixedDec, LiquidationParams, MarketState, RateModel};

pub const SCALE: i128 = 1_000_000_000_000_000_000;

pub fn rat(x: FixedDec) -> BigRational {
    BigRational::new(BigInt::from(x.mantissa()), BigInt::from(SCALE))
}

/// Exact value of `x` in mantissa units, as a rational.
pub fn in_units(x: &BigRational) -> BigRational {
    x * BigRational::from_integer(BigInt::from(SCALE))
}

/// Floor of an exact rational as a mantissa; `None` outside the i128 range.
pub fn floor_mantissa(x: &BigRational) -> Option<i128> {
    in_units(x).floor().to_integer().to_i128()
}

/// `|exact - computed|` in mantissa units.
pub fn unit_error(exact: &BigRational, computed: FixedDec) -> f64 {
    let diff = in_units(exact) - BigRational::from_integer(BigInt::from(computed.mantissa()));
    let d = if diff < BigRational::zero() { -diff } else { diff };
    d.to_f64().expect("finite")
}

/// Exact borrow rate of a kinked or linear model at `u`.
pub fn exact_borrow(model: &RateModel, u: FixedDec) -> BigRational {
    match *model {
        RateModel::Linear { alpha, beta } => rat(alpha) + rat(beta) * rat(u),
        RateModel::Kinked { alpha, beta, gamma, u_star, .. } => {
            if u <= u_star {
                rat(alpha) + rat(beta) * rat(u)
            } else {
                rat(alpha) + rat(beta) * rat(u_star) + rat(gamma) * (rat(u) - rat(u_star))
            }
        }
        RateModel::NonLinear { alpha, beta, gamma, .. } => {
            let u = rat(u);
            let u32 = num_traits::pow(u.clone(), 32);
            let u64 = num_traits::pow(u.clone(), 64);
            rat(alpha) * u + rat(beta) * u32 + rat(gamma) * u64
        }
        RateModel::AaveVariable { .. } => unimplemented!("not needed"),
    }
}

/// Straight scan: label every index, then cut wherever the label changes.
pub fn brute_bands(us: &[f64], t: &[f64; 3]) -> Vec<Band> {
    let label = |u: f64| -> Option<BandKind> {
        if u >= t[2] {
            Some(BandKind::Illiquid)
        } else if u >= t[1] {
            Some(BandKind::High)
        } else if u >= t[0] {
            Some(BandKind::Mid)
        } else {
            None
        }
    };
    let labels: Vec<Option<BandKind>> = us.iter().map(|&u| label(u)).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        let mut j = i;
        while j < labels.len() && labels[j] == labels[i] {
            j += 1;
        }
        if let Some(band) = labels[i] {
            out.push(Band { band, start: i, end: j });
        }
        i = j;
    }
    out
}

/// `top_k_share` by selecting the k largest with repeated max extraction.
pub fn brute_top_k(balances: &[f64], k: usize) -> f64 {
    let total: f64 = {
        let mut sorted = balances.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        sorted.iter().sum()
    };
    let mut left = balances.to_vec();
    let mut acc = 0.0;
    for _ in 0..k.min(balances.len()) {
        let (idx, _) = left
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        acc += left.swap_remove(idx);
    }
    if k >= balances.len() {
        1.0
    } else {
        acc / total
    }
}

/// One step of a random event script: the generator picks raw numbers, the
/// interpreter turns them into an action sized relative to the live state.
#[derive(Clone, Debug)]
pub struct Step {
    pub advance: u64,
    pub kind: u8,
    pub account: u8,
    pub frac: u32,
}

pub const ACCOUNTS: [&str; 4] = ["a", "b", "c", "d"];

fn frac_of(x: FixedDec, frac: u32) -> FixedDec {
    x.checked_mul(FixedDec::from_ratio(frac as i64, 1_000_000).unwrap()).unwrap()
}

pub fn market(policy: CeilingPolicy) -> MarketState {
    let model = RateModel::Kinked {
        alpha: FixedDec::from_mantissa(38_532_925_389),
        beta: FixedDec::from_mantissa(264_248_265),
        gamma: FixedDec::from_mantissa(570_776_255_707),
        u_star: "0.9".parse().unwrap(),
        lambda: "0.1".parse().unwrap(),
    };
    MarketState::new(model, "0.1".parse().unwrap(), policy, LiquidationParams::default()).unwrap()
}

/// Turn a step into an event against `m` (without applying it).
pub fn to_event(m: &MarketState, block: u64, s: &Step) -> Event {
    let acct = ACCOUNTS[s.account as usize % ACCOUNTS.len()].to_string();
    let other = ACCOUNTS[(s.account as usize + 1) % ACCOUNTS.len()].to_string();
    let pos = m.accounts.get(&acct).cloned().unwrap_or_default();
    let debt = m.debt_of(&acct).unwrap();
    let big = FixedDec::from_int(1000);
    let amount = |base: FixedDec| frac_of(base, s.frac).max(FixedDec::from_mantissa(1));
    let action = match s.kind % 8 {
        0 => Action::Mint { account: acct, amount: amount(big) },
        1 => Action::Redeem { account: acct, shares: amount(pos.supplied_shares) },
        2 => Action::AddCollateral { account: acct, amount: amount(FixedDec::from_int(20)) },
        3 => Action::Borrow { account: acct, amount: amount(m.cash()) },
        4 => Action::Repay { account: acct, amount: amount(debt) },
        5 => Action::Liquidate {
            liquidator: other,
            borrower: acct,
            amount: amount(debt.checked_mul("0.5".parse().unwrap()).unwrap()),
        },
        6 => Action::SetPrice { price: frac_of(FixedDec::from_int(200), s.frac) },
        _ => Action::SetModel { model: m.model.clone() },
    };
    Event { block, action }
}
