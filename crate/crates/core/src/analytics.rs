//! Liquidity and concentration metrics: utilization bands, available
//! liquidity, median locked value, cumulative fund-concentration curves.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("all balances are zero")]
    AllZero,
    #[error("balances must be finite and non-negative")]
    NegativeBalance,
    #[error("no observations")]
    Empty,
    #[error("thresholds must be strictly increasing")]
    BadThresholds,
}

/// Supply-side view of one market over time.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LiquiditySeries {
    pub total_supply: Vec<f64>,
    pub total_borrows: Vec<f64>,
}

impl LiquiditySeries {
    pub fn new(total_supply: Vec<f64>, total_borrows: Vec<f64>) -> Self {
        assert_eq!(total_supply.len(), total_borrows.len(), "aligned series");
        LiquiditySeries { total_supply, total_borrows }
    }

    pub fn len(&self) -> usize {
        self.total_supply.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total_supply.is_empty()
    }

    /// `A - L` per period.
    pub fn available(&self) -> Vec<f64> {
        self.total_supply
            .iter()
            .zip(&self.total_borrows)
            .map(|(a, l)| a - l)
            .collect()
    }

    /// `L / A` per period; 0 for an empty market, +inf for loans without deposits.
    pub fn utilization(&self) -> Vec<f64> {
        self.total_supply
            .iter()
            .zip(&self.total_borrows)
            .map(|(&a, &l)| {
                if a == 0.0 {
                    if l == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    l / a
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    /// `[t0, t1)`, 80%..90% by default.
    Mid,
    /// `[t1, t2)`, 90%..100%.
    High,
    /// `>= t2`, at or beyond full utilization.
    Illiquid,
}

impl BandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BandKind::Mid => "mid",
            BandKind::High => "high",
            BandKind::Illiquid => "illiquid",
        }
    }
}

/// A maximal run of periods in one band, `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub band: BandKind,
    pub start: usize,
    pub end: usize,
}

pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.8, 0.9, 1.0];

pub fn classify(u: f64, thresholds: &[f64; 3]) -> Option<BandKind> {
    if u >= thresholds[2] {
        Some(BandKind::Illiquid)
    } else if u >= thresholds[1] {
        Some(BandKind::High)
    } else if u >= thresholds[0] {
        Some(BandKind::Mid)
    } else {
        None
    }
}

/// Maximal contiguous intervals of the utilization path in each band.
pub fn illiquidity_bands(utilization: &[f64], thresholds: &[f64; 3]) -> Result<Vec<Band>, AnalyticsError> {
    if !(thresholds[0] < thresholds[1] && thresholds[1] < thresholds[2]) {
        return Err(AnalyticsError::BadThresholds);
    }
    let mut out: Vec<Band> = Vec::new();
    for (i, &u) in utilization.iter().enumerate() {
        let Some(kind) = classify(u, thresholds) else { continue };
        match out.last_mut() {
            Some(b) if b.band == kind && b.end == i => b.end = i + 1,
            _ => out.push(Band { band: kind, start: i, end: i + 1 }),
        }
    }
    Ok(out)
}

/// Sorted balances with their cumulative share curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    /// Balances, largest first.
    pub balances: Vec<f64>,
    /// `curve[k-1]` is the share held by the `k` largest accounts.
    pub curve: Vec<f64>,
}

impl Concentration {
    /// Share of the `k` largest holders; saturates at 1 for `k >= n`.
    pub fn top_k_share(&self, k: usize) -> f64 {
        match k {
            0 => 0.0,
            k if k >= self.curve.len() => 1.0,
            k => self.curve[k - 1],
        }
    }

    /// Smallest number of accounts holding at least `share` of the total.
    pub fn accounts_for_share(&self, share: f64) -> usize {
        self.curve.iter().position(|&c| c >= share).map_or(self.curve.len(), |i| i + 1)
    }
}

pub fn concentration(balances: &[f64]) -> Result<Concentration, AnalyticsError> {
    if balances.iter().any(|b| !b.is_finite() || *b < 0.0) {
        return Err(AnalyticsError::NegativeBalance);
    }
    let mut sorted = balances.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Err(AnalyticsError::AllZero);
    }
    let mut acc = 0.0;
    let curve = sorted
        .iter()
        .map(|b| {
            acc += b;
            acc / total
        })
        .collect();
    Ok(Concentration { balances: sorted, curve })
}

/// Median (mean of the middle pair for even length).
///
/// # Panics
/// On an empty slice; use [`try_median`] for a checked variant.
pub fn median_locked(values: &[f64]) -> f64 {
    try_median(values).expect("non-empty input")
}

pub fn try_median(values: &[f64]) -> Result<f64, AnalyticsError> {
    if values.is_empty() {
        return Err(AnalyticsError::Empty);
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}
