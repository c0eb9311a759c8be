use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{EconError, Result};

/// Aligned observations keyed by a strictly increasing period index.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    pub timestamps: Vec<i64>,
    pub values: Vec<f64>,
}

impl RateSeries {
    pub fn new(timestamps: Vec<i64>, values: Vec<f64>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(EconError::InvalidInput("timestamps and values differ in length".into()));
        }
        if timestamps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EconError::InvalidInput("timestamps must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EconError::InvalidInput("values must be finite".into()));
        }
        Ok(RateSeries { timestamps, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Restrict several series to their common timestamps.
    pub fn align(series: &[&RateSeries]) -> Vec<RateSeries> {
        let Some(first) = series.first() else { return Vec::new() };
        let common: Vec<i64> = first
            .timestamps
            .iter()
            .copied()
            .filter(|t| series[1..].iter().all(|s| s.timestamps.binary_search(t).is_ok()))
            .collect();
        series
            .iter()
            .map(|s| RateSeries {
                timestamps: common.clone(),
                values: common
                    .iter()
                    .map(|t| s.values[s.timestamps.binary_search(t).expect("common")])
                    .collect(),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Weekly,
}

impl Frequency {
    pub fn days(self) -> i64 {
        match self {
            Frequency::Daily => 1,
            Frequency::Weekly => 7,
        }
    }

    /// Fraction of a year covered by one period (365-day year).
    pub fn year_fraction(self) -> f64 {
        self.days() as f64 / 365.0
    }

    /// Period index of a calendar date; weeks start on Monday.
    pub fn period_of(self, date: NaiveDate) -> i64 {
        // 1970-01-05 was a Monday
        let monday = NaiveDate::from_ymd_opt(1970, 1, 5).expect("valid date");
        (date - monday).num_days().div_euclid(self.days())
    }
}

impl std::str::FromStr for Frequency {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "daily" => Ok(Frequency::Daily),
            "weekly" => Ok(Frequency::Weekly),
            other => Err(format!("unknown frequency {other:?} (expected daily or weekly)")),
        }
    }
}

/// How observations inside one period are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregation {
    /// Period mean, for rates.
    Mean,
    /// Period-end value, for prices and exchange rates.
    Last,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resampled {
    pub series: RateSeries,
    /// Observations per output period.
    pub counts: Vec<usize>,
    /// The final period holds fewer than `ticks_per_period` observations.
    pub partial_final: bool,
}

/// Group `(tick, value)` observations into periods of `ticks_per_period`
/// consecutive ticks (period `k` covers `[k p, (k+1) p)`) and aggregate.
/// Ticks are block heights for engine output or day numbers for panel data.
pub fn resample(ticks: &[i64], values: &[f64], ticks_per_period: i64, agg: Aggregation) -> Result<Resampled> {
    if ticks.is_empty() {
        return Err(EconError::EmptyInput);
    }
    if ticks.len() != values.len() {
        return Err(EconError::InvalidInput("ticks and values differ in length".into()));
    }
    if ticks_per_period <= 0 {
        return Err(EconError::InvalidInput("ticks_per_period must be positive".into()));
    }
    if ticks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EconError::InvalidInput("ticks must be strictly increasing".into()));
    }
    let mut timestamps = Vec::new();
    let mut out = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut sum = 0.0;
    for (&t, &v) in ticks.iter().zip(values) {
        let period = t.div_euclid(ticks_per_period);
        if timestamps.last() != Some(&period) {
            if let Some(&c) = counts.last() {
                finish(&mut out, sum, c, agg);
            }
            timestamps.push(period);
            counts.push(0);
            out.push(0.0);
            sum = 0.0;
        }
        sum += v;
        *counts.last_mut().expect("pushed") += 1;
        if agg == Aggregation::Last {
            *out.last_mut().expect("pushed") = v;
        }
    }
    finish(&mut out, sum, *counts.last().expect("nonempty"), agg);
    let partial_final = (*counts.last().expect("nonempty") as i64) < ticks_per_period;
    Ok(Resampled { series: RateSeries { timestamps, values: out }, counts, partial_final })
}

fn finish(out: &mut [f64], sum: f64, count: usize, agg: Aggregation) {
    if agg == Aggregation::Mean {
        *out.last_mut().expect("open period") = sum / count as f64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_stays_constant() {
        let ticks: Vec<i64> = (0..100).collect();
        let r = resample(&ticks, &[0.05; 100], 7, Aggregation::Mean).unwrap();
        assert!(r.series.values.iter().all(|&v| (v - 0.05).abs() < 1e-15));
        assert_eq!(r.series.len(), 15);
        assert!(r.partial_final);
        assert_eq!(r.counts.last(), Some(&2));
    }

    #[test]
    fn week_of_days_is_its_mean() {
        let vals = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let r = resample(&[7, 8, 9, 10, 11, 12, 13], &vals, 7, Aggregation::Mean).unwrap();
        assert_eq!(r.series.values, vec![4.0]);
        assert_eq!(r.series.timestamps, vec![1]);
        assert!(!r.partial_final);
        let last = resample(&[7, 8, 9, 10, 11, 12, 13], &vals, 7, Aggregation::Last).unwrap();
        assert_eq!(last.series.values, vec![7.0]);
    }

    #[test]
    fn partial_final_period_is_mean_of_what_is_there() {
        let r = resample(&[0, 1, 2, 3, 4, 5, 6, 7, 8], &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 4.0], 7, Aggregation::Mean)
            .unwrap();
        assert_eq!(r.series.values, vec![1.0, 3.0]);
        assert_eq!(r.counts, vec![7, 2]);
        assert!(r.partial_final);
    }

    #[test]
    fn errors() {
        assert_eq!(resample(&[], &[], 1, Aggregation::Mean), Err(EconError::EmptyInput));
        assert!(resample(&[1, 1], &[0.0, 0.0], 1, Aggregation::Mean).is_err());
    }

    #[test]
    fn weeks_start_on_monday() {
        let mon = NaiveDate::from_ymd_opt(2020, 2, 17).unwrap();
        let sun = NaiveDate::from_ymd_opt(2020, 2, 23).unwrap();
        let next = NaiveDate::from_ymd_opt(2020, 2, 24).unwrap();
        let w = Frequency::Weekly;
        assert_eq!(w.period_of(mon), w.period_of(sun));
        assert_eq!(w.period_of(next), w.period_of(mon) + 1);
    }

    #[test]
    fn align_keeps_common_timestamps() {
        let a = RateSeries::new(vec![1, 2, 3, 5], vec![1.0, 2.0, 3.0, 5.0]).unwrap();
        let b = RateSeries::new(vec![2, 3, 4, 5], vec![20.0, 30.0, 40.0, 50.0]).unwrap();
        let al = RateSeries::align(&[&a, &b]);
        assert_eq!(al[0].timestamps, vec![2, 3, 5]);
        assert_eq!(al[1].values, vec![20.0, 30.0, 50.0]);
    }
}
