use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ols::inverse_spd;
use super::{EconError, Result};

/// 5% and 1% trace-test critical values, constant restricted to the
/// cointegration space (Osterwald-Lenum 1992, Table 1*), indexed by
/// `K - r - 1` for `K - r = 1..=6`.
pub const TRACE_CV_5: [f64; 6] = [9.24, 19.96, 34.91, 53.12, 76.07, 102.14];
pub const TRACE_CV_1: [f64; 6] = [12.97, 24.60, 41.07, 60.16, 84.45, 111.01];

pub const MAX_K: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    pub k: usize,
    pub lags: usize,
    /// Effective sample size `n - p`.
    pub n_obs: usize,
    /// Squared canonical correlations, descending.
    pub eigenvalues: Vec<f64>,
    /// `trace[r]` tests `H(r)`: rank at most `r`, for `r = 0..K`.
    pub trace: Vec<f64>,
    pub max_eigen: Vec<f64>,
    pub crit_5: Vec<f64>,
    pub crit_1: Vec<f64>,
    /// Smallest `r` whose trace statistic is below its 5% critical value.
    pub rank: usize,
    /// Eigenvectors over `[y_{t-1}; 1]`, one column per eigenvalue,
    /// normalized so that `v' S11 v = I`.
    #[serde(skip)]
    pub vectors: DMatrix<f64>,
}

/// Moment matrices of the concentrated reduced-rank regression.
pub(crate) struct Concentrated {
    /// `dy_t` rows, `T x K`.
    pub z0: DMatrix<f64>,
    /// `[y_{t-1}, 1]` rows, `T x (K+1)`.
    pub z1: DMatrix<f64>,
    /// Lagged differences, `T x K(p-1)`.
    pub z2: DMatrix<f64>,
    pub r0: DMatrix<f64>,
    pub r1: DMatrix<f64>,
}

pub(crate) fn concentrate(y: &DMatrix<f64>, p: usize) -> Result<Concentrated> {
    let (n, k) = y.shape();
    let t = n - p;
    let dy = |row: usize| y.row(row) - y.row(row - 1);
    let mut z0 = DMatrix::zeros(t, k);
    let mut z1 = DMatrix::zeros(t, k + 1);
    let mut z2 = DMatrix::zeros(t, k * (p - 1));
    for i in 0..t {
        let row = i + p;
        z0.row_mut(i).copy_from(&dy(row));
        z1.view_mut((i, 0), (1, k)).copy_from(&y.row(row - 1));
        z1[(i, k)] = 1.0;
        for l in 1..p {
            z2.view_mut((i, (l - 1) * k), (1, k)).copy_from(&dy(row - l));
        }
    }
    let (r0, r1) = if p > 1 {
        let proj = inverse_spd(&(z2.transpose() * &z2))?;
        let resid = |z: &DMatrix<f64>| z - &z2 * (&proj * (z2.transpose() * z));
        (resid(&z0), resid(&z1))
    } else {
        (z0.clone(), z1.clone())
    };
    Ok(Concentrated { z0, z1, z2, r0, r1 })
}

pub(crate) fn check_dims(y: &DMatrix<f64>, p: usize) -> Result<()> {
    let (n, k) = y.shape();
    if !(2..=MAX_K).contains(&k) {
        return Err(EconError::InvalidInput(format!("need 2..={MAX_K} series, got {k}")));
    }
    if p == 0 {
        return Err(EconError::InvalidInput("lag order must be at least 1".into()));
    }
    if n <= k * p + 10 {
        return Err(EconError::InsufficientObservations { needed: k * p + 11, have: n });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(EconError::InvalidInput("non-finite observation".into()));
    }
    Ok(())
}

/// Johansen trace test on the levels `y` (rows are periods, columns series)
/// with `p` lags in the levels VAR.
///
/// Solves `|lambda S11 - S10 S00^-1 S01| = 0` by whitening with the
/// Cholesky factor of `S11` and a symmetric eigen-decomposition.
pub fn johansen(y: &DMatrix<f64>, p: usize) -> Result<JohansenResult> {
    check_dims(y, p)?;
    let k = y.ncols();
    let c = concentrate(y, p)?;
    let t = c.r0.nrows();
    let tf = t as f64;
    let s00 = c.r0.transpose() * &c.r0 / tf;
    let s01 = c.r0.transpose() * &c.r1 / tf;
    let s11 = c.r1.transpose() * &c.r1 / tf;
    let s00_inv = inverse_spd(&s00).map_err(|_| EconError::NumericalFailure("S00 is singular".into()))?;
    let l = s11
        .clone()
        .cholesky()
        .ok_or_else(|| EconError::NumericalFailure("S11 is not positive definite".into()))?
        .l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| EconError::NumericalFailure("S11 factor is singular".into()))?;
    let m = &l_inv * s01.transpose() * &s00_inv * &s01 * l_inv.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(EconError::NumericalFailure("eigen-solver returned non-finite values".into()));
    }
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(k);
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].clamp(0.0, 1.0 - 1e-15)).collect();
    let mut vectors = DMatrix::zeros(k + 1, k);
    let back = l_inv.transpose();
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &(&back * eig.eigenvectors.column(i)));
    }
    let logs: Vec<f64> = eigenvalues.iter().map(|l| (1.0 - l).ln()).collect();
    let trace: Vec<f64> = (0..k).map(|r| -tf * logs[r..].iter().sum::<f64>()).collect();
    let max_eigen: Vec<f64> = logs.iter().map(|lg| -tf * lg).collect();
    let crit_5: Vec<f64> = (0..k).map(|r| TRACE_CV_5[k - r - 1]).collect();
    let crit_1: Vec<f64> = (0..k).map(|r| TRACE_CV_1[k - r - 1]).collect();
    let rank = (0..k).find(|&r| trace[r] < crit_5[r]).unwrap_or(k);
    Ok(JohansenResult { k, lags: p, n_obs: t, eigenvalues, trace, max_eigen, crit_5, crit_1, rank, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::synthetic::{random_walks, stationary_var, VecmTruth};

    #[test]
    fn stationary_system_has_full_rank() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.3, -0.2]));
        let y = stationary_var(&[a], &DMatrix::identity(3, 3), 500, 7);
        let j = johansen(&y, 2).unwrap();
        assert_eq!(j.rank, 3);
    }

    #[test]
    fn independent_walks_rarely_reject() {
        let rejections = (0..40)
            .filter(|&s| johansen(&random_walks(2, 300, 100 + s), 1).unwrap().rank > 0)
            .count();
        assert!(rejections <= 4, "{rejections} of 40");
    }

    #[test]
    fn common_trend_gives_rank_two() {
        let t = VecmTruth::reference();
        let j = johansen(&t.simulate(2000, 5), 5).unwrap();
        assert_eq!(j.rank, 2);
    }

    #[test]
    fn trace_is_non_increasing() {
        let y = VecmTruth::reference().simulate(300, 1);
        let j = johansen(&y, 3).unwrap();
        assert!(j.trace.windows(2).all(|w| w[0] >= w[1]));
        assert!(j.eigenvalues.iter().all(|&l| (0.0..1.0).contains(&l)));
    }

    #[test]
    fn dimension_checks() {
        let y = random_walks(1, 100, 1);
        assert!(matches!(johansen(&y, 1), Err(EconError::InvalidInput(_))));
        let y = random_walks(3, 20, 1);
        assert!(matches!(johansen(&y, 5), Err(EconError::InsufficientObservations { .. })));
    }
}
