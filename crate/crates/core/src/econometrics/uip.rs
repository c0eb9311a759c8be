use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::ols::{default_hac_lags, newey_west, ols};
use super::series::RateSeries;
use super::{EconError, Result};

pub const MIN_OBSERVATIONS: usize = 10;

/// UIP regression `s_{t+1} - s_t = alpha + beta (i_i - i_j)_t + e` with
/// Newey-West inference. `s` is the log exchange rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub n_obs: usize,
    pub hac_lags: usize,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    pub hac_cov: [[f64; 2]; 2],
    pub r_squared: f64,
    /// Two-sided normal p-value of `alpha = 0`.
    pub p_alpha: f64,
    /// Two-sided normal p-value of `beta = 0`.
    pub p_beta: f64,
    /// Wald chi-square(2) of `alpha = 0, beta = 1`.
    pub wald_strict: f64,
    pub p_strict: f64,
    /// Wald chi-square(1) of `beta = 1`.
    pub wald_weak: f64,
    pub p_weak: f64,
}

/// Wald statistic of `R b = r` under covariance `v`, with its chi-square
/// p-value (`R.nrows()` degrees of freedom).
///
/// A covariance that vanishes on the restricted directions (an exact fit)
/// gives statistic 0 and p = 1 when the restriction holds to rounding, and
/// +inf with p = 0 otherwise.
pub fn wald(b: &DVector<f64>, v: &DMatrix<f64>, r_mat: &DMatrix<f64>, r: &DVector<f64>) -> (f64, f64) {
    let d = r_mat * b - r;
    let m = r_mat * v * r_mat.transpose();
    let scale = b.amax().max(r.amax()).max(1.0);
    let tol = 1e-10 * scale;
    let q = m.nrows();
    let stat = match m.clone().cholesky() {
        Some(ch) if m.diagonal().min() > f64::EPSILON * m.diagonal().amax().max(f64::MIN_POSITIVE) => {
            let sol = ch.solve(&d);
            d.dot(&sol)
        }
        _ => {
            if d.amax() <= tol {
                0.0
            } else {
                f64::INFINITY
            }
        }
    };
    let p = if stat.is_infinite() {
        0.0
    } else {
        let chi = ChiSquared::new(q as f64).expect("positive dof");
        chi.sf(stat).clamp(0.0, 1.0)
    };
    (stat, p)
}

fn z_pvalue(est: f64, se: f64) -> f64 {
    if se == 0.0 {
        return if est.abs() <= 1e-10 * est.abs().max(1.0) { 1.0 } else { 0.0 };
    }
    let z = (est / se).abs();
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * n.sf(z)).clamp(0.0, 1.0)
}

/// Run the UIP regression on aligned per-period series. `exchange` holds the
/// level of the exchange rate (logged here), `iota_i` and `iota_j` the
/// per-period interest rates. `hac_lags = None` uses the automatic rule.
pub fn uip_regress(
    exchange: &RateSeries,
    iota_i: &RateSeries,
    iota_j: &RateSeries,
    hac_lags: Option<usize>,
) -> Result<RegressionResult> {
    if exchange.timestamps != iota_i.timestamps || exchange.timestamps != iota_j.timestamps {
        return Err(EconError::InvalidInput("series are not aligned".into()));
    }
    let n = exchange.len();
    if n < MIN_OBSERVATIONS {
        return Err(EconError::InsufficientObservations { needed: MIN_OBSERVATIONS, have: n });
    }
    if exchange.values.iter().any(|&s| s <= 0.0) {
        return Err(EconError::InvalidInput("exchange rate must be strictly positive".into()));
    }
    let s: Vec<f64> = exchange.values.iter().map(|v| v.ln()).collect();
    let dy: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    let dx: Vec<f64> = iota_i.values.iter().zip(&iota_j.values).map(|(a, b)| a - b).take(n - 1).collect();
    regress_pair(&dy, &dx, hac_lags)
}

/// Same regression on already differenced data: `y_t` on constant and `x_t`.
pub fn regress_pair(y: &[f64], x: &[f64], hac_lags: Option<usize>) -> Result<RegressionResult> {
    let m = y.len();
    if m != x.len() {
        return Err(EconError::InvalidInput("y and x differ in length".into()));
    }
    if m < MIN_OBSERVATIONS - 1 {
        return Err(EconError::InsufficientObservations { needed: MIN_OBSERVATIONS, have: m + 1 });
    }
    let mean = x.iter().sum::<f64>() / m as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64;
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if var <= (1e-12 * scale).powi(2) || var == 0.0 {
        return Err(EconError::DegenerateRegressor);
    }
    let design = DMatrix::from_fn(m, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
    let yv = DVector::from_column_slice(y);
    let fit = ols(&design, &yv)?;
    let lags = hac_lags.unwrap_or_else(|| default_hac_lags(m)).min(m - 1);
    let mut cov = newey_west(&design, &fit.residuals, lags)?;
    // exact fit: residuals are rounding noise, so the covariance is zero
    if fit.residuals.norm_squared() <= 1e-20 * yv.norm_squared() {
        cov.fill(0.0);
    }
    let (a, b) = (fit.coef[0], fit.coef[1]);
    let (se_a, se_b) = (cov[(0, 0)].max(0.0).sqrt(), cov[(1, 1)].max(0.0).sqrt());
    let (wald_strict, p_strict) = wald(
        &fit.coef,
        &cov,
        &DMatrix::identity(2, 2),
        &DVector::from_vec(vec![0.0, 1.0]),
    );
    let (wald_weak, p_weak) = wald(
        &fit.coef,
        &cov,
        &DMatrix::from_row_slice(1, 2, &[0.0, 1.0]),
        &DVector::from_vec(vec![1.0]),
    );
    Ok(RegressionResult {
        n_obs: m,
        hac_lags: lags,
        alpha_hat: a,
        beta_hat: b,
        se_alpha: se_a,
        se_beta: se_b,
        hac_cov: [[cov[(0, 0)], cov[(0, 1)]], [cov[(1, 0)], cov[(1, 1)]]],
        r_squared: fit.r_squared,
        p_alpha: z_pvalue(a, se_a),
        p_beta: z_pvalue(b, se_b),
        wald_strict,
        p_strict,
        wald_weak,
        p_weak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::synthetic::uip_sample;

    fn series(v: Vec<f64>) -> RateSeries {
        RateSeries::new((0..v.len() as i64).collect(), v).unwrap()
    }

    #[test]
    fn noiseless_uip_fits_exactly() {
        let n = 50;
        let x: Vec<f64> = (0..n).map(|t| 0.001 * ((t * 7 % 11) as f64 - 5.0)).collect();
        let mut s = vec![1.3f64];
        for t in 0..n - 1 {
            let next = s[t] * x[t].exp();
            s.push(next);
        }
        let r = uip_regress(&series(s), &series(x), &series(vec![0.0; n]), None).unwrap();
        assert!(r.alpha_hat.abs() < 1e-12);
        assert!((r.beta_hat - 1.0).abs() < 1e-9);
        assert_eq!(r.p_strict, 1.0);
        assert_eq!(r.p_weak, 1.0);
    }

    #[test]
    fn constant_differential_is_degenerate() {
        let s = series((0..20).map(|t| 1.0 + t as f64 * 0.01).collect());
        let r = uip_regress(&s, &series(vec![0.02; 20]), &series(vec![0.01; 20]), None);
        assert_eq!(r.unwrap_err(), EconError::DegenerateRegressor);
    }

    #[test]
    fn too_short() {
        let s = series(vec![1.0; 9]);
        let r = uip_regress(&s, &s, &s, None);
        assert!(matches!(r, Err(EconError::InsufficientObservations { .. })));
    }

    #[test]
    fn half_beta_is_rejected() {
        let (y, x) = uip_sample(400, 0.02, 0.5, 0.01, 11);
        let r = regress_pair(&y, &x, None).unwrap();
        assert!((r.beta_hat - 0.5).abs() < 3.0 * r.se_beta);
        assert!(r.p_weak < 0.01);
        assert!((0.0..=1.0).contains(&r.p_strict));
    }

    #[test]
    fn wald_exact_fit_rules() {
        let b = DVector::from_vec(vec![0.0, 2.0]);
        let v = DMatrix::zeros(2, 2);
        let r_mat = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        assert_eq!(wald(&b, &v, &r_mat, &DVector::from_vec(vec![2.0])), (0.0, 1.0));
        assert_eq!(wald(&b, &v, &r_mat, &DVector::from_vec(vec![1.0])).1, 0.0);
    }
}
