use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::johansen::{check_dims, concentrate, johansen};
use super::ols::inverse_spd;
use super::{EconError, Result};

/// Restricted-constant VECM
/// `dy_t = alpha (beta' y_{t-1} + rho) + sum_i gamma_i dy_{t-i} + e_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct VecmFit {
    pub k: usize,
    pub rank: usize,
    /// Lag order of the levels VAR (`gamma.len() + 1`).
    pub lags: usize,
    pub n_obs: usize,
    /// Implied intercept `alpha rho`.
    pub nu: DVector<f64>,
    /// `K x r` adjustment coefficients.
    pub alpha: DMatrix<f64>,
    /// `K x r` cointegrating vectors; the top `r x r` block is the identity.
    pub beta: DMatrix<f64>,
    /// Constant inside each long-run relation.
    pub rho: DVector<f64>,
    pub gamma: Vec<DMatrix<f64>>,
    /// Residual covariance `E'E / T`.
    pub sigma: DMatrix<f64>,
    pub alpha_se: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub trace: Vec<f64>,
    pub selected_rank: usize,
    pub warnings: Vec<String>,
}

impl VecmFit {
    /// A fit with given parameters and no sample information.
    pub fn from_parts(
        alpha: DMatrix<f64>,
        beta: DMatrix<f64>,
        rho: DVector<f64>,
        gamma: Vec<DMatrix<f64>>,
        sigma: DMatrix<f64>,
    ) -> VecmFit {
        let (k, r) = alpha.shape();
        VecmFit {
            k,
            rank: r,
            lags: gamma.len() + 1,
            n_obs: 0,
            nu: &alpha * &rho,
            alpha_se: DMatrix::zeros(k, r),
            alpha,
            beta,
            rho,
            gamma,
            sigma,
            residuals: DMatrix::zeros(0, k),
            eigenvalues: Vec::new(),
            trace: Vec::new(),
            selected_rank: r,
            warnings: Vec::new(),
        }
    }

    /// `Pi = alpha beta'`.
    pub fn pi(&self) -> DMatrix<f64> {
        &self.alpha * self.beta.transpose()
    }

    /// Coefficient matrices `A_1..A_p` of the implied levels VAR.
    pub fn level_var(&self) -> Vec<DMatrix<f64>> {
        let k = self.k;
        let p = self.lags;
        let mut a = Vec::with_capacity(p);
        let id = DMatrix::<f64>::identity(k, k);
        if p == 1 {
            a.push(id + self.pi());
            return a;
        }
        a.push(id + self.pi() + &self.gamma[0]);
        for i in 1..p - 1 {
            a.push(&self.gamma[i] - &self.gamma[i - 1]);
        }
        a.push(-&self.gamma[p - 2]);
        a
    }

    pub fn report(&self) -> VecmReport {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
        };
        VecmReport {
            k: self.k,
            rank: self.rank,
            selected_rank: self.selected_rank,
            lags: self.lags,
            n_obs: self.n_obs,
            eigenvalues: self.eigenvalues.clone(),
            trace: self.trace.clone(),
            nu: self.nu.iter().copied().collect(),
            alpha: rows(&self.alpha),
            alpha_se: rows(&self.alpha_se),
            beta: rows(&self.beta),
            rho: self.rho.iter().copied().collect(),
            gamma: self.gamma.iter().map(rows).collect(),
            sigma: rows(&self.sigma),
            warnings: self.warnings.clone(),
        }
    }
}

/// Plain-data view of a fit for JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VecmReport {
    pub k: usize,
    pub rank: usize,
    pub selected_rank: usize,
    pub lags: usize,
    pub n_obs: usize,
    pub eigenvalues: Vec<f64>,
    pub trace: Vec<f64>,
    pub nu: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
    pub alpha_se: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub sigma: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Maximum-likelihood VECM of cointegrating rank `r` with `p` lags in levels.
///
/// `beta` comes from the Johansen eigenvectors with Phillips normalization
/// (`beta = v (v_top)^-1`), then `alpha` and `gamma` by least squares of
/// `dy_t` on `[beta' y_{t-1} + rho, dy_{t-1}, ..]`.
pub fn vecm_fit(y: &DMatrix<f64>, r: usize, p: usize) -> Result<VecmFit> {
    check_dims(y, p)?;
    let k = y.ncols();
    if r > k {
        return Err(EconError::RankOutOfRange { rank: r, k });
    }
    let j = johansen(y, p)?;
    let c = concentrate(y, p)?;
    let t = c.z0.nrows();
    let mut warnings = Vec::new();
    if r > j.rank {
        warnings.push(format!(
            "rank {r} exceeds the trace-test rank {}: adjustment estimates may be spurious",
            j.rank
        ));
    }

    let (beta_full, ect) = if r > 0 {
        let v = j.vectors.columns(0, r).into_owned();
        let top = v.rows(0, r).into_owned();
        let top_inv = top
            .try_inverse()
            .ok_or_else(|| EconError::NumericalFailure("leading block of beta is singular".into()))?;
        let mut b = v * top_inv;
        // identity by construction; remove rounding so leading coefficients are exactly 1
        b.view_mut((0, 0), (r, r)).fill_with_identity();
        let ect = &c.z1 * &b;
        (b, ect)
    } else {
        (DMatrix::zeros(k + 1, 0), DMatrix::zeros(t, 0))
    };
    let beta = beta_full.rows(0, k).into_owned();
    let rho: DVector<f64> = beta_full.row(k).transpose();

    let q = r + c.z2.ncols();
    let mut x = DMatrix::zeros(t, q);
    x.columns_mut(0, r).copy_from(&ect);
    x.columns_mut(r, c.z2.ncols()).copy_from(&c.z2);
    let (coef, xtx_inv) = if q > 0 {
        let inv = inverse_spd(&(x.transpose() * &x))?;
        (&inv * (x.transpose() * &c.z0), inv)
    } else {
        (DMatrix::zeros(0, k), DMatrix::zeros(0, 0))
    };
    let residuals = &c.z0 - &x * &coef;
    let sigma = residuals.transpose() * &residuals / t as f64;

    let alpha = coef.rows(0, r).transpose();
    let gamma: Vec<DMatrix<f64>> = (1..p).map(|i| coef.rows(r + (i - 1) * k, k).transpose()).collect();
    let alpha_se = DMatrix::from_fn(k, r, |i, jj| (sigma[(i, i)] * xtx_inv[(jj, jj)]).max(0.0).sqrt());
    let nu = &alpha * &rho;

    Ok(VecmFit {
        k,
        rank: r,
        lags: p,
        n_obs: t,
        nu,
        alpha,
        beta,
        rho,
        gamma,
        sigma,
        alpha_se,
        residuals,
        eigenvalues: j.eigenvalues,
        trace: j.trace,
        selected_rank: j.rank,
        warnings,
    })
}
