use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::vecm::VecmFit;
use super::{EconError, Result};

/// Orthogonalized impulse responses; `responses[h][(i, j)]` is the response
/// of variable `i` at horizon `h` to a one-s.d. shock in variable `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct IrfResult {
    pub responses: Vec<DMatrix<f64>>,
}

impl IrfResult {
    pub fn horizon(&self) -> usize {
        self.responses.len() - 1
    }

    /// Long-format rows `(horizon, response, impulse, value)`.
    pub fn rows(&self) -> Vec<IrfRow> {
        let mut out = Vec::new();
        for (h, m) in self.responses.iter().enumerate() {
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    out.push(IrfRow { horizon: h, response: i, impulse: j, value: m[(i, j)] });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrfRow {
    pub horizon: usize,
    pub response: usize,
    pub impulse: usize,
    pub value: f64,
}

pub(crate) fn cholesky_factor(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if sigma.iter().any(|v| !v.is_finite()) {
        return Err(EconError::NonPsdCovariance);
    }
    let sym = (sigma + sigma.transpose()) * 0.5;
    sym.cholesky().map(|c| c.l()).ok_or(EconError::NonPsdCovariance)
}

/// Responses for horizons `0..=h` through the levels VAR implied by `fit`:
/// `Phi_0 = I`, `Phi_h = sum_j A_j Phi_{h-j}`, response `Phi_h P` with `P`
/// the lower Cholesky factor of the residual covariance (column order as in
/// the panel).
pub fn irf(fit: &VecmFit, h: usize) -> Result<IrfResult> {
    if h == 0 {
        return Err(EconError::InvalidInput("horizon must be at least 1".into()));
    }
    let p_chol = cholesky_factor(&fit.sigma)?;
    let a = fit.level_var();
    let k = fit.k;
    let mut phi: Vec<DMatrix<f64>> = Vec::with_capacity(h + 1);
    phi.push(DMatrix::identity(k, k));
    for step in 1..=h {
        let mut m = DMatrix::zeros(k, k);
        for (j, aj) in a.iter().enumerate().take(step) {
            m += aj * &phi[step - j - 1];
        }
        phi.push(m);
    }
    Ok(IrfResult { responses: phi.into_iter().map(|m| m * &p_chol).collect() })
}

/// Orthonormal basis of the orthogonal complement of the columns of `m`.
pub(crate) fn orth_complement(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (k, r) = m.shape();
    if r == 0 {
        return Ok(DMatrix::identity(k, k));
    }
    let gram_inv = (m.transpose() * m)
        .try_inverse()
        .ok_or_else(|| EconError::NumericalFailure("rank-deficient loading matrix".into()))?;
    let proj = DMatrix::<f64>::identity(k, k) - m * gram_inv * m.transpose();
    let proj = (&proj + proj.transpose()) * 0.5;
    let eig = proj.symmetric_eigen();
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut out = DMatrix::zeros(k, k - r);
    for (c, &i) in idx.iter().take(k - r).enumerate() {
        out.set_column(c, &eig.eigenvectors.column(i));
    }
    Ok(out)
}

/// Long-run multiplier of the Granger representation,
/// `C = beta_perp (alpha_perp' Gamma beta_perp)^-1 alpha_perp'` with
/// `Gamma = I - sum_i gamma_i`. Orthogonalized responses converge to `C P`.
pub fn granger_long_run(fit: &VecmFit) -> Result<DMatrix<f64>> {
    let k = fit.k;
    if fit.rank == k {
        return Ok(DMatrix::zeros(k, k));
    }
    let mut gamma = DMatrix::<f64>::identity(k, k);
    for g in &fit.gamma {
        gamma -= g;
    }
    let a_perp = orth_complement(&fit.alpha)?;
    let b_perp = orth_complement(&fit.beta)?;
    let mid = (a_perp.transpose() * gamma * &b_perp)
        .try_inverse()
        .ok_or_else(|| EconError::NumericalFailure("alpha_perp' Gamma beta_perp is singular".into()))?;
    Ok(b_perp * mid * a_perp.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::synthetic::VecmTruth;
    use nalgebra::DVector;

    #[test]
    fn horizon_zero_is_cholesky_factor() {
        let fit = VecmTruth::reference().as_fit();
        let r = irf(&fit, 5).unwrap();
        let p = fit.sigma.clone().cholesky().unwrap().l();
        assert_eq!(r.responses[0], p);
        assert_eq!(r.horizon(), 5);
        assert_eq!(r.rows().len(), 6 * 9);
    }

    #[test]
    fn diagonal_var_decays_geometrically() {
        // rank 2 of 2: a stationary VAR(1) y_t = (I + alpha) y_{t-1}
        let alpha = DMatrix::from_diagonal(&DVector::from_vec(vec![-0.5, -0.2]));
        let fit = VecmFit::from_parts(
            alpha,
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            Vec::new(),
            DMatrix::identity(2, 2),
        );
        let r = irf(&fit, 10).unwrap();
        for h in 0..=10 {
            assert!((r.responses[h][(0, 0)] - 0.5f64.powi(h as i32)).abs() < 1e-14);
            assert!((r.responses[h][(1, 1)] - 0.8f64.powi(h as i32)).abs() < 1e-14);
            assert_eq!(r.responses[h][(0, 1)], 0.0);
        }
        assert_eq!(granger_long_run(&fit).unwrap(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn cointegrated_responses_reach_granger_limit() {
        let fit = VecmTruth::reference().as_fit();
        let r = irf(&fit, 200).unwrap();
        let limit = granger_long_run(&fit).unwrap() * cholesky_factor(&fit.sigma).unwrap();
        let last = &r.responses[200];
        assert!((last - &limit).amax() < 1e-10 * limit.amax());
        assert!(limit.column(0).amax() > 0.0);
    }

    #[test]
    fn non_psd_covariance_rejected() {
        let mut fit = VecmTruth::reference().as_fit();
        fit.sigma[(0, 0)] = -1.0;
        assert_eq!(irf(&fit, 3).unwrap_err(), EconError::NonPsdCovariance);
    }
}
