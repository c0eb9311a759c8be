use nalgebra::{DMatrix, DVector};

use super::{EconError, Result};

/// Least-squares fit of `y` on the columns of `x`.
#[derive(Clone, Debug)]
pub struct OlsFit {
    pub coef: DVector<f64>,
    pub residuals: DVector<f64>,
    /// `(X'X)^-1`.
    pub xtx_inv: DMatrix<f64>,
    pub r_squared: f64,
}

impl OlsFit {
    pub fn n(&self) -> usize {
        self.residuals.len()
    }

    /// Classical covariance `s^2 (X'X)^-1` with `s^2 = e'e / (n - k)`.
    pub fn classical_cov(&self) -> DMatrix<f64> {
        let dof = (self.n() - self.coef.len()).max(1) as f64;
        &self.xtx_inv * (self.residuals.norm_squared() / dof)
    }
}

/// Relative pivot size below which `X'X` is treated as singular.
const SINGULAR_TOL: f64 = 1e-12;

pub(crate) fn inverse_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let scale = m.diagonal().amax();
    if scale == 0.0 || !scale.is_finite() {
        return Err(EconError::SingularDesign);
    }
    let chol = m.clone().cholesky().ok_or(EconError::SingularDesign)?;
    let l = chol.l();
    let min_pivot = (0..l.nrows()).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    if min_pivot < SINGULAR_TOL * scale {
        return Err(EconError::SingularDesign);
    }
    Ok(chol.inverse())
}

/// OLS by normal equations (Cholesky of `X'X`). `r_squared` is centred
/// when the first column is constant, uncentred otherwise.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if n != y.len() {
        return Err(EconError::InvalidInput(format!("x has {n} rows, y has {}", y.len())));
    }
    if n < k {
        return Err(EconError::InsufficientObservations { needed: k, have: n });
    }
    let xtx_inv = inverse_spd(&(x.transpose() * x))?;
    let coef = &xtx_inv * (x.transpose() * y);
    let residuals = y - x * &coef;
    let has_const = k > 0 && x.column(0).iter().all(|&v| v == x[(0, 0)]) && x[(0, 0)] != 0.0;
    let tss = if has_const {
        let m = y.mean();
        y.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    } else {
        y.norm_squared()
    };
    let r_squared = if tss > 0.0 { 1.0 - residuals.norm_squared() / tss } else { 1.0 };
    Ok(OlsFit { coef, residuals, xtx_inv, r_squared })
}

/// Automatic bandwidth `floor(4 (n/100)^(2/9))`.
pub fn default_hac_lags(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Newey-West covariance of the OLS coefficients with Bartlett weights
/// `1 - l/(L+1)`:
/// `(X'X)^-1 [G0 + sum_l w_l (G_l + G_l')] (X'X)^-1`,
/// `G_l = sum_t u_t u_{t-l} x_t x_{t-l}'`. No small-sample correction.
pub fn newey_west(x: &DMatrix<f64>, residuals: &DVector<f64>, lags: usize) -> Result<DMatrix<f64>> {
    let (n, k) = x.shape();
    if lags >= n {
        return Err(EconError::InvalidInput(format!("hac lags {lags} must be below n = {n}")));
    }
    let bread = inverse_spd(&(x.transpose() * x))?;
    // scores g_t = u_t x_t, one row per observation
    let mut g = x.clone();
    for (t, mut row) in g.row_iter_mut().enumerate() {
        row *= residuals[t];
    }
    let mut meat = g.transpose() * &g;
    for l in 1..=lags {
        let w = 1.0 - l as f64 / (lags as f64 + 1.0);
        let lead = g.rows(l, n - l);
        let lag = g.rows(0, n - l);
        let gamma = lead.transpose() * lag;
        meat += (&gamma + gamma.transpose()) * w;
    }
    debug_assert_eq!(meat.shape(), (k, k));
    let cov = &bread * meat * &bread;
    Ok((&cov + cov.transpose()) * 0.5)
}

/// White (HC0) covariance `(X'X)^-1 (sum_t u_t^2 x_t x_t') (X'X)^-1`,
/// written out observation by observation.
pub fn white(x: &DMatrix<f64>, residuals: &DVector<f64>) -> Result<DMatrix<f64>> {
    let k = x.ncols();
    let bread = inverse_spd(&(x.transpose() * x))?;
    let mut meat = DMatrix::<f64>::zeros(k, k);
    for (t, row) in x.row_iter().enumerate() {
        let u2 = residuals[t] * residuals[t];
        for i in 0..k {
            for j in 0..k {
                meat[(i, j)] += u2 * row[i] * row[j];
            }
        }
    }
    Ok(&bread * meat * &bread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn design(n: usize, seed: u64) -> (DMatrix<f64>, DVector<f64>) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.sample(StandardNormal) });
        let e: DVector<f64> = DVector::from_fn(n, |_, _| rng.sample(StandardNormal));
        let y = &x * DVector::from_vec(vec![0.5, 2.0]) + e;
        (x, y)
    }

    #[test]
    fn recovers_exact_fit() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let f = ols(&x, &y).unwrap();
        assert!((f.coef[0] - 1.0).abs() < 1e-12 && (f.coef[1] - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_design_is_singular() {
        let x = DMatrix::from_fn(10, 3, |i, j| match j {
            0 => 1.0,
            1 => i as f64,
            _ => 2.0 * i as f64 + 1.0,
        });
        let y = DVector::from_fn(10, |i, _| i as f64);
        assert_eq!(ols(&x, &y).unwrap_err(), EconError::SingularDesign);
        assert_eq!(newey_west(&x, &y, 2).unwrap_err(), EconError::SingularDesign);
    }

    #[test]
    fn zero_lags_matches_white() {
        let (x, y) = design(300, 1);
        let f = ols(&x, &y).unwrap();
        let nw = newey_west(&x, &f.residuals, 0).unwrap();
        let hc0 = white(&x, &f.residuals).unwrap();
        assert!((nw - hc0).amax() < 1e-14);
    }

    #[test]
    fn nw_close_to_classical_on_iid_data() {
        let (x, y) = design(4000, 2);
        let f = ols(&x, &y).unwrap();
        let nw = newey_west(&x, &f.residuals, 4).unwrap();
        let cl = f.classical_cov();
        let ratio = (nw[(1, 1)] / cl[(1, 1)]).sqrt();
        assert!((ratio - 1.0).abs() < 0.15, "ratio {ratio}");
    }

    #[test]
    fn nw_is_symmetric_psd() {
        for seed in 0..20 {
            let (x, y) = design(60, seed);
            let f = ols(&x, &y).unwrap();
            for l in [0, 1, 5, 30] {
                let c = newey_west(&x, &f.residuals, l).unwrap();
                assert_eq!(c, c.transpose());
                let ev = c.symmetric_eigenvalues();
                assert!(ev.min() >= -1e-10);
            }
        }
    }

    #[test]
    fn lag_rule() {
        assert_eq!(default_hac_lags(100), 4);
        assert_eq!(default_hac_lags(400), 5);
        assert_eq!(default_hac_lags(10), 2);
        let (x, y) = design(5, 3);
        assert!(newey_west(&x, &y, 5).is_err());
    }
}
