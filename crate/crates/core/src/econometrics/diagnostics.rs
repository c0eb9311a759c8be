use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::ols::inverse_spd;
use super::vecm::VecmFit;
use super::{EconError, Result};

/// Companion-matrix eigenvalue summary of a fitted VECM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Eigenvalue moduli, descending.
    pub moduli: Vec<f64>,
    pub unit_roots: usize,
    pub expected_unit_roots: usize,
    /// Roots with modulus above `1 + unit_tol`.
    pub explosive: usize,
    /// Non-unit roots with modulus above `1 - flag_tol`.
    pub near_unit: Vec<f64>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.unit_roots == self.expected_unit_roots && self.explosive == 0 && self.near_unit.is_empty()
    }
}

pub const UNIT_ROOT_TOL: f64 = 1e-6;
pub const NEAR_UNIT_TOL: f64 = 0.05;

pub fn companion(a: &[DMatrix<f64>]) -> DMatrix<f64> {
    let k = a[0].nrows();
    let p = a.len();
    let mut c = DMatrix::zeros(k * p, k * p);
    for (i, ai) in a.iter().enumerate() {
        c.view_mut((0, i * k), (k, k)).copy_from(ai);
    }
    if p > 1 {
        c.view_mut((k, 0), (k * (p - 1), k * (p - 1))).fill_with_identity();
    }
    c
}

/// Eigenvalues of the levels-VAR companion matrix. A correctly specified
/// fit has exactly `K - r` roots at modulus 1 (within `UNIT_ROOT_TOL`) and
/// the rest inside the circle; non-unit roots above `1 - NEAR_UNIT_TOL`
/// are flagged as a sign of an overstated rank.
pub fn stability_check(fit: &VecmFit) -> StabilityReport {
    stability_check_with(fit, UNIT_ROOT_TOL, NEAR_UNIT_TOL)
}

pub fn stability_check_with(fit: &VecmFit, unit_tol: f64, flag_tol: f64) -> StabilityReport {
    let c = companion(&fit.level_var());
    let mut moduli: Vec<f64> = c.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let unit_roots = moduli.iter().filter(|m| (*m - 1.0).abs() <= unit_tol).count();
    let explosive = moduli.iter().filter(|&&m| m > 1.0 + unit_tol).count();
    let near_unit = moduli
        .iter()
        .copied()
        .filter(|&m| (m - 1.0).abs() > unit_tol && m > 1.0 - flag_tol && m <= 1.0 + unit_tol)
        .collect();
    StabilityReport { moduli, unit_roots, expected_unit_roots: fit.k - fit.rank, explosive, near_unit }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagCriterion {
    Aic,
    Bic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub selected: usize,
    /// `(p, aic, bic)` on a common sample.
    pub table: Vec<(usize, f64, f64)>,
}

/// Information-criterion lag choice over `1..=max_p` for a levels VAR with
/// constant, every order fitted on the same `n - max_p` observations.
pub fn select_lags(y: &DMatrix<f64>, max_p: usize, criterion: LagCriterion) -> Result<LagSelection> {
    let (n, k) = y.shape();
    if max_p == 0 {
        return Err(EconError::InvalidInput("max lag must be at least 1".into()));
    }
    if n <= max_p + k * max_p + 1 {
        return Err(EconError::InsufficientObservations { needed: max_p + k * max_p + 2, have: n });
    }
    let t = n - max_p;
    let tf = t as f64;
    let yt = y.rows(max_p, t).into_owned();
    let mut table = Vec::with_capacity(max_p);
    for p in 1..=max_p {
        let mut x = DMatrix::zeros(t, 1 + k * p);
        x.column_mut(0).fill(1.0);
        for l in 1..=p {
            x.view_mut((0, 1 + (l - 1) * k), (t, k)).copy_from(&y.rows(max_p - l, t));
        }
        let inv = inverse_spd(&(x.transpose() * &x))?;
        let e = &yt - &x * (inv * (x.transpose() * &yt));
        let sigma = e.transpose() * &e / tf;
        let det = sigma.determinant();
        if det <= 0.0 || !det.is_finite() {
            return Err(EconError::NumericalFailure(format!("singular residual covariance at p = {p}")));
        }
        let m = (k * (k * p + 1)) as f64;
        table.push((p, det.ln() + 2.0 * m / tf, det.ln() + tf.ln() * m / tf));
    }
    let pick = |f: fn(&(usize, f64, f64)) -> f64| {
        table.iter().min_by(|a, b| f(a).total_cmp(&f(b))).expect("nonempty").0
    };
    let selected = match criterion {
        LagCriterion::Aic => pick(|r| r.1),
        LagCriterion::Bic => pick(|r| r.2),
    };
    Ok(LagSelection { selected, table })
}

fn chi2_sf(stat: f64, dof: f64) -> f64 {
    let chi = ChiSquared::new(dof).expect("positive dof");
    chi.sf(stat).clamp(0.0, 1.0)
}

/// Ljung-Box `Q = n(n+2) sum_{h=1..m} r_h^2 / (n-h)` with its chi-square(m)
/// p-value. Summary statistic only.
pub fn ljung_box(x: &[f64], m: usize) -> (f64, f64) {
    let n = x.len();
    if m == 0 || n <= m {
        return (f64::NAN, f64::NAN);
    }
    let v = DVector::from_column_slice(x);
    let c = v.add_scalar(-v.mean());
    let denom = c.norm_squared();
    if denom == 0.0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let q = (1..=m)
        .map(|h| {
            let r = c.rows(h, n - h).dot(&c.rows(0, n - h)) / denom;
            r * r / (nf - h as f64)
        })
        .sum::<f64>()
        * nf
        * (nf + 2.0);
    (q, chi2_sf(q, m as f64))
}

/// Jarque-Bera `n/6 (S^2 + (K-3)^2/4)` with its chi-square(2) p-value.
pub fn jarque_bera(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.len() < 3 {
        return (f64::NAN, f64::NAN);
    }
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 == 0.0 {
        return (0.0, 1.0);
    }
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let s = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let jb = n / 6.0 * (s * s + (kurt - 3.0).powi(2) / 4.0);
    (jb, chi2_sf(jb, 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::synthetic::{stationary_var, VecmTruth};
    use crate::econometrics::vecm::vecm_fit;

    #[test]
    fn reference_fit_has_one_unit_root() {
        let y = VecmTruth::reference().simulate(2000, 9);
        let fit = vecm_fit(&y, 2, 5).unwrap();
        let rep = stability_check(&fit);
        assert_eq!(rep.expected_unit_roots, 1);
        assert_eq!(rep.unit_roots, 1, "{:?}", rep.moduli);
        assert_eq!(rep.explosive, 0);
        assert!(rep.is_stable(), "{rep:?}");
    }

    #[test]
    fn full_rank_has_no_unit_roots() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.2]));
        let y = stationary_var(&[a], &DMatrix::identity(2, 2), 800, 4);
        let fit = vecm_fit(&y, 2, 1).unwrap();
        let rep = stability_check(&fit);
        assert_eq!(rep.unit_roots, 0);
        assert!(rep.moduli[0] < 1.0);
    }

    #[test]
    fn companion_layout() {
        let a1 = DMatrix::from_element(2, 2, 1.0);
        let a2 = DMatrix::from_element(2, 2, 2.0);
        let c = companion(&[a1, a2]);
        assert_eq!(c[(0, 3)], 2.0);
        assert_eq!(c[(2, 0)], 1.0);
        assert_eq!(c[(3, 1)], 1.0);
        assert_eq!(c[(2, 2)], 0.0);
    }

    #[test]
    fn bic_picks_true_order() {
        let a1 = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.4]));
        let a2 = DMatrix::from_diagonal(&DVector::from_vec(vec![-0.3, 0.2]));
        let y = stationary_var(&[a1, a2], &DMatrix::identity(2, 2), 2000, 12);
        let sel = select_lags(&y, 6, LagCriterion::Bic).unwrap();
        assert_eq!(sel.selected, 2);
        assert_eq!(sel.table.len(), 6);
    }

    #[test]
    fn summary_statistics() {
        let (q, p) = ljung_box(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0], 1);
        assert!(q > 0.0 && p < 0.1);
        assert_eq!(jarque_bera(&[2.0; 10]), (0.0, 1.0));
        let (jb, _) = jarque_bera(&[1.0, 2.0, 3.0, 4.0]);
        assert!(jb >= 0.0);
    }
}
