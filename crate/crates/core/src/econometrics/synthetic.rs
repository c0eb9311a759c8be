//! Seeded data generators with known parameters, used by tests, the
//! Monte Carlo harness and the CLI demo inputs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use super::vecm::VecmFit;

const BURN_IN: usize = 200;

fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

fn normal(r: &mut Xoshiro256PlusPlus) -> f64 {
    r.sample(StandardNormal)
}

/// `y_t = alpha + beta x_t + noise_sd e_t`, with `x` an AR(1)
/// (coefficient 0.5, innovation sd 0.02) standing in for a persistent
/// interest differential. Returns `(y, x)`.
pub fn uip_sample(n: usize, alpha: f64, beta: f64, noise_sd: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let mut x = 0.0;
    for _ in 0..BURN_IN {
        x = 0.5 * x + 0.02 * normal(&mut r);
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        x = 0.5 * x + 0.02 * normal(&mut r);
        xs.push(x);
        ys.push(alpha + beta * x + noise_sd * normal(&mut r));
    }
    (ys, xs)
}

/// Regression with AR(1) regressor and AR(1) errors (unit innovations):
/// `y_t = 1 + 0.5 x_t + u_t`. Returns `(y, x)`.
pub fn ar1_errors_sample(n: usize, rho_x: f64, rho_u: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let (mut x, mut u) = (0.0, 0.0);
    for _ in 0..BURN_IN {
        x = rho_x * x + normal(&mut r);
        u = rho_u * u + normal(&mut r);
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        x = rho_x * x + normal(&mut r);
        u = rho_u * u + normal(&mut r);
        xs.push(x);
        ys.push(1.0 + 0.5 * x + u);
    }
    (ys, xs)
}

fn draw(r: &mut Xoshiro256PlusPlus, chol: &DMatrix<f64>) -> DVector<f64> {
    let z = DVector::from_fn(chol.nrows(), |_, _| normal(r));
    chol * z
}

/// Parameters of a VECM with restricted constant:
/// `dy_t = alpha (beta' y_{t-1} + rho) + sum_i gamma_i dy_{t-i} + e_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct VecmTruth {
    pub alpha: DMatrix<f64>,
    pub beta: DMatrix<f64>,
    pub rho: DVector<f64>,
    pub gamma: Vec<DMatrix<f64>>,
    pub sigma: DMatrix<f64>,
}

impl VecmTruth {
    /// Three rate series (compound, aave, dydx order) with two long-run
    /// relations `y1 = 1.151 y3 + 0.030` and `y2 = 0.991 y3 + 0.005`.
    /// The first series does not adjust (it carries the common trend); the
    /// second and third adjust to the first relation at 0.38 and 0.28.
    /// Five lags in levels, so four short-run matrices (only the first is
    /// non-zero).
    pub fn reference() -> VecmTruth {
        let beta = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, -1.151, -0.991]);
        let alpha = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 0.38, -0.5, 0.28, 0.0]);
        let rho = DVector::from_vec(vec![-0.030, -0.005]);
        let mut gamma = vec![DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, 0.1, 0.1]))];
        gamma.extend((0..3).map(|_| DMatrix::zeros(3, 3)));
        let corr = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.2, 0.3, 1.0, 0.3, 0.2, 0.3, 1.0]);
        VecmTruth { alpha, beta, rho, gamma, sigma: corr * 1e-4 }
    }

    pub fn k(&self) -> usize {
        self.alpha.nrows()
    }

    /// Lag order of the implied levels VAR.
    pub fn lags(&self) -> usize {
        self.gamma.len() + 1
    }

    /// Simulate `n` observations (rows) after a burn-in.
    pub fn simulate(&self, n: usize, seed: u64) -> DMatrix<f64> {
        let k = self.k();
        let mut r = rng(seed);
        let chol = self.sigma.clone().cholesky().expect("sigma positive definite").l();
        let q = self.gamma.len();
        let mut level = DVector::<f64>::zeros(k);
        // start on the attractor: y3 = 0, y1 = -rho1, y2 = -rho2
        for j in 0..self.beta.ncols() {
            level[j] = -self.rho[j];
        }
        let mut diffs: Vec<DVector<f64>> = vec![DVector::zeros(k); q];
        let mut out = DMatrix::zeros(n, k);
        for t in 0..BURN_IN + n {
            let ect = self.beta.transpose() * &level + &self.rho;
            let mut dy = &self.alpha * ect + draw(&mut r, &chol);
            for (g, d) in self.gamma.iter().zip(&diffs) {
                dy += g * d;
            }
            level += &dy;
            if q > 0 {
                diffs.rotate_right(1);
                diffs[0] = dy;
            }
            if t >= BURN_IN {
                out.row_mut(t - BURN_IN).copy_from(&level.transpose());
            }
        }
        out
    }

    /// The true parameters packaged as a fit (for analytic checks).
    pub fn as_fit(&self) -> VecmFit {
        VecmFit::from_parts(
            self.alpha.clone(),
            self.beta.clone(),
            self.rho.clone(),
            self.gamma.clone(),
            self.sigma.clone(),
        )
    }
}

/// Stationary VAR(p) `y_t = sum_i a_i y_{t-i} + e_t`, `e ~ N(0, sigma)`.
pub fn stationary_var(a: &[DMatrix<f64>], sigma: &DMatrix<f64>, n: usize, seed: u64) -> DMatrix<f64> {
    let k = sigma.nrows();
    let mut r = rng(seed);
    let chol = sigma.clone().cholesky().expect("sigma positive definite").l();
    let mut hist: Vec<DVector<f64>> = vec![DVector::zeros(k); a.len()];
    let mut out = DMatrix::zeros(n, k);
    for t in 0..BURN_IN + n {
        let mut y = draw(&mut r, &chol);
        for (ai, h) in a.iter().zip(&hist) {
            y += ai * h;
        }
        if !hist.is_empty() {
            hist.rotate_right(1);
            hist[0] = y.clone();
        }
        if t >= BURN_IN {
            out.row_mut(t - BURN_IN).copy_from(&y.transpose());
        }
    }
    out
}

/// `k` independent Gaussian random walks.
pub fn random_walks(k: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let mut out = DMatrix::zeros(n, k);
    for j in 0..k {
        let mut level = 0.0;
        for t in 0..n {
            level += normal(&mut r);
            out[(t, j)] = level;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_truth_is_stable() {
        let t = VecmTruth::reference();
        let m = DMatrix::identity(2, 2) + t.beta.transpose() * &t.alpha;
        let ev = m.complex_eigenvalues();
        assert!(ev.iter().all(|z| z.norm() < 1.0));
        let mut moduli: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        assert!((moduli[0] - 0.5).abs() < 1e-12 && (moduli[1] - 0.678).abs() < 1e-3);
    }

    #[test]
    fn generators_are_seeded() {
        let t = VecmTruth::reference();
        assert_eq!(t.simulate(50, 3), t.simulate(50, 3));
        assert_ne!(t.simulate(50, 3), t.simulate(50, 4));
        assert_eq!(uip_sample(10, 0.0, 1.0, 0.1, 1), uip_sample(10, 0.0, 1.0, 0.1, 1));
        assert_eq!(random_walks(2, 30, 9).shape(), (30, 2));
    }
}
