use nalgebra::{DMatrix, DVector};
use plflab_core::econometrics::synthetic::{ar1_errors_sample, random_walks, VecmTruth};
use plflab_core::econometrics::{johansen, newey_west, ols, white};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn newey_west_is_symmetric_psd(seed in any::<u64>(), n in 12usize..200, lags in 0usize..12) {
        let (y, x) = ar1_errors_sample(n, 0.7, -0.4, seed);
        let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
        let fit = ols(&design, &DVector::from_vec(y)).unwrap();
        let cov = newey_west(&design, &fit.residuals, lags.min(n - 1)).unwrap();
        prop_assert_eq!(&cov, &cov.transpose());
        prop_assert!(cov.clone().symmetric_eigenvalues().min() >= -1e-10);
        if lags == 0 {
            let hc0 = white(&design, &fit.residuals).unwrap();
            prop_assert!((&cov - &hc0).amax() <= 1e-10 * hc0.amax());
        }
    }

    #[test]
    fn trace_statistics_non_increasing(seed in any::<u64>(), p in 1usize..4, walks in any::<bool>()) {
        let y = if walks { random_walks(3, 150, seed) } else { VecmTruth::reference().simulate(150, seed) };
        let j = johansen(&y, p).unwrap();
        prop_assert!(j.trace.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(j.rank <= 3);
    }
}
