use rayon::prelude::*;

use crate::simulator::derive_seed;

/// Run `reps` independent replications in parallel. Replication `i` gets
/// the seed `derive_seed(root, i)`; results keep replication order, so the
/// output does not depend on thread scheduling.
pub fn replicate<T, F>(reps: usize, root: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    (0..reps as u64).into_par_iter().map(|i| f(derive_seed(root, i))).collect()
}

/// Fraction of `true` values.
pub fn rate(hits: &[bool]) -> f64 {
    if hits.is_empty() {
        return 0.0;
    }
    hits.iter().filter(|&&h| h).count() as f64 / hits.len() as f64
}

/// Sample mean and (n - 1) standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_seeds_are_deterministic() {
        let a = replicate(64, 5, |s| s);
        let b = replicate(64, 5, |s| s);
        assert_eq!(a, b);
        assert_eq!(a[3], derive_seed(5, 3));
        assert_eq!(rate(&[true, false, true, true]), 0.75);
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
    }
}
