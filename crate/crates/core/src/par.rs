//! Data-parallel helpers with a sequential fallback.
//!
//! Every hot loop in the crate (grid convolutions, residual sweeps, batch
//! evolution, kernel sampling) goes through these helpers. With the
//! `parallel` feature enabled the default [`Execution`] is rayon-backed;
//! without it everything runs on the calling thread. Results are identical
//! either way: reductions are performed over fixed-size chunks whose partial
//! sums are combined in index order.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for ordered reductions. Fixed so that the summation order,
/// and therefore the rounding, does not depend on the thread count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `0..n`, preserving order.
    pub fn map<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Ordered complex sum of `f(i)` for `i in 0..n`.
    pub fn sum_complex<F>(self, n: usize, f: F) -> Complex64
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        let chunks = n.div_ceil(CHUNK);
        let partial = self.map(chunks, |c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).fold(Complex64::new(0.0, 0.0), |acc, i| acc + f(i))
        });
        partial
            .into_iter()
            .fold(Complex64::new(0.0, 0.0), |acc, p| acc + p)
    }

    /// Ordered real maximum of `f(i)`; NaN propagates.
    pub fn max_f64<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map(n, f).into_iter().fold(0.0_f64, |acc, v| {
            if v.is_nan() || acc.is_nan() {
                f64::NAN
            } else {
                acc.max(v)
            }
        })
    }
}

/// Caps the global rayon pool from the `LIEBR_THREADS` environment variable.
/// Returns the thread cap that was applied, if any.
pub fn configure_threads_from_env() -> Option<usize> {
    let n = std::env::var("LIEBR_THREADS")
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)?;
    #[cfg(feature = "parallel")]
    {
        // A second call (or a pool built elsewhere) is not an error for us.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_default_sums_agree_bitwise() {
        let f = |i: usize| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos());
        let a = Execution::Sequential.sum_complex(100_003, f);
        let b = Execution::default().sum_complex(100_003, f);
        assert_eq!(a, b);
    }

    #[test]
    fn map_preserves_order() {
        let v = Execution::default().map(10, |i| i * i);
        assert_eq!(v, vec![0, 1, 4, 9, 16, 25, 36, 49, 64, 81]);
    }

    #[test]
    fn max_propagates_nan() {
        assert!(Execution::Sequential
            .max_f64(3, |i| if i == 1 { f64::NAN } else { 1.0 })
            .is_nan());
    }
}
