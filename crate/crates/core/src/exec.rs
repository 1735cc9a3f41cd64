//! Execution strategy for the batch workloads (certification, grid searches,
//! sweeps, scenario fan-out).
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or with [`Execution::Sequential`], everything runs on the caller's
//! thread. Results are identical either way: reductions used here are
//! order-independent (min/max with deterministic tie-breaking) or collect in input
//! order.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Map `f` over `0..n`, preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
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

    /// Minimum of `f(i)` over `0..n` (NaN-free inputs assumed); `+∞` for `n == 0`.
    pub fn min_range<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).fold(f64::INFINITY, f64::min),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n)
                .into_par_iter()
                .map(f)
                .reduce(|| f64::INFINITY, f64::min),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64).collect();
        let seq = Execution::Sequential.map(&xs, |x| x * 2.0);
        let def = Execution::default().map(&xs, |x| x * 2.0);
        assert_eq!(seq, def);
        let m1 = Execution::Sequential.min_range(xs.len(), |i| xs[i] - 3.0);
        let m2 = Execution::default().min_range(xs.len(), |i| xs[i] - 3.0);
        assert_eq!(m1, m2);
        assert_eq!(m1, -3.0);
    }
}
