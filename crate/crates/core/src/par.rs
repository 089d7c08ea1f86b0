//! Data-parallel sweep helpers.
//!
//! With the `parallel` feature (default) the sweeps run on the rayon global
//! pool; without it they fall back to a plain sequential loop. Both paths
//! produce identical, index-ordered output; tasks must derive their own
//! randomness from the task index (see [`crate::rng::derive`]).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
pub fn indexed_map<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        indexed_map_seq(n, f)
    }
}

/// Sequential reference implementation of [`indexed_map`]. Always available
/// so benches can compare the two paths.
pub fn indexed_map_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Cap the rayon global pool at `n` threads. Must be called before any
/// parallel work; later calls are ignored. No-op without the feature.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |i: usize| (i * i) as u64;
        assert_eq!(indexed_map(100, f), indexed_map_seq(100, f));
    }
}
