//! Work partitioning for branch enumeration.
//!
//! Enumeration is split into a fixed list of chunks; chunks may run on the
//! rayon pool, but their results are always merged sequentially in chunk
//! order, so floating-point output is bit-identical across thread counts and
//! across the parallel and sequential paths.

/// How to execute chunked enumeration work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    /// Single-threaded, chunk by chunk.
    Sequential,
    /// Chunks on the rayon pool. Falls back to sequential without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this build can actually run chunks concurrently.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Evaluates `f` on `0..n`, returning results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// `map` followed by an in-order fold.
    pub fn map_fold<T, A, F, G>(self, n: usize, f: F, init: A, mut merge: G) -> A
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
        G: FnMut(A, T) -> A,
    {
        let mut acc = init;
        for part in self.map(n, f) {
            acc = merge(acc, part);
        }
        acc
    }
}
