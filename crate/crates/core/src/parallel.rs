//! Index-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] runs on the
//! rayon pool; without it, every execution mode runs sequentially. Results
//! are always returned in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub fn map_indices<R, F>(count: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
        _ => (0..count).map(f).collect(),
    }
}

/// Runs `f` on a dedicated pool of `threads` workers. Without the `parallel`
/// feature, `f` simply runs on the current thread.
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let seq = map_indices(100, Execution::Sequential, |i| i * i);
        let par = map_indices(100, Execution::Parallel, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }

    #[test]
    fn pinned_pool_gives_same_order() {
        let one = with_threads(1, || map_indices(50, Execution::Parallel, |i| i + 1));
        let four = with_threads(4, || map_indices(50, Execution::Parallel, |i| i + 1));
        assert_eq!(one, four);
    }
}
