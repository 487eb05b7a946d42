//! Order-preserving data parallelism over independent items.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or with [`Execution::Sequential`], items run in order on the
//! calling thread. Results always come back in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run items concurrently.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Like [`map`] but stops at the first error in input order.
pub fn try_map<T, R, E, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(items, exec, f).into_iter().collect()
}

/// Sizes the global pool. Only the first call has an effect; returns false
/// if the pool was already initialized or the build is sequential.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map(&items, Execution::Sequential, |x| x * x);
        let par = map(&items, Execution::Parallel, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(par[999], 999 * 999);
    }

    #[test]
    fn first_error_in_order() {
        let items: Vec<i32> = (0..100).collect();
        let r: Result<Vec<i32>, i32> = try_map(&items, Execution::Parallel, |&x| {
            if x % 30 == 29 {
                Err(x)
            } else {
                Ok(x)
            }
        });
        assert_eq!(r, Err(29));
    }
}
