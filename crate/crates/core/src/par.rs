//! Ordered data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over a rayon pool; results
//! are always returned in index order, so callers see identical output for
//! any thread count.

/// Worker count. `0` means "all available threads", `1` forces the
/// sequential path even when the `parallel` feature is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Jobs(pub usize);

impl Jobs {
    pub const SEQUENTIAL: Jobs = Jobs(1);
    pub const ALL: Jobs = Jobs(0);
}

impl Default for Jobs {
    fn default() -> Self {
        Jobs::ALL
    }
}

/// `(0..len).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(len: usize, jobs: Jobs, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if jobs.0 != 1 && len > 1 {
            use rayon::prelude::*;
            let run = || (0..len).into_par_iter().map(&f).collect();
            if jobs.0 == 0 {
                return run();
            }
            match rayon::ThreadPoolBuilder::new().num_threads(jobs.0).build() {
                Ok(pool) => return pool.install(run),
                Err(_) => return run(),
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    (0..len).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_jobs() {
        let seq = map_indexed(100, Jobs::SEQUENTIAL, |i| i * i);
        assert_eq!(seq, map_indexed(100, Jobs(3), |i| i * i));
        assert_eq!(seq, map_indexed(100, Jobs::ALL, |i| i * i));
        assert!(map_indexed(0, Jobs::ALL, |i| i).is_empty());
    }
}
