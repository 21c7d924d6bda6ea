//! Thread-pool executor for the core simulation routines.

use rayon::prelude::*;
use warplab_core::exec::Executor;

use crate::error::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "WARPLAB_THREADS";

/// Runs indexed jobs on a dedicated rayon pool. Results are collected in
/// index order, so the output does not depend on the worker count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// A pool with `threads` workers; `0` lets rayon choose.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(Self { pool })
    }

    /// A pool sized by `WARPLAB_THREADS`, or by rayon's default when unset.
    pub fn from_env() -> Result<Self> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .map_err(|_| crate::error::invalid(THREADS_ENV, "must be a nonnegative integer"))?,
            Err(_) => 0,
        };
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let f = &f;
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
