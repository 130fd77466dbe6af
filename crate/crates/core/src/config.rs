use std::sync::Arc;

use rayon::prelude::*;

/// Resource limits shared by the breadth-first searches and the exact length code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Estimated bytes of stored group elements before a search aborts.
    pub mem_limit_bytes: usize,
    /// Largest number of terminal groups accepted by the Steiner step.
    pub max_terminal_groups: usize,
    /// Largest bounding box (in lattice vertices) the Steiner step will fill.
    pub max_region_vertices: u128,
    /// Vertex budget for local searches (loop and path finding).
    pub search_budget: usize,
}

pub const DEFAULT_MEM_LIMIT: usize = 2 << 30;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            mem_limit_bytes: DEFAULT_MEM_LIMIT,
            max_terminal_groups: 10,
            max_region_vertices: 1 << 22,
            search_budget: 4_000_000,
        }
    }
}

impl Limits {
    pub fn with_mem_limit_mib(mut self, mib: usize) -> Self {
        self.mem_limit_bytes = mib.saturating_mul(1 << 20);
        self
    }
}

/// Worker pool handed to the parallel searches. Results never depend on the
/// number of threads.
#[derive(Clone, Debug, Default)]
pub struct Parallelism {
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Parallelism {
    pub fn sequential() -> Self {
        Parallelism { pool: None }
    }

    /// `threads == 0` picks the number of available cores.
    pub fn with_threads(threads: usize) -> Self {
        if threads == 1 {
            return Parallelism::sequential();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        Parallelism {
            pool: Some(Arc::new(pool)),
        }
    }

    pub fn threads(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    /// Order-preserving parallel map.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match &self.pool {
            None => items.iter().map(f).collect(),
            Some(pool) => pool.install(|| items.par_iter().map(f).collect()),
        }
    }
}
