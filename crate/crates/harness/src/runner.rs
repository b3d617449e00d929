//! Replica execution on a work-stealing pool.
//!
//! Each replica is a pure task of its index; the pool only decides where it
//! runs, and results come back in index order.

use rayon::prelude::*;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone)]
pub struct ReplicaRun<T> {
    /// `(replica, value)` for the replicas that succeeded, in index order.
    pub results: Vec<(u32, T)>,
    /// `(replica, message)` for the ones that did not.
    pub failures: Vec<(u32, String)>,
}

impl<T> ReplicaRun<T> {
    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.results.iter().map(|(_, v)| v)
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {workers} workers: {e}")))
}

/// Runs `task(0..count)` on `workers` threads (0 = pool default). Failed
/// replicas are kept out of the results; more than `budget * count` of them
/// aborts the run.
pub fn run_replicas<T, F>(count: usize, workers: usize, budget: f64, task: F) -> Result<ReplicaRun<T>>
where
    T: Send,
    F: Fn(u32) -> rmtlab_core::Result<T> + Sync,
{
    let outcomes: Vec<rmtlab_core::Result<T>> =
        pool(workers)?.install(|| (0..count as u32).into_par_iter().map(&task).collect());
    let mut results = Vec::with_capacity(count);
    let mut failures = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(v) => results.push((i as u32, v)),
            Err(e) => failures.push((i as u32, e.to_string())),
        }
    }
    check_budget(failures.len(), count, budget, &failures)?;
    Ok(ReplicaRun { results, failures })
}

fn check_budget(failed: usize, total: usize, budget: f64, failures: &[(u32, String)]) -> Result<()> {
    if failed as f64 > budget * total as f64 {
        return Err(HarnessError::FailureBudget {
            failed,
            total,
            budget,
            reason: failures.first().map(|(i, m)| format!("replica {i}: {m}")).unwrap_or_default(),
        });
    }
    Ok(())
}
