//! Trial-level execution, parallel when the `parallel` feature is on.
//!
//! Trials are independent work units whose randomness comes entirely from
//! their own substream, and results are collected in trial order, so the
//! outcome is identical across thread counts and identical to the
//! sequential fallback built without the feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `job` for trial indices `0..trials`, in order.
pub fn run_trials_sequential<T, F>(trials: u64, job: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..trials).map(job).collect()
}

/// Runs `job` over all trials, distributing across `threads` workers when
/// parallel execution is compiled in (`None` uses the global pool).
/// Results are returned in trial order regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn run_trials<T, F>(trials: u64, threads: Option<usize>, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    match threads {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("failed to build worker pool");
            pool.install(|| (0..trials).into_par_iter().map(&job).collect())
        }
        None => (0..trials).into_par_iter().map(&job).collect(),
    }
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn run_trials<T, F>(trials: u64, _threads: Option<usize>, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    run_trials_sequential(trials, job)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let out = run_trials(100, Some(4), |i| i * i);
        let expected: Vec<u64> = (0..100).map(|i| i * i).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let job = |i: u64| (i as f64 * 0.1).sin();
        let seq = run_trials_sequential(500, job);
        for threads in [None, Some(1), Some(8)] {
            assert_eq!(run_trials(500, threads, job), seq);
        }
    }
}
