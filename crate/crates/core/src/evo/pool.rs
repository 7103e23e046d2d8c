//! Master-slave evaluation: a fixed number of worker threads pull tasks from a
//! shared counter; the call returns once every task is done.

use super::fitness::FitnessRecord;
use crate::error::{Error, Result};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Scores gene vectors. Implementations must be deterministic in `(genes, seed)`.
pub trait Evaluator: Sync {
    fn evaluate(&self, genes: &[f64], seed: u64) -> Result<FitnessRecord>;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64], u64) -> Result<FitnessRecord> + Sync,
{
    fn evaluate(&self, genes: &[f64], seed: u64) -> Result<FitnessRecord> {
        self(genes, seed)
    }
}

/// Evaluates every `(genes, seed)` task on `workers` threads. Results keep task
/// order; a panicking evaluation becomes an error for that task only.
pub fn evaluate_all<E: Evaluator + ?Sized>(
    evaluator: &E,
    tasks: &[(&[f64], u64)],
    workers: usize,
) -> Vec<Result<FitnessRecord>> {
    parallel_map(tasks.len(), workers, |i| evaluator.evaluate(tasks[i].0, tasks[i].1))
}

/// Runs `job(0..n)` on up to `workers` threads and returns the results in
/// index order.
pub fn parallel_map<T, F>(n: usize, workers: usize, job: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let run = |i: usize| -> Result<T> {
        catch_unwind(AssertUnwindSafe(|| job(i)))
            .unwrap_or_else(|_| Err(Error::Evaluation(format!("worker panicked on task {i}"))))
    };
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        return (0..n).map(run).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = run(i);
                slots.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
        .into_iter()
        .map(|r| r.expect("every task is claimed"))
        .collect()
}
