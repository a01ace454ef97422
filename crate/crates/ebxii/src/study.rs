//! Multi-threaded study runner.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use ebxii_core::sim::aggregate;
use ebxii_core::{FitResult, Result, Scenario, StudyReport};

/// Worker count: `threads` if non-zero, else the available parallelism.
pub fn worker_count(threads: usize) -> usize {
    if threads > 0 {
        threads
    } else {
        thread::available_parallelism().map_or(1, |n| n.get())
    }
}

/// Runs every `(n, r)` replication of `scenario` on `threads` workers (see
/// [`worker_count`]). Outcomes are merged in `(n, r)` order, so the report
/// equals the serial [`ebxii_core::run_study`] whatever the schedule.
pub fn run_study_parallel(scenario: &Scenario, threads: usize) -> StudyReport {
    if scenario.replications == 0 {
        return StudyReport::default();
    }
    let reps = scenario.replications;
    let jobs: Vec<(usize, usize)> = scenario
        .sizes
        .iter()
        .flat_map(|&n| (0..reps).map(move |r| (n, r)))
        .collect();
    let next = AtomicUsize::new(0);
    let done: Mutex<Vec<(usize, Result<FitResult>)>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = worker_count(threads).min(jobs.len());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                let mut local = Vec::new();
                loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&(n, r)) = jobs.get(k) else { break };
                    local.push((k, scenario.run_replication(n, r)));
                }
                done.lock()
                    .expect("no worker panics while holding the lock")
                    .extend(local);
            });
        }
    });
    let mut done = done.into_inner().expect("workers finished");
    done.sort_by_key(|(k, _)| *k);
    let mut outcomes = done.into_iter().map(|(_, o)| o);
    let rows = scenario
        .sizes
        .iter()
        .map(|&n| {
            let chunk: Vec<_> = outcomes.by_ref().take(reps).collect();
            aggregate(scenario, n, &chunk)
        })
        .collect();
    StudyReport { rows }
}

/// Runs several scenarios one after another, each in parallel.
pub fn run_all(scenarios: &[Scenario], threads: usize) -> StudyReport {
    let rows = scenarios
        .iter()
        .flat_map(|s| run_study_parallel(s, threads).rows)
        .collect();
    StudyReport { rows }
}
