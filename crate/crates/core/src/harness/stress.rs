use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, Barrier};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::walk::{quiescent_walk, WalkReport};
use crate::array::DcvebArray;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StressConfig {
    pub getters: usize,
    pub inserters: usize,
    pub removers: usize,
    pub successors: usize,
    pub ops_per_thread: usize,
    pub key_range: u64,
    pub branching: usize,
    pub seed: u64,
    pub time_cap: Duration,
}

impl Default for StressConfig {
    fn default() -> Self {
        StressConfig {
            getters: 2,
            inserters: 2,
            removers: 2,
            successors: 2,
            ops_per_thread: 10_000,
            key_range: 10_000,
            branching: 64,
            seed: 0,
            time_cap: Duration::from_secs(120),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StressError {
    #[error("{finished} of {threads} workers finished within {cap:?}; deadlock suspected")]
    DeadlockSuspected {
        finished: usize,
        threads: usize,
        cap: Duration,
    },
    #[error("a worker panicked")]
    WorkerPanicked,
    #[error(transparent)]
    Config(#[from] crate::error::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Getter,
    Inserter,
    Remover,
    Successor,
}

/// Runs the four thread groups against one array, waits for all of them,
/// then walks the result.
pub fn run_stress(config: &StressConfig) -> Result<(WalkReport, Duration), StressError> {
    let array = Arc::new(DcvebArray::with_branching(config.branching)?);
    let roles: Vec<Role> = [
        (Role::Getter, config.getters),
        (Role::Inserter, config.inserters),
        (Role::Remover, config.removers),
        (Role::Successor, config.successors),
    ]
    .into_iter()
    .flat_map(|(role, count)| std::iter::repeat_n(role, count))
    .collect();

    let started = Instant::now();
    let finished = run_workers(roles.len(), config.time_cap, |index| {
        let array = Arc::clone(&array);
        let role = roles[index];
        let (ops, range) = (config.ops_per_thread, config.key_range);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index as u64 + 1);
        move || {
            for i in 0..ops {
                let k = rng.gen_range(0..range);
                match role {
                    Role::Getter => {
                        std::hint::black_box(array.get(k));
                    }
                    Role::Inserter => array.insert(k, i as u64).expect("key in range"),
                    Role::Remover => array.delete(k),
                    Role::Successor => {
                        std::hint::black_box(array.successor(k));
                    }
                }
            }
        }
    })?;
    debug_assert_eq!(finished, roles.len());
    let elapsed = started.elapsed();
    Ok((quiescent_walk(&array), elapsed))
}

/// Spawns `threads` workers built by `make`, releases them together and
/// waits up to `cap` for all of them. Returns how many finished.
fn run_workers<F, W>(threads: usize, cap: Duration, mut make: F) -> Result<usize, StressError>
where
    F: FnMut(usize) -> W,
    W: FnOnce() + Send + 'static,
{
    let start = Arc::new(Barrier::new(threads + 1));
    let (done_tx, done_rx) = mpsc::channel();
    let mut handles = Vec::with_capacity(threads);
    for index in 0..threads {
        let work = make(index);
        let start = Arc::clone(&start);
        let done_tx = done_tx.clone();
        handles.push(std::thread::spawn(move || {
            start.wait();
            let ok = std::panic::catch_unwind(std::panic::AssertUnwindSafe(work)).is_ok();
            let _ = done_tx.send(ok);
        }));
    }
    drop(done_tx);
    start.wait();
    let deadline = Instant::now() + cap;
    let mut finished = 0;
    while finished < threads {
        let left = deadline.saturating_duration_since(Instant::now());
        match done_rx.recv_timeout(left) {
            Ok(true) => finished += 1,
            Ok(false) => return Err(StressError::WorkerPanicked),
            Err(_) => {
                // Leave stuck threads detached; joining would hang.
                return Err(StressError::DeadlockSuspected {
                    finished,
                    threads,
                    cap,
                });
            }
        }
    }
    for h in handles {
        h.join().map_err(|_| StressError::WorkerPanicked)?;
    }
    Ok(finished)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LivenessConfig {
    pub successor_threads: usize,
    pub churn_threads: usize,
    pub total_queries: u64,
    pub sentinel: u64,
    pub branching: usize,
    pub seed: u64,
    pub time_cap: Duration,
}

impl Default for LivenessConfig {
    fn default() -> Self {
        LivenessConfig {
            successor_threads: 4,
            churn_threads: 4,
            total_queries: 1_000_000,
            sentinel: 5_000,
            branching: 64,
            seed: 0,
            time_cap: Duration::from_secs(120),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LivenessReport {
    pub queries: u64,
    /// Queries at or below the sentinel that found nothing.
    pub misses: u64,
    /// Queries at or below the sentinel that returned a key above it.
    pub overshoots: u64,
    pub churn_ops: u64,
}

/// Keeps `sentinel` present while churn threads insert and delete keys on
/// both sides of it (never the sentinel itself) and successor threads query
/// keys at or below it.
pub fn run_successor_liveness(config: &LivenessConfig) -> Result<LivenessReport, StressError> {
    let array = Arc::new(DcvebArray::with_branching(config.branching)?);
    array.insert(config.sentinel, u64::MAX)?;
    let stop = Arc::new(AtomicBool::new(false));
    let misses = Arc::new(AtomicU64::new(0));
    let overshoots = Arc::new(AtomicU64::new(0));
    let churn_ops = Arc::new(AtomicU64::new(0));
    let per_thread = config.total_queries / config.successor_threads as u64;
    let queries = per_thread * config.successor_threads as u64;
    let sentinel = config.sentinel;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let churn: Vec<_> = (0..config.churn_threads)
        .map(|index| {
            let array = Arc::clone(&array);
            let stop = Arc::clone(&stop);
            let churn_ops = Arc::clone(&churn_ops);
            let mut rng = ChaCha8Rng::seed_from_u64(rng.gen());
            std::thread::spawn(move || {
                let mut count = 0;
                while !stop.load(Ordering::Relaxed) {
                    // Mostly below the sentinel, occasionally far above it to
                    // force growth and trimming.
                    let k = if rng.gen_bool(0.02) {
                        rng.gen_range(sentinel + 1..sentinel << 12)
                    } else {
                        rng.gen_range(0..2 * sentinel)
                    };
                    if k == sentinel {
                        continue;
                    }
                    if rng.gen_bool(0.5) {
                        array.insert(k, index as u64).expect("key in range");
                    } else {
                        array.delete(k);
                    }
                    count += 1;
                }
                churn_ops.fetch_add(count, Ordering::Relaxed);
            })
        })
        .collect();

    let result = run_workers(config.successor_threads, config.time_cap, |index| {
        let array = Arc::clone(&array);
        let misses = Arc::clone(&misses);
        let overshoots = Arc::clone(&overshoots);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index as u64 + 1);
        move || {
            let (mut miss, mut over) = (0, 0);
            for _ in 0..per_thread {
                let k = rng.gen_range(0..=sentinel);
                match array.successor(k) {
                    None => miss += 1,
                    Some(e) if e.key > sentinel => over += 1,
                    Some(_) => {}
                }
            }
            misses.fetch_add(miss, Ordering::Relaxed);
            overshoots.fetch_add(over, Ordering::Relaxed);
        }
    });
    stop.store(true, Ordering::Relaxed);
    result?;
    for h in churn {
        h.join().map_err(|_| StressError::WorkerPanicked)?;
    }
    Ok(LivenessReport {
        queries,
        misses: misses.load(Ordering::Relaxed),
        overshoots: overshoots.load(Ordering::Relaxed),
        churn_ops: churn_ops.load(Ordering::Relaxed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_mixed_run_is_clean() {
        let cfg = StressConfig {
            ops_per_thread: 20_000,
            key_range: 2_000,
            ..StressConfig::default()
        };
        let (report, _) = run_stress(&cfg).unwrap();
        assert!(report.is_clean(), "{:?}", report.violations);
    }

    #[test]
    fn single_thread_is_deterministic() {
        let cfg = StressConfig {
            getters: 0,
            inserters: 1,
            removers: 0,
            successors: 0,
            ops_per_thread: 5_000,
            key_range: 100_000,
            ..StressConfig::default()
        };
        let (a, _) = run_stress(&cfg).unwrap();
        let (b, _) = run_stress(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn readers_only_leave_structure_alone() {
        let cfg = StressConfig {
            getters: 4,
            inserters: 0,
            removers: 0,
            successors: 4,
            ops_per_thread: 5_000,
            ..StressConfig::default()
        };
        let (report, _) = run_stress(&cfg).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.element_count, 0);
        assert_eq!(report.internal_node_count, 1);
        assert_eq!(report.height, 1);
    }

    #[test]
    fn sequential_fill_stays_within_memory_bound() {
        let a = DcvebArray::with_branching(8).unwrap();
        for k in 0..3_000 {
            a.insert(k, ()).unwrap();
        }
        let r = quiescent_walk(&a);
        assert!(r.is_clean());
        assert_eq!(r.element_count, 3_000);
        assert!(r.internal_node_count as u128 <= (8u128.pow(4) - 1) / 7);
    }

    #[test]
    fn short_liveness_run() {
        let cfg = LivenessConfig {
            total_queries: 40_000,
            ..LivenessConfig::default()
        };
        let r = run_successor_liveness(&cfg).unwrap();
        assert_eq!(r.queries, 40_000);
        assert_eq!(r.misses, 0);
        assert_eq!(r.overshoots, 0);
    }
}
