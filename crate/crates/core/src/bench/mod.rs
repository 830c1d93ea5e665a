//! Fixed-work throughput runs: four thread groups (getters, inserters,
//! removers, successor searchers), each thread performing the same number
//! of calls on one shared structure, timed per thread.

mod adapters;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Barrier};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use adapters::{adapter_names, make_adapter, DynamicSet};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown structure {0:?} (known: {known})", known = adapter_names().join(", "))]
    UnknownStructure(String),
    #[error("invalid workload: {0}")]
    InvalidConfig(String),
    #[error("writing {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Getters,
    Inserters,
    Removers,
    Successors,
}

impl Group {
    pub const ALL: [Group; 4] = [
        Group::Getters,
        Group::Inserters,
        Group::Removers,
        Group::Successors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Getters => "getters",
            Group::Inserters => "inserters",
            Group::Removers => "removers",
            Group::Successors => "successors",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkloadConfig {
    pub getters: usize,
    pub inserters: usize,
    pub removers: usize,
    pub successors: usize,
    /// Calls per thread.
    pub ops: usize,
    /// Keys are drawn uniformly from `[0, key_range)`.
    pub key_range: u64,
    pub structure: String,
    pub seed: u64,
    pub repeats: usize,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        WorkloadConfig {
            getters: 1,
            inserters: 1,
            removers: 1,
            successors: 1,
            ops: 1_000,
            key_range: 1_000,
            structure: "dcveb".into(),
            seed: 0,
            repeats: 1,
        }
    }
}

impl WorkloadConfig {
    pub fn count(&self, group: Group) -> usize {
        match group {
            Group::Getters => self.getters,
            Group::Inserters => self.inserters,
            Group::Removers => self.removers,
            Group::Successors => self.successors,
        }
    }

    pub fn threads(&self) -> usize {
        Group::ALL.iter().map(|&g| self.count(g)).sum()
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.threads() == 0 {
            return Err(BenchError::InvalidConfig("at least one thread is needed".into()));
        }
        if self.ops == 0 {
            return Err(BenchError::InvalidConfig("ops must be at least 1".into()));
        }
        if self.key_range == 0 {
            return Err(BenchError::InvalidConfig("key range must be at least 1".into()));
        }
        if self.key_range - 1 > crate::MAX_KEY {
            return Err(BenchError::InvalidConfig("key range exceeds 2^63".into()));
        }
        if self.repeats == 0 {
            return Err(BenchError::InvalidConfig("repeats must be at least 1".into()));
        }
        if !adapter_names().contains(&self.structure.as_str()) {
            return Err(BenchError::UnknownStructure(self.structure.clone()));
        }
        Ok(())
    }
}

/// Wall time of one thread's full loop.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreadTiming {
    pub repeat: usize,
    pub group: Group,
    /// Index within the group.
    pub thread: usize,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub config: WorkloadConfig,
    pub timings: Vec<ThreadTiming>,
    /// Arithmetic mean over every thread of every repeat.
    pub mean_millis: f64,
    pub group_mean_millis: BTreeMap<Group, f64>,
}

impl RunResult {
    pub fn group_mean(&self, group: Group) -> Option<f64> {
        self.group_mean_millis.get(&group).copied()
    }
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        write!(
            f,
            "{}: g={} i={} r={} s={} z={} m={} repeats={} mean {:.3} ms",
            c.structure,
            c.getters,
            c.inserters,
            c.removers,
            c.successors,
            c.ops,
            c.key_range,
            c.repeats,
            self.mean_millis
        )?;
        for (group, mean) in &self.group_mean_millis {
            write!(f, "\n  {group:<10} {mean:.3} ms")?;
        }
        Ok(())
    }
}

/// Keys thread `index` of `group` uses, identical for every structure.
pub fn thread_keys(config: &WorkloadConfig, group: Group, index: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(((group as u64) << 32) | index as u64);
    (0..config.ops)
        .map(|_| rng.gen_range(0..config.key_range))
        .collect()
}

pub fn run_workload(config: &WorkloadConfig) -> Result<RunResult, BenchError> {
    config.validate()?;
    let plan: Vec<(Group, usize, Arc<Vec<u64>>)> = Group::ALL
        .iter()
        .flat_map(|&g| (0..config.count(g)).map(move |i| (g, i)))
        .map(|(g, i)| (g, i, Arc::new(thread_keys(config, g, i))))
        .collect();

    let mut timings = Vec::with_capacity(plan.len() * config.repeats);
    for repeat in 0..config.repeats {
        let set = make_adapter(&config.structure)
            .ok_or_else(|| BenchError::UnknownStructure(config.structure.clone()))?;
        let start = Barrier::new(plan.len());
        let set = &*set;
        let start = &start;
        let measured: Vec<ThreadTiming> = std::thread::scope(|scope| {
            let handles: Vec<_> = plan
                .iter()
                .map(|(group, thread, keys)| {
                    let (group, thread, keys) = (*group, *thread, Arc::clone(keys));
                    scope.spawn(move || {
                        start.wait();
                        let began = Instant::now();
                        run_group(set, group, &keys, thread as u64);
                        ThreadTiming {
                            repeat,
                            group,
                            thread,
                            millis: began.elapsed().as_secs_f64() * 1e3,
                        }
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench worker panicked"))
                .collect()
        });
        timings.extend(measured);
    }

    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let all: Vec<f64> = timings.iter().map(|t| t.millis).collect();
    let group_mean_millis = Group::ALL
        .iter()
        .filter_map(|&g| {
            let xs: Vec<f64> = timings
                .iter()
                .filter(|t| t.group == g)
                .map(|t| t.millis)
                .collect();
            (!xs.is_empty()).then(|| (g, mean(&xs)))
        })
        .collect();
    Ok(RunResult {
        config: config.clone(),
        mean_millis: if all.is_empty() { 0.0 } else { mean(&all) },
        timings,
        group_mean_millis,
    })
}

fn run_group(set: &dyn DynamicSet, group: Group, keys: &[u64], tag: u64) {
    match group {
        Group::Getters => {
            for &k in keys {
                std::hint::black_box(set.get(k));
            }
        }
        Group::Inserters => {
            for &k in keys {
                set.insert(k, tag);
            }
        }
        Group::Removers => {
            for &k in keys {
                set.delete(k);
            }
        }
        Group::Successors => {
            for &k in keys {
                std::hint::black_box(set.successor(k));
            }
        }
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "structure", "g", "i", "r", "s", "z", "m", "seed", "repeat", "group", "thread", "millis",
];

/// Writes one row per thread per repeat, ordered by structure, repeat,
/// group and thread.
pub fn emit_csv(results: &[RunResult], path: &Path) -> Result<(), BenchError> {
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rows: Vec<(&RunResult, &ThreadTiming)> = results
        .iter()
        .flat_map(|r| r.timings.iter().map(move |t| (r, t)))
        .collect();
    rows.sort_by(|(ra, ta), (rb, tb)| {
        (&ra.config.structure, ta.repeat, ta.group, ta.thread).cmp(&(
            &rb.config.structure,
            tb.repeat,
            tb.group,
            tb.thread,
        ))
    });

    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (r, t) in rows {
        let c = &r.config;
        w.write_record([
            c.structure.clone(),
            c.getters.to_string(),
            c.inserters.to_string(),
            c.removers.to_string(),
            c.successors.to_string(),
            c.ops.to_string(),
            c.key_range.to_string(),
            c.seed.to_string(),
            t.repeat.to_string(),
            t.group.to_string(),
            t.thread.to_string(),
            format!("{:.3}", t.millis),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(structure: &str) -> WorkloadConfig {
        WorkloadConfig {
            structure: structure.into(),
            ..WorkloadConfig::default()
        }
    }

    #[test]
    fn smoke_run_on_every_adapter() {
        for name in adapter_names() {
            let r = run_workload(&small(name)).unwrap();
            assert_eq!(r.timings.len(), 4);
            assert!(r.mean_millis > 0.0);
            let mean = r.timings.iter().map(|t| t.millis).sum::<f64>() / 4.0;
            assert!((r.mean_millis - mean).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_structure_is_rejected() {
        assert!(matches!(
            run_workload(&small("btree")),
            Err(BenchError::UnknownStructure(_))
        ));
    }

    #[test]
    fn bad_counts_are_rejected() {
        for cfg in [
            WorkloadConfig { ops: 0, ..small("dcveb") },
            WorkloadConfig { key_range: 0, ..small("dcveb") },
            WorkloadConfig { repeats: 0, ..small("dcveb") },
            WorkloadConfig {
                getters: 0,
                inserters: 0,
                removers: 0,
                successors: 0,
                ..small("dcveb")
            },
        ] {
            assert!(matches!(run_workload(&cfg), Err(BenchError::InvalidConfig(_))));
        }
    }

    #[test]
    fn key_sequences_depend_only_on_seed_group_and_index() {
        let a = small("dcveb");
        let b = small("locked-oracle");
        assert_eq!(thread_keys(&a, Group::Getters, 0), thread_keys(&b, Group::Getters, 0));
        assert_ne!(thread_keys(&a, Group::Getters, 0), thread_keys(&a, Group::Getters, 1));
        assert_ne!(thread_keys(&a, Group::Getters, 0), thread_keys(&a, Group::Removers, 0));
    }

    #[test]
    fn repeats_multiply_rows() {
        let cfg = WorkloadConfig {
            getters: 2,
            inserters: 0,
            removers: 0,
            successors: 1,
            repeats: 2,
            ..small("dcveb")
        };
        let r = run_workload(&cfg).unwrap();
        assert_eq!(r.timings.len(), 6);
        assert_eq!(r.group_mean(Group::Inserters), None);
        assert!(r.group_mean(Group::Getters).is_some());
    }

    #[test]
    fn csv_rows_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.csv");
        emit_csv(&[], &empty).unwrap();
        assert_eq!(
            std::fs::read_to_string(&empty).unwrap(),
            "structure,g,i,r,s,z,m,seed,repeat,group,thread,millis\n"
        );

        let cfg = WorkloadConfig { repeats: 2, ..small("dcveb") };
        let results = [run_workload(&small("locked-oracle")).unwrap(), run_workload(&cfg).unwrap()];
        let path = dir.path().join("runs.csv");
        emit_csv(&results, &path).unwrap();
        let mut reader = csv::Reader::from_path(&path).unwrap();
        let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 4 + 8);
        assert_eq!(&rows[0][0], "dcveb");
        assert_eq!(&rows[0][8], "0");
        assert_eq!(&rows[4][8], "1");
        assert_eq!(&rows[0][9], "getters");
        assert_eq!(&rows[3][9], "successors");
        assert_eq!(&rows[8][0], "locked-oracle");
    }

    #[test]
    fn csv_errors_carry_path() {
        let err = emit_csv(&[], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
