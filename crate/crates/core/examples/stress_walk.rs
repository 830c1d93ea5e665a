//! Mixed-workload stress run followed by a full structural walk.

use std::time::Duration;

use dcveb::harness::stress::{run_stress, StressConfig};
use dcveb::harness::walk::quiescent_walk;
use dcveb::DcvebArray;

fn main() {
    let config = StressConfig {
        getters: 4,
        inserters: 4,
        removers: 4,
        successors: 4,
        ops_per_thread: 50_000,
        key_range: 100_000,
        time_cap: Duration::from_secs(60),
        ..StressConfig::default()
    };
    match run_stress(&config) {
        Ok((report, elapsed)) => {
            println!("{report} ({elapsed:.1?})");
            for v in &report.violations {
                println!("  {v:?}");
            }
        }
        Err(e) => println!("stress run failed: {e}"),
    }

    // A dense block of 64^2 keys needs exactly 1 + 64 internal nodes.
    let dense = DcvebArray::new();
    for k in 0..4096 {
        dense.insert(k, k).unwrap();
    }
    let walk = quiescent_walk(&dense);
    println!("dense 0..4096: {walk}");
}
