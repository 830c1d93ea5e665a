//! A small run of the getter/inserter/remover/successor workload on every
//! adapter, with per-thread timings written to CSV.

use dcveb::bench::{adapter_names, emit_csv, run_workload, WorkloadConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut results = Vec::new();
    for name in adapter_names() {
        let config = WorkloadConfig {
            getters: 2,
            inserters: 2,
            removers: 2,
            successors: 2,
            ops: 20_000,
            key_range: 100_000,
            structure: name.to_string(),
            seed: 3,
            repeats: 2,
        };
        let result = run_workload(&config)?;
        println!("{result}");
        results.push(result);
    }
    let path = std::env::temp_dir().join("dcveb-bench-example.csv");
    emit_csv(&results, &path)?;
    println!("per-thread rows in {}", path.display());
    Ok(())
}
