use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dcveb::bench::{adapter_names, emit_csv, run_workload, WorkloadConfig};

/// Runs the getter/inserter/remover/successor workload and prints mean
/// per-thread times.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Getter threads.
    #[arg(long, short = 'g', default_value_t = 4)]
    getters: usize,
    /// Inserter threads.
    #[arg(long, short = 'i', default_value_t = 4)]
    inserters: usize,
    /// Remover threads.
    #[arg(long, short = 'r', default_value_t = 4)]
    removers: usize,
    /// Successor-search threads.
    #[arg(long, short = 's', default_value_t = 4)]
    successors: usize,
    /// Calls per thread.
    #[arg(long, short = 'z', default_value_t = 100_000)]
    ops: usize,
    /// Keys are drawn from [0, key-range).
    #[arg(long, short = 'm', default_value_t = 1_000_000)]
    key_range: u64,
    /// Structures to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "dcveb")]
    structure: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Also write per-thread timings here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut results = Vec::new();
    for structure in &args.structure {
        let config = WorkloadConfig {
            getters: args.getters,
            inserters: args.inserters,
            removers: args.removers,
            successors: args.successors,
            ops: args.ops,
            key_range: args.key_range,
            structure: structure.clone(),
            seed: args.seed,
            repeats: args.repeats,
        };
        match run_workload(&config) {
            Ok(result) => {
                println!("{result}");
                results.push(result);
            }
            Err(e) => {
                eprintln!("error: {e}");
                eprintln!("structures: {}", adapter_names().join(", "));
                return ExitCode::FAILURE;
            }
        }
    }
    if let Some(path) = &args.csv {
        if let Err(e) = emit_csv(&results, path) {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
        println!("wrote {}", path.display());
    }
    ExitCode::SUCCESS
}
