//! Replays the hook-steered two-thread races. Needs the `hooks` feature:
//!
//! ```text
//! cargo run --example scripted_races --features hooks
//! ```

use dcveb::harness::scenario::{scripted_scenario, SCENARIOS};

fn main() {
    for name in SCENARIOS {
        let report = scripted_scenario(name, 200, 11).expect("known scenario");
        println!(
            "{name}: {} iterations, {} failures",
            report.iterations,
            report.failures.len()
        );
        for f in report.failures.iter().take(3) {
            println!("  {f}");
        }
    }
}
