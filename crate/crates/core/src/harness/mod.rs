//! Testing tools: concurrent history recording, a linearizability checker
//! against the sequential oracle, scripted race scenarios, stress runs and
//! the quiescent tree walker.

pub mod checker;
pub mod history;
#[cfg(feature = "hooks")]
pub mod scenario;
pub mod stress;
pub mod walk;

pub use checker::{check_linearizable, Verdict};
pub use history::{record_history, History};
pub use stress::{run_stress, StressConfig};
pub use walk::{quiescent_walk, WalkReport};
