//! A dynamic concurrent van Emde Boas array: a concurrent ordered map over
//! 63-bit integer keys with lock-free lookups and successor queries, plus
//! the tools used to test and measure it.
//!
//! - [`DcvebArray`] is the map.
//! - [`index_math`] holds the key and summary-bit arithmetic.
//! - [`oracle`] is a sequential reference model.
//! - [`harness`] records concurrent histories, checks them for
//!   linearizability, runs stress tests and walks the tree for invariants.
//! - [`bench`] drives the getter/inserter/remover/successor workload.

pub mod array;
pub mod bench;
pub mod error;
pub mod harness;
pub mod index_math;
pub mod oracle;

pub use array::{CapacitySnapshot, DcvebArray, Entry};
pub use error::{Error, Result};
pub use index_math::{Branching, MAX_KEY};
pub use oracle::{Op, OpResult, OracleSet};
