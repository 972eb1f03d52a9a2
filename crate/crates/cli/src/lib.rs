//! Command implementations for the batch CLI: identity suites over seeded
//! random instances, nearest-point and weight reports from family files,
//! the two-pipeline fiber count, and the descent check. Reports are
//! deterministic for a fixed (config, input) pair apart from a timing field.

pub mod report;
pub mod run;

pub use run::{run, Command, RunConfig};
