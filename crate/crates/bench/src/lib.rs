//! Harness that reruns the numerical experiments for the Nyström solvers and
//! prints error and EOC tables.
//!
//! [`registry`] holds the examples and their published tables,
//! [`runner::run_example`] solves an example for a list of orders, and
//! [`report::emit_table`] renders the result as CSV or markdown.

pub mod error;
pub mod registry;
pub mod report;
pub mod rng;
pub mod runner;
pub mod sampling;

pub use error::{BenchError, Result};
pub use registry::{ExampleId, ExampleSpec, TargetRow};
pub use report::{emit_table, parse_csv, ConvergenceReport, ReportMetadata, ReportRow, TableFormat};
pub use rng::SplitMix64;
pub use runner::{run_example, RunOptions};
pub use sampling::{sample_interior_points, INTERIOR_BAND, SAMPLING_BUDGET};
