//! Scenario files, suite orchestration, report emission and the `warplab`
//! command line on top of `warplab-core`.
//!
//! A run parses a scenario, executes the selected check suites on a rayon
//! pool and renders the resulting [`bundle::ReportBundle`] as a table or as
//! CSV files. Results are independent of the worker count.

pub mod bundle;
pub mod config;
pub mod error;
pub mod exec;
pub mod scenarios;
pub mod suite;

pub use bundle::{ExitStatus, ReportBundle};
pub use config::{emit_config, parse_config, Scenario};
pub use error::{Error, Result};
pub use exec::RayonExecutor;
pub use suite::{run_suite, sweep, Suite};
