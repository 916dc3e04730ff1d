//! Scenario files, query execution and reports for the `fpf` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod random;
pub mod report;
pub mod scenario;

pub use error::CliError;
pub use random::{random_scenario, QueryKind};
pub use report::{run, Report};
pub use scenario::{parse_scenario, parse_scenario_with, Query, QuerySpec, Scenario, ScenarioSpec};

/// Version tag written into scenario and report files.
pub const SCHEMA_VERSION: u32 = 1;
