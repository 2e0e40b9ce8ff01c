//! Batch front end for the routing-games solvers: scenario files in,
//! deterministic result bundles out.

// `!(x > 0.0)` rejects NaN in scenario validation; `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod report;
pub mod reproduction;
pub mod runner;
pub mod scenario;

pub use reproduction::{reproduce, Check, ReproReport};
pub use runner::{run_scenario, run_scenario_file, Overrides, RunError, RunSummary, TaskStatus};
pub use scenario::{DocSpec, LatencySpec, NetworkSpec, Scenario, SolverKnobs, Task};
