//! Scenario documents, command dispatch and reports for the `ontolab` binary.

pub mod doc;
pub mod model;
pub mod report;
pub mod run;

pub use doc::{emit_scenario, parse_scenario, DocError, ScenarioDoc};
pub use report::{ReportDoc, ReportRow, Status};
pub use run::{run_command, CliError, RunFlags, Verb};
