//! Library side of the scenario runner, kept separate from the binary so
//! the file formats and orchestration are testable in-process.

pub mod report;
pub mod runner;
pub mod scenario;

pub use report::RunReport;
pub use runner::{run_scenario, ExitStatus};
pub use scenario::{load_scenario, save_scenario, Scenario};
