//! Scenario files, the pipeline behind the `weakdamp` binary, and its reports.

pub mod config;
pub mod plot;
pub mod report;
pub mod run;

pub use config::{builtin_scenario, builtin_scenarios, parse_config, ScenarioConfig};
pub use report::{Certification, RunReport};
pub use run::{certify_scenario, run_scenario, run_scenarios, write_outputs, ScenarioRun};
