//! Scenario files, benchmark setups, run orchestration and output.

pub mod config;
pub mod output;
pub mod run;
pub mod scenario;
pub mod verify;

pub use config::{load_scenario, parse_face, ScenarioConfig};
pub use run::{run, RunSummary};
pub use scenario::{initial_field, Scenario};
