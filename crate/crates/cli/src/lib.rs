//! Configuration, scenario runs and reports for `shintani-forge`.

pub mod config;
pub mod expr;
pub mod report;
pub mod run;

pub use config::{ConfigError, ScenarioConfig, EXAMPLE_JSON};
pub use expr::{parse_element, ExprError};
pub use report::{Check, Outcome, VerificationReport, Witness};
pub use run::{run_command, run_scenario, Command, RunOptions};
