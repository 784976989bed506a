//! Scenario runner for `biphoton-core`: JSON configs, sweeps, and the CSV,
//! SVG, JSON and snapshot writers.

pub mod checks;
pub mod config;
pub mod csv;
pub mod runner;
pub mod snapshot;
pub mod svg;

pub use config::{ConfigError, OutputKind, ScenarioSpec, SweepParam, SweepSpec};
pub use runner::{run_scenario, run_sweep, RunError, SweepReport};
