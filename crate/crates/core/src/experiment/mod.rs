//! Config-driven experiment runner.

mod config;
mod report;
mod run;
mod seeds;

pub use config::{ExperimentConfig, FieldTrialSettings, RateAnchor, Scenario, SweepConfig, TomographyConfig};
pub use report::{emit_plot_data, PlotTarget, ProcessResult, RunReport, SkrResult, StateRow};
pub use run::{execute, run};
pub use seeds::{named_rng, named_seed};
