//! Experiment configuration, the four reference presets, and the pipeline
//! geometry → mesh → data → assembly → solve → error.

mod config;
mod run;

pub use config::{parse_config, preset, ExperimentConfig, SurfaceSpec};
pub use run::{estimate_memory_bytes, run_experiment, sweep, ExperimentReport, Problem, SweepCell, Timings};
