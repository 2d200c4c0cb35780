//! Instance/radius generators and the batch experiment runner.

pub mod experiment;
pub mod generate;

pub use experiment::{
    run_experiment, run_trial, run_trials, write_outputs, ExperimentConfig, ExperimentSummary,
    Extraction, LinkStats, TrialGroup, TrialRecord,
};
pub use generate::{
    gen_instance, gen_radii, shortest_path_closure, Family, GeneratorSpec, RadiusMode, RadiusSpec,
};
