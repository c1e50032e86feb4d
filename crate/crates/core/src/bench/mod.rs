//! Graph generators and the experiment runner.

mod config;
mod generators;
mod runner;

pub use config::{ExperimentConfig, Mode};
pub use generators::{gen_er, gen_random_tree, grid, line, regular_tree_ball, star, GeneratorSpec};
pub use runner::{run_experiment, AggregateRow, ExperimentReport, MethodEstimate, TrialRecord};
