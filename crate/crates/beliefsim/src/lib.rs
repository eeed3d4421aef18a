//! Monte Carlo laboratory for stress-testing uncertain-inference
//! procedures against judgmental calibration error.
//!
//! The pipeline: draw a random true probability model over one hypothesis
//! and a handful of binary evidence nodes ([`model`]), derive a perturbed
//! belief model under a chosen error regime ([`noise`]), run five
//! belief-updating procedures on it ([`procedures`]), and score each
//! procedure's output against the truth with exact error measures
//! ([`metrics`]). The [`harness`] sweeps this over a ladder of error
//! ranges and thousands of cases; [`report`] renders the sweeps as CSV or
//! aligned-markdown tables.
//!
//! Every example under `examples/` exercises one capability end to end;
//! the `beliefsim` binary exposes the same sweeps as `simulate`,
//! `histogram` and `case` subcommands.

pub mod cli;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod noise;
pub mod procedures;
pub mod report;
pub mod stream;

pub use harness::{
    dump_case, histogram_data, run_case, run_sweep, run_sweep_detailed, run_sweep_serial,
    Scenario, ScenarioConfig, SweepResult,
};
pub use metrics::{DecisionThresholds, DprimePooling, MetricRecord};
pub use model::{ChainParameters, JointDistribution, Topology};
pub use noise::{BeliefModel, ErrorRange};
pub use procedures::{DropRule, Procedure, RelativeBeliefTable};
