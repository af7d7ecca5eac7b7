//! Initial measures, Monte Carlo trials and the statistics built on them.

mod experiment;
mod measure;
pub mod rng;
mod stats;

pub use experiment::{
    generic_offsets, monte_carlo, run_trial, summarize, sweep, Criterion, Estimate, Experiment, ExperimentSpec,
    GraphSpec, MonteCarlo, Summary, Sweep, SweepPoint, SweepRow, TrialStats,
};
pub use measure::{sample, MeasureSpec};
pub use stats::{
    enclosure_probability, positive_correlation_check, random_domain, zero_cylinder_decay, CorrelationReport,
    DecayPoint, DecayReport, EnclosureReport, Event,
};
