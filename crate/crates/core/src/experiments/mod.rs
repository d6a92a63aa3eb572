//! Training and evaluation protocol, noise sweeps, latency and resource
//! reports. Every experiment is a pure function of its configuration and
//! seeds.

mod driver;
mod evaluation;
mod latency;
mod protocol;
mod report;
mod scalability;
mod state;
mod sweeps;
mod training;

pub use driver::{dominant, ActivityLog, Driver};
pub use evaluation::{
    assemble, evaluate_seed, run_evaluation, Confusion, EvalConditions, EvalReport, TrialTally,
};
pub use latency::{dominance_onset, measure_latencies, switch_latency, LatencyReport, SwitchLatency};
pub use protocol::{default_patterns, derive_seed, experiment_pattern, novel_pattern, Protocol};
pub use report::{
    confusion_table, curve_table, latency_table, scalability_table, seedset_hash, table_csv,
    trajectory_table, trials_table, ReportSink,
};
pub use scalability::{report_scalability, ScalabilityRow};
pub use state::TrainedState;
pub use sweeps::{
    default_input_noise_levels, default_neuron_noise_levels, jitter_features, sweep_input_noise,
    sweep_neuron_noise, CurvePoint, NeuronNoise,
};
pub use training::{
    run_training, tracked_offsets, train_patterns, Episode, PresentationOutcome, TrainingOutcome,
    TrajectorySample,
};
