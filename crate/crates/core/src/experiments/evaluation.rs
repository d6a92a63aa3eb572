use serde::{Deserialize, Serialize};

use super::driver::{dominant, Driver};
use super::latency::dominance_onset;
use super::protocol::{derive_seed, stream, Protocol};
use super::training::TrainingOutcome;
use crate::architecture::LayerHandles;
use crate::engine::{NetworkSpec, SimState};
use crate::error::{Error, Result};
use crate::events::{inject_noise, synthesize, SynthPattern};

/// Counts of true class (rows) against decided class (columns). The last
/// column counts trials without a decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl Confusion {
    pub fn new(classes: Vec<String>) -> Self {
        let n = classes.len();
        Confusion {
            classes,
            counts: vec![vec![0; n + 1]; n],
        }
    }

    pub fn no_decision_column(&self) -> usize {
        self.classes.len()
    }

    pub fn record(&mut self, truth: usize, decided: Option<usize>) {
        let col = decided.unwrap_or(self.no_decision_column());
        self.counts[truth][col] += 1;
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.row_sums().iter().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Trace over total; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.correct() as f64 / n as f64,
        }
    }

    /// Counts outside the diagonal, the no-decision column included.
    pub fn off_diagonal(&self) -> u64 {
        self.total() - self.correct()
    }
}

/// Spike tallies and decisions of one evaluation trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTally {
    pub seed: u64,
    pub pattern: usize,
    /// Output spikes per group over the whole trial.
    pub output_spikes: Vec<u64>,
    pub wta_spikes: Vec<u64>,
    /// Output and WTA spikes per group in the decision window.
    pub window_output_spikes: Vec<u64>,
    pub window_wta_spikes: Vec<u64>,
    pub pre_wta: Option<usize>,
    pub post_wta: Option<usize>,
    /// Steps from trial start until the correct group dominates for good.
    pub onset_steps: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion_pre_wta: Confusion,
    pub confusion_post_wta: Confusion,
    /// Post-WTA accuracy.
    pub accuracy: f64,
    pub accuracy_pre_wta: f64,
    pub trials: Vec<TrialTally>,
    /// Recognition onset of every trial that settled on its class.
    pub latency_samples: Vec<u64>,
    /// Learning convergence of every training episode.
    pub convergence_steps: Vec<Option<u64>>,
}

impl EvalReport {
    /// Post-WTA accuracy over the trials of one seed.
    pub fn accuracy_for_seed(&self, seed: u64) -> f64 {
        let trials: Vec<_> = self.trials.iter().filter(|t| t.seed == seed).collect();
        if trials.is_empty() {
            return 0.0;
        }
        let ok = trials.iter().filter(|t| t.post_wta == Some(t.pattern)).count();
        ok as f64 / trials.len() as f64
    }
}

/// Conditions of an evaluation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConditions {
    pub duration: usize,
    /// Uncorrelated input spikes, as a percentage of the pattern's own.
    pub input_noise_percent: f64,
}

/// Evaluate the protocol's patterns once per protocol seed.
pub fn run_evaluation(
    net: &NetworkSpec,
    h: &LayerHandles,
    trained: &TrainingOutcome,
    protocol: &Protocol,
) -> Result<EvalReport> {
    let cond = EvalConditions {
        duration: protocol.eval_duration,
        input_noise_percent: 0.0,
    };
    let mut trials = Vec::new();
    for &seed in &protocol.seeds {
        trials.extend(evaluate_seed(net, h, trained, protocol, &protocol.patterns, cond, seed)?);
    }
    Ok(assemble(trained, protocol.labels(), trials))
}

/// One trial per pattern for `seed`, each from a resting network carrying
/// the trained weights. Class ids are indices into `patterns`; predicted
/// classes are the training labels of the winning groups.
pub fn evaluate_seed(
    net: &NetworkSpec,
    h: &LayerHandles,
    trained: &TrainingOutcome,
    protocol: &Protocol,
    patterns: &[SynthPattern],
    cond: EvalConditions,
    seed: u64,
) -> Result<Vec<TrialTally>> {
    if cond.duration == 0 {
        return Err(Error::precondition("evaluation duration must be positive"));
    }
    let mut out = Vec::with_capacity(patterns.len());
    for (pi, pattern) in patterns.iter().enumerate() {
        let k = pi as u64;
        let mut input = synthesize(pattern, cond.duration, derive_seed(seed, stream::EVAL_INPUT + k))?;
        if cond.input_noise_percent > 0.0 {
            input = inject_noise(
                &input,
                cond.input_noise_percent,
                derive_seed(seed, stream::EVAL_NOISE + k),
            )?;
        }
        let state = SimState::new(net, derive_seed(seed, stream::EVAL_STATE + k));
        let mut driver = Driver::with_state(net, h, state);
        driver.simulator_mut().set_weights(trained.weights())?;
        let log = driver.present(&input, protocol.motor_steps)?;

        let n = log.len();
        let window = n.saturating_sub(protocol.decision_window)..n;
        let window_out = log.output_counts(window.clone());
        let window_wta = log.wta_counts(window);
        let class_of = |g: Option<usize>| g.and_then(|g| trained.labels[g]);
        let target = trained.labels.iter().position(|&l| l == Some(pi));
        out.push(TrialTally {
            seed,
            pattern: pi,
            output_spikes: log.output_counts(0..n),
            wta_spikes: log.wta_counts(0..n),
            pre_wta: class_of(dominant(&window_out)),
            post_wta: class_of(dominant(&window_wta)),
            window_output_spikes: window_out,
            window_wta_spikes: window_wta,
            onset_steps: target
                .and_then(|g| dominance_onset(&log.outputs, protocol.latency_window, g, 0))
                .map(|s| s as u64),
        });
    }
    Ok(out)
}

/// Confusion matrices and summary figures over `trials`.
pub fn assemble(trained: &TrainingOutcome, classes: Vec<String>, trials: Vec<TrialTally>) -> EvalReport {
    let mut pre = Confusion::new(classes.clone());
    let mut post = Confusion::new(classes);
    for t in &trials {
        pre.record(t.pattern, t.pre_wta);
        post.record(t.pattern, t.post_wta);
    }
    EvalReport {
        accuracy: post.accuracy(),
        accuracy_pre_wta: pre.accuracy(),
        confusion_pre_wta: pre,
        confusion_post_wta: post,
        latency_samples: trials.iter().filter_map(|t| t.onset_steps).collect(),
        convergence_steps: trained.episodes.iter().map(|e| e.convergence_steps).collect(),
        trials,
    }
}
