use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{Bar, Jiggle, Shape, SynthPattern};

/// How patterns are presented during training, evaluation and the
/// latency and noise experiments. All durations are in timesteps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Protocol {
    /// Patterns in presentation order. Class `i` is `patterns[i]`.
    pub patterns: Vec<SynthPattern>,
    pub train_duration: usize,
    pub eval_duration: usize,
    /// Evaluation length per trial inside the noise sweeps.
    pub sweep_eval_duration: usize,
    /// The motor neuron fires on this many steps at the start of every
    /// presentation, which places one motor pulse between consecutive
    /// patterns.
    pub motor_steps: usize,
    /// Trailing window the classification reads.
    pub decision_window: usize,
    /// Trailing window of the dominance test behind the latencies.
    pub latency_window: usize,
    /// Steps each pattern of a switch pair is shown.
    pub switch_hold: usize,
    /// Weight trajectories are sampled every this many steps.
    pub trajectory_stride: usize,
    /// Seed of the training run.
    pub train_seed: u64,
    /// One evaluation trial per pattern and seed.
    pub seeds: Vec<u64>,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            patterns: default_patterns(),
            train_duration: 4000,
            eval_duration: 10_000,
            sweep_eval_duration: 2000,
            motor_steps: 160,
            decision_window: 400,
            latency_window: 100,
            switch_hold: 1000,
            trajectory_stride: 10,
            train_seed: 0,
            seeds: (1..=10).collect(),
        }
    }
}

impl Protocol {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("train_duration", self.train_duration),
            ("eval_duration", self.eval_duration),
            ("sweep_eval_duration", self.sweep_eval_duration),
            ("decision_window", self.decision_window),
            ("latency_window", self.latency_window),
            ("switch_hold", self.switch_hold),
            ("trajectory_stride", self.trajectory_stride),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::config(format!("protocol.{name}"), "must be positive"));
            }
        }
        if self.motor_steps > self.train_duration.min(self.eval_duration) {
            return Err(Error::config(
                "protocol.motor_steps",
                "must not exceed the presentation durations",
            ));
        }
        for (i, p) in self.patterns.iter().enumerate() {
            p.validate()
                .map_err(|e| Error::config(format!("protocol.patterns[{i}]"), e.to_string()))?;
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<String> {
        self.patterns.iter().map(|p| p.shape.to_string()).collect()
    }
}

/// Full-scale pattern with the dither and event rate the experiments use.
pub fn experiment_pattern(shape: Shape) -> SynthPattern {
    let mut p = SynthPattern::new(shape, 3, (0, 0));
    p.event_rate = 0.5;
    p.jiggle = Jiggle {
        amplitude: 1,
        period: 4,
    };
    p
}

/// Plus, H, T and L. Patterns that contain another one as a sub-window
/// (plus holds a T half and an L corner at the smaller scales) come first,
/// so they are learned before the smaller pattern could claim them.
pub fn default_patterns() -> Vec<SynthPattern> {
    [Shape::Plus, Shape::H, Shape::T, Shape::L]
        .into_iter()
        .map(experiment_pattern)
        .collect()
}

/// A pattern none of the default groups learns: two horizontal bars.
pub fn novel_pattern() -> SynthPattern {
    experiment_pattern(Shape::Custom(vec![Bar::h(0, 0, 4), Bar::h(4, 0, 4)]))
}

/// Independent seed for stream `stream` of `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Seed streams, kept apart so no two uses of one base seed collide.
pub(crate) mod stream {
    pub const TRAIN_INPUT: u64 = 1 << 32;
    pub const EVAL_STATE: u64 = 2 << 32;
    pub const EVAL_INPUT: u64 = 3 << 32;
    pub const EVAL_NOISE: u64 = 4 << 32;
    pub const JITTER: u64 = 5 << 32;
    pub const SWITCH: u64 = 6 << 32;
}
