use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::evaluation::{evaluate_seed, EvalConditions};
use super::protocol::{derive_seed, stream, Protocol};
use super::training::TrainingOutcome;
use crate::architecture::LayerHandles;
use crate::engine::{CompartmentParams, NetworkSpec};
use crate::error::{Error, Result};

/// Post-WTA accuracy at one noise level, per seed and summarized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Percent.
    pub level: f64,
    pub per_seed: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl CurvePoint {
    fn new(level: f64, per_seed: Vec<f64>) -> Self {
        let n = per_seed.len().max(1) as f64;
        CurvePoint {
            level,
            mean: per_seed.iter().sum::<f64>() / n,
            min: per_seed.iter().copied().fold(f64::INFINITY, f64::min),
            max: per_seed.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            per_seed,
        }
    }
}

/// 0, 10, ..., 130 percent.
pub fn default_input_noise_levels() -> Vec<f64> {
    (0..14).map(|i| i as f64 * 10.0).collect()
}

/// 0, 5, ..., 50 percent.
pub fn default_neuron_noise_levels() -> Vec<f64> {
    (0..11).map(|i| i as f64 * 5.0).collect()
}

fn accuracy(trials: &[super::evaluation::TrialTally]) -> f64 {
    if trials.is_empty() {
        return 0.0;
    }
    trials.iter().filter(|t| t.post_wta == Some(t.pattern)).count() as f64 / trials.len() as f64
}

/// Accuracy with uncorrelated input spikes added at each level.
pub fn sweep_input_noise(
    net: &NetworkSpec,
    h: &LayerHandles,
    trained: &TrainingOutcome,
    protocol: &Protocol,
    levels: &[f64],
) -> Result<Vec<CurvePoint>> {
    levels
        .iter()
        .map(|&level| {
            let cond = EvalConditions {
                duration: protocol.sweep_eval_duration,
                input_noise_percent: level,
            };
            let per_seed = protocol
                .seeds
                .iter()
                .map(|&seed| {
                    evaluate_seed(net, h, trained, protocol, &protocol.patterns, cond, seed)
                        .map(|t| accuracy(&t))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CurvePoint::new(level, per_seed))
        })
        .collect()
}

/// How parameter noise is applied to the feature neurons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeuronNoise {
    /// Per-step current noise amplitude, as a multiple of the jitter level
    /// times the neuron's nominal threshold.
    pub current_noise_scale: f64,
}

impl Default for NeuronNoise {
    fn default() -> Self {
        NeuronNoise {
            current_noise_scale: 1.0,
        }
    }
}

/// A copy of `net` whose feature neurons carry parameter noise at
/// `level` percent: thresholds and biases scaled by independent factors
/// drawn uniformly from `1 ± level/100`, plus uniform per-step current
/// noise.
pub fn jitter_features(
    net: &NetworkSpec,
    h: &LayerHandles,
    level: f64,
    noise: NeuronNoise,
    seed: u64,
) -> Result<NetworkSpec> {
    if !(0.0..100.0).contains(&level) {
        return Err(Error::precondition(format!("jitter level {level}% outside [0, 100)")));
    }
    let f = level / 100.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |x: i32| -> i32 {
        if f == 0.0 {
            return x;
        }
        (x as f64 * (1.0 + rng.random_range(-f..=f))).round() as i32
    };
    let mut params = Vec::with_capacity(h.feature.len());
    let mut currents = Vec::with_capacity(h.feature.len());
    for id in h.feature.ids() {
        let p = *net
            .params(id)
            .ok_or_else(|| Error::structural(format!("feature neuron {id} has no parameters")))?;
        let jittered = CompartmentParams {
            threshold: draw(p.threshold).max(1),
            bias: draw(p.bias),
            ..p
        };
        params.push((id, jittered));
        let amp = (f * noise.current_noise_scale * p.threshold as f64).round() as i32;
        currents.push((id, net.noise_amplitude(id) + amp));
    }
    net.with_overrides(&params, &currents)
}

/// Accuracy of the trained weights on networks with jittered feature
/// neurons. Each seed draws its own jitter once and keeps it for all
/// patterns of that seed.
pub fn sweep_neuron_noise(
    net: &NetworkSpec,
    h: &LayerHandles,
    trained: &TrainingOutcome,
    protocol: &Protocol,
    levels: &[f64],
    noise: NeuronNoise,
) -> Result<Vec<CurvePoint>> {
    let cond = EvalConditions {
        duration: protocol.sweep_eval_duration,
        input_noise_percent: 0.0,
    };
    levels
        .iter()
        .map(|&level| {
            let per_seed = protocol
                .seeds
                .iter()
                .map(|&seed| {
                    let noisy = jitter_features(net, h, level, noise, derive_seed(seed, stream::JITTER))?;
                    evaluate_seed(&noisy, h, trained, protocol, &protocol.patterns, cond, seed)
                        .map(|t| accuracy(&t))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CurvePoint::new(level, per_seed))
        })
        .collect()
}
