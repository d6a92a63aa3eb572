//! Neuron and synapse parameter tables for the recognition network.
//!
//! Every struct deserializes with defaults for missing fields, so a run
//! configuration only needs to name the values it changes.

use serde::{Deserialize, Serialize};

use crate::engine::Decay;
use crate::plasticity::{NsmRule, PatternRule, Rate, TraceConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Tuning {
    pub feature: FeatureTuning,
    pub pathway: PathwayTuning,
    pub mapping: MappingTuning,
    pub output: OutputTuning,
    pub pattern_rule: PatternRuleTuning,
    pub wta: WtaTuning,
    pub arbitration: ArbitrationTuning,
    pub nsm: NsmTuning,
}

/// Bar-detecting convolution layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureTuning {
    /// `K`: weight on the three centre rows (columns for the vertical
    /// kernel).
    pub kernel_weight: i32,
    /// Magnitude of the inhibitory weight on the four outer rows, used
    /// when `balance_flanks` is off.
    pub flank_weight: i32,
    /// Give every feature neuron the flank weight that makes its kernel,
    /// clipped to the grid, sum to zero (`3K/4` away from the border).
    /// Uniform background activity then adds nothing to its mean drive.
    pub balance_flanks: bool,
    pub threshold: i32,
    pub current_decay: Decay,
    pub voltage_decay: Decay,
    pub refractory: u32,
}

impl Default for FeatureTuning {
    fn default() -> Self {
        FeatureTuning {
            kernel_weight: 16,
            flank_weight: 8,
            balance_flanks: true,
            threshold: 72,
            current_decay: Decay::FULL,
            voltage_decay: Decay::from_q12(2048).expect("valid"),
            refractory: 0,
        }
    }
}

/// Learning/recognition neurons and the down-scaling pools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathwayTuning {
    /// Negative bias that keeps learning neurons off unless gated.
    pub learning_bias: i32,
    /// Excitation from A6 that lifts the learning bias.
    pub learning_gate: i32,
    /// Inhibition of learning neurons by A3.
    pub learning_block: i32,
    /// Inhibition of recognition neurons by A6.
    pub recognition_block: i32,
    /// Coincident feature spikes a pooled cell (learning neuron or
    /// recognition pool) needs within one step.
    pub pool_threshold: i32,
}

impl Default for PathwayTuning {
    fn default() -> Self {
        PathwayTuning {
            learning_bias: -1000,
            learning_gate: 1000,
            learning_block: 10_000,
            recognition_block: 10_000,
            pool_threshold: 1,
        }
    }
}

/// ON/OFF mapping neurons. Both sides low-pass the same source spikes; ON
/// fires above a rate threshold, OFF below it. The OFF threshold sits a
/// little above zero so that a source firing on every other step, whose
/// low-passed drive rides right on the ON threshold, leaves OFF silent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingTuning {
    pub source_weight: i32,
    pub current_decay: Decay,
    pub on_threshold: i32,
    pub off_bias: i32,
    pub off_threshold: i32,
    pub refractory: u32,
}

impl Default for MappingTuning {
    fn default() -> Self {
        MappingTuning {
            source_weight: 16,
            current_decay: Decay::from_q12(256).expect("valid"),
            on_threshold: 128,
            off_bias: 8,
            off_threshold: 9,
            refractory: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputTuning {
    pub bias: i32,
    pub current_decay: Decay,
    pub voltage_decay: Decay,
    pub threshold: i32,
    pub refractory: u32,
    /// Weight of the stimulating neuron onto each output of its group.
    pub stim_weight: i32,
}

impl Default for OutputTuning {
    fn default() -> Self {
        OutputTuning {
            bias: -1544,
            current_decay: Decay::from_q12(512).expect("valid"),
            voltage_decay: Decay::FULL,
            threshold: 64,
            refractory: 1,
            stim_weight: 2400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternRuleTuning {
    pub rule: PatternRule,
    pub trace: TraceConfig,
}

impl Default for PatternRuleTuning {
    fn default() -> Self {
        PatternRuleTuning {
            rule: PatternRule {
                alpha: 2048,
                lambda: Rate::pow2(9),
                w_max: 64,
                w_min: -64,
            },
            trace: TraceConfig {
                impulse: 1.0,
                decay_tau: 8.0,
            },
        }
    }
}

/// Per-group winner-take-all neurons sharing one inhibitory neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WtaTuning {
    pub input_weight: i32,
    pub self_weight: i32,
    pub inhibition: i32,
    pub threshold: i32,
    pub current_decay: Decay,
    pub refractory: u32,
    /// Bias step between consecutive groups; lower ids win ties.
    pub tie_stagger: i32,
    pub inhibitor_drive: i32,
    pub inhibitor_threshold: i32,
}

impl Default for WtaTuning {
    fn default() -> Self {
        WtaTuning {
            input_weight: 96,
            self_weight: 100,
            inhibition: 100,
            threshold: 384,
            current_decay: Decay::from_q12(256).expect("valid"),
            refractory: 0,
            tie_stagger: 1,
            inhibitor_drive: 100,
            inhibitor_threshold: 64,
        }
    }
}

/// A1 to A6. All six are level units: a leaky current read out by a
/// memoryless membrane, so they fire on every step their drive is high.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArbitrationTuning {
    pub current_decay: Decay,
    pub threshold: i32,
    pub a1_bias: i32,
    pub a2_to_a1: i32,
    pub wta_to_a2: i32,
    pub wta_to_a4: i32,
    pub a1_to_a4: i32,
    pub a5_bias: i32,
    pub feature_to_a5: i32,
    pub a5_to_a4: i32,
    pub motor_to_a4: i32,
    pub motor_to_a3: i32,
    pub a4_to_a3: i32,
    pub select_to_a6: i32,
    pub a6_inhibition: i32,
}

impl Default for ArbitrationTuning {
    fn default() -> Self {
        ArbitrationTuning {
            current_decay: Decay::from_q12(1024).expect("valid"),
            threshold: 64,
            a1_bias: 32,
            a2_to_a1: 100,
            wta_to_a2: 100,
            wta_to_a4: 100,
            a1_to_a4: 100,
            a5_bias: 40,
            feature_to_a5: 4,
            a5_to_a4: 200,
            motor_to_a4: 200,
            motor_to_a3: 200,
            a4_to_a3: 100,
            select_to_a6: 100,
            a6_inhibition: 1000,
        }
    }
}

/// Neural state machine cascade: quiet timer, trigger, and per-group
/// latch units with a self-disabling input synapse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NsmTuning {
    pub timer_bias: i32,
    pub timer_voltage_decay: Decay,
    pub timer_threshold: i32,
    pub timer_inhibition: i32,
    pub end_to_timer: i32,
    pub trigger_drive: i32,
    pub trigger_inhibition: i32,
    /// Extra tap delay per group index, so the lowest enabled unit wins.
    pub tap_stagger: u32,
    pub latch_threshold: i32,
    pub latch_self: i32,
    pub pool_inhibition: i32,
    /// Current decay of the pool neuron; a slow decay keeps the latches
    /// inhibited across the hand-over from a falling latch to the end
    /// detector.
    pub pool_current_decay: Decay,
    pub suppress_inhibition: i32,
    pub relay_delay: u32,
    pub stim_delay: u32,
    /// Steps the end detector fires after the select neuron stops.
    pub end_window: u32,
    pub disable_rule: NsmRule,
    pub disable_trace: TraceConfig,
    pub disable_initial: i32,
    /// Weight of ordinary excitatory links inside the cascade.
    pub link: i32,
    pub link_threshold: i32,
    pub veto: i32,
}

impl Default for NsmTuning {
    fn default() -> Self {
        NsmTuning {
            timer_bias: 16,
            timer_voltage_decay: Decay::from_q12(64).expect("valid"),
            timer_threshold: 870,
            timer_inhibition: 32,
            end_to_timer: 256,
            trigger_drive: 100,
            trigger_inhibition: 1000,
            tap_stagger: 4,
            latch_threshold: 48,
            latch_self: 100,
            pool_inhibition: 100,
            pool_current_decay: Decay::from_q12(410).expect("valid"),
            suppress_inhibition: 1000,
            relay_delay: 10,
            stim_delay: 10,
            end_window: 40,
            disable_rule: NsmRule {
                alpha: 24_576,
                lambda: Rate::pow2(4),
                gamma: Rate::pow2(6),
                w_max: 64,
            },
            disable_trace: TraceConfig {
                impulse: 1.0 / 64.0,
                decay_tau: 512.0,
            },
            disable_initial: 64,
            link: 100,
            link_threshold: 64,
            veto: 1000,
        }
    }
}
