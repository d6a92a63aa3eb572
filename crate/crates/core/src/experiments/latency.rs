use serde::{Deserialize, Serialize};

use super::driver::{dominant, Driver};
use super::protocol::{derive_seed, stream, Protocol};
use super::training::TrainingOutcome;
use crate::architecture::LayerHandles;
use crate::engine::{NetworkSpec, SimState};
use crate::error::Result;
use crate::events::synthesize;

/// First step `t >= from` such that group `target` holds the strictly
/// greatest trailing-`window` count at every step from `t` to the end of
/// `series` (`[group][step]`). Returned relative to `from`.
pub fn dominance_onset(series: &[Vec<u16>], window: usize, target: usize, from: usize) -> Option<usize> {
    let n = series.first().map_or(0, Vec::len);
    if from >= n || target >= series.len() {
        return None;
    }
    let prefix: Vec<Vec<u64>> = series
        .iter()
        .map(|s| {
            let mut p = Vec::with_capacity(n + 1);
            p.push(0);
            for &c in s {
                p.push(p.last().unwrap() + c as u64);
            }
            p
        })
        .collect();
    let mut counts = vec![0u64; series.len()];
    let mut onset = n;
    for t in (from..n).rev() {
        let lo = (t + 1).saturating_sub(window);
        for (c, p) in counts.iter_mut().zip(&prefix) {
            *c = p[t + 1] - p[lo];
        }
        if dominant(&counts) != Some(target) {
            break;
        }
        onset = t;
    }
    (onset < n).then(|| onset - from)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchLatency {
    pub seed: u64,
    pub from: usize,
    pub to: usize,
    /// `None` when the new pattern's group never settled into dominance.
    pub steps: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub learning_convergence_steps: Vec<Option<u64>>,
    pub recognition_switch_steps: Vec<SwitchLatency>,
}

impl LatencyReport {
    /// Switches between two different patterns.
    pub fn cross_switches(&self) -> impl Iterator<Item = &SwitchLatency> {
        self.recognition_switch_steps.iter().filter(|s| s.from != s.to)
    }
}

/// Convergence of every training episode, and the recognition latency of
/// every ordered pattern pair (self-pairs included) for every protocol
/// seed. A pair shows `from` for `switch_hold` steps, then `to` for as
/// long, each presentation opening with the motor pulse.
pub fn measure_latencies(
    net: &NetworkSpec,
    h: &LayerHandles,
    trained: &TrainingOutcome,
    protocol: &Protocol,
) -> Result<LatencyReport> {
    let p = protocol.patterns.len();
    let mut switches = Vec::new();
    for &seed in &protocol.seeds {
        for a in 0..p {
            for b in 0..p {
                let steps = switch_latency(net, h, trained, protocol, seed, a, b)?;
                switches.push(SwitchLatency {
                    seed,
                    from: a,
                    to: b,
                    steps,
                });
            }
        }
    }
    Ok(LatencyReport {
        learning_convergence_steps: trained.episodes.iter().map(|e| e.convergence_steps).collect(),
        recognition_switch_steps: switches,
    })
}

/// Steps after the switch from pattern `a` to pattern `b` until `b`'s
/// group dominates the trailing output count for good.
pub fn switch_latency(
    net: &NetworkSpec,
    h: &LayerHandles,
    trained: &TrainingOutcome,
    protocol: &Protocol,
    seed: u64,
    a: usize,
    b: usize,
) -> Result<Option<u64>> {
    let Some(target) = trained.labels.iter().position(|&l| l == Some(b)) else {
        return Ok(None);
    };
    let pair = (a * protocol.patterns.len() + b) as u64;
    let base = derive_seed(seed, stream::SWITCH + pair);
    let hold = protocol.switch_hold;
    let first = synthesize(&protocol.patterns[a], hold, derive_seed(base, 0))?;
    let second = synthesize(&protocol.patterns[b], hold, derive_seed(base, 1))?;
    let mut driver = Driver::with_state(net, h, SimState::new(net, derive_seed(base, 2)));
    driver.simulator_mut().set_weights(trained.weights())?;
    let before = driver.present(&first, protocol.motor_steps)?;
    let after = driver.present(&second, protocol.motor_steps)?;
    let series: Vec<Vec<u16>> = before
        .outputs
        .iter()
        .zip(&after.outputs)
        .map(|(x, y)| x.iter().chain(y).copied().collect())
        .collect();
    Ok(dominance_onset(&series, protocol.latency_window, target, hold).map(|s| s as u64))
}
