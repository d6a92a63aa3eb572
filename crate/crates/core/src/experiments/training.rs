use serde::{Deserialize, Serialize};

use super::driver::{dominant, Driver};
use super::protocol::{derive_seed, stream, Protocol};
use crate::architecture::{group_weights, GroupWeights, LayerHandles, NsmRole};
use crate::engine::{NetworkSpec, SimState};
use crate::error::{Error, Result};
use crate::events::{synthesize, SynthPattern};
use crate::plasticity::Rule;

/// One NSM winning the competition for one pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub pattern: usize,
    pub group: usize,
    /// Simulator step of the group's first select spike.
    pub start_step: u64,
    /// Steps from `start_step` until every pattern weight of the group sat
    /// at a rail, if that happened during the presentation.
    pub convergence_steps: Option<u64>,
    /// Pattern weights at a rail when the presentation ended.
    pub railed_at_end: usize,
}

/// One sample of a learning group's weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub pattern: usize,
    pub group: usize,
    /// Relative to the episode start; negative before it.
    pub step: i64,
    pub at_max: usize,
    pub at_min: usize,
    pub mean: f64,
    /// A fixed selection of the group's weights, see [`tracked_offsets`].
    pub tracked: Vec<i32>,
}

/// What the network did with one training presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresentationOutcome {
    /// One group learned the pattern.
    Learned { group: usize },
    /// The pattern was already known: the WTA of its group fired.
    Recognized { group: usize },
    /// Novel, but every group was already taken.
    CapacityExhausted,
    /// Novel with a group free, yet no NSM won.
    NotLearned,
    /// More than one NSM won.
    MultipleWinners,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    /// Simulator state after the last presentation.
    pub state: SimState,
    pub episodes: Vec<Episode>,
    pub outcomes: Vec<PresentationOutcome>,
    /// Pattern each group learned, if any.
    pub labels: Vec<Option<usize>>,
    pub trajectory: Vec<TrajectorySample>,
}

impl TrainingOutcome {
    /// First pattern that found no free group.
    pub fn capacity_exhausted(&self) -> Option<usize> {
        self.outcomes
            .iter()
            .position(|o| *o == PresentationOutcome::CapacityExhausted)
    }

    pub fn weights(&self) -> &[i32] {
        self.state.weights()
    }
}

/// Offsets into a group's pattern weights that the trajectory tracks: a
/// spread over the first tuple, which sees a full-scale pattern.
pub fn tracked_offsets(cells_per_tuple: usize) -> Vec<usize> {
    (0..cells_per_tuple).step_by(7).collect()
}

fn rails(net: &NetworkSpec, gw: &GroupWeights) -> Result<(i32, i32)> {
    match net.plastic_synapses().get(gw.pattern.start).and_then(|s| net.rule(s.rule)) {
        Some(Rule::Pattern(r)) => Ok((r.w_min, r.w_max)),
        _ => Err(Error::structural("pattern synapse without a pattern rule")),
    }
}

/// Present every protocol pattern once, in order, starting from `state`.
pub fn run_training(
    net: &NetworkSpec,
    h: &LayerHandles,
    protocol: &Protocol,
    state: SimState,
) -> Result<TrainingOutcome> {
    train_patterns(net, h, protocol, &protocol.patterns, state, Vec::new())
}

/// Train `patterns` (class ids are their indices) continuing from a state
/// whose groups already carry `labels`.
pub fn train_patterns(
    net: &NetworkSpec,
    h: &LayerHandles,
    protocol: &Protocol,
    patterns: &[SynthPattern],
    state: SimState,
    labels: Vec<Option<usize>>,
) -> Result<TrainingOutcome> {
    let gws = group_weights(net, h)?;
    let mut labels = if labels.is_empty() { vec![None; h.n_groups] } else { labels };
    if labels.len() != h.n_groups {
        return Err(Error::precondition("one label slot per output group is required"));
    }
    let tracked = tracked_offsets(h.tuple_mapping(0).len());
    let mut driver = Driver::with_state(net, h, state);
    let mut episodes = Vec::new();
    let mut outcomes = Vec::new();
    let mut trajectory = Vec::new();

    for (pi, pattern) in patterns.iter().enumerate() {
        let input = synthesize(
            pattern,
            protocol.train_duration,
            derive_seed(protocol.train_seed, stream::TRAIN_INPUT + pi as u64),
        )?;
        let t0 = driver.simulator().time();
        // (group, start step, converged at, railed)
        let mut active: Vec<(usize, u64, Option<u64>, usize)> = Vec::new();
        let mut samples: Vec<(usize, u64, usize, usize, f64, Vec<i32>)> = Vec::new();
        let stride = protocol.trajectory_stride;
        let select_ids: Vec<_> = (0..h.n_groups)
            .map(|g| h.nsm_id(g, NsmRole::Select))
            .collect();
        let log = driver.present_with(&input, protocol.motor_steps, |t, spikes, w| {
            let now = t0 + t as u64;
            for (g, sel) in select_ids.iter().enumerate() {
                if spikes.binary_search(sel).is_ok() && !active.iter().any(|a| a.0 == g) {
                    active.push((g, now, None, 0));
                }
            }
            for a in active.iter_mut() {
                let gw = &gws[a.0];
                let ws = &w[gw.pattern.clone()];
                if a.2.is_none() || t % stride == 0 || t + 1 == input.duration() {
                    let (lo, hi) = rails(net, gw).unwrap_or((i32::MIN, i32::MAX));
                    let at_max = ws.iter().filter(|&&x| x == hi).count();
                    let at_min = ws.iter().filter(|&&x| x == lo).count();
                    a.3 = at_max + at_min;
                    if a.2.is_none() && a.3 == ws.len() {
                        a.2 = Some(now - a.1);
                    }
                    if t % stride == 0 {
                        let mean = ws.iter().map(|&x| x as f64).sum::<f64>() / ws.len() as f64;
                        let tr = tracked.iter().map(|&o| ws[o]).collect();
                        samples.push((a.0, now, at_max, at_min, mean, tr));
                    }
                }
            }
        })?;
        let start_of = |g: usize| active.iter().find(|a| a.0 == g).map(|a| a.1).unwrap_or(t0);
        for (g, now, at_max, at_min, mean, tr) in samples {
            trajectory.push(TrajectorySample {
                pattern: pi,
                group: g,
                step: now as i64 - start_of(g) as i64,
                at_max,
                at_min,
                mean,
                tracked: tr,
            });
        }
        let outcome = match active.len() {
            0 => {
                let n = log.len();
                let window = n.saturating_sub(protocol.decision_window)..n;
                match dominant(&log.wta_counts(window)) {
                    Some(g) if labels[g].is_some() => PresentationOutcome::Recognized { group: g },
                    _ if labels.iter().all(Option::is_some) => PresentationOutcome::CapacityExhausted,
                    _ => PresentationOutcome::NotLearned,
                }
            }
            1 => PresentationOutcome::Learned { group: active[0].0 },
            _ => PresentationOutcome::MultipleWinners,
        };
        for &(g, start, conv, railed) in &active {
            labels[g] = Some(pi);
            episodes.push(Episode {
                pattern: pi,
                group: g,
                start_step: start,
                convergence_steps: conv,
                railed_at_end: railed,
            });
        }
        outcomes.push(outcome);
    }

    Ok(TrainingOutcome {
        state: driver.into_state(),
        episodes,
        outcomes,
        labels,
        trajectory,
    })
}
