use serde::{Deserialize, Serialize};

use crate::architecture::{Arb, LayerHandles, NsmControl, NsmRole};
use crate::engine::{NetworkSpec, NeuronId, SimState, Simulator};
use crate::error::Result;
use crate::events::BinnedInput;

/// Per-step activity of the populations the experiments read.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityLog {
    /// `[group][step]` output spike counts.
    pub outputs: Vec<Vec<u16>>,
    /// `[group][step]` WTA spikes.
    pub wta: Vec<Vec<bool>>,
    /// `[group][step]` select-neuron spikes.
    pub select: Vec<Vec<bool>>,
    pub learning: Vec<u16>,
    pub recognition: Vec<u16>,
    pub feature: Vec<u16>,
    /// `[arbitration neuron][step]`.
    pub arbitration: Vec<Vec<bool>>,
    pub trigger: Vec<bool>,
    /// Step at which each of this log's steps ran, in simulator time.
    pub start_time: u64,
}

impl ActivityLog {
    fn new(groups: usize, start_time: u64) -> Self {
        ActivityLog {
            outputs: vec![Vec::new(); groups],
            wta: vec![Vec::new(); groups],
            select: vec![Vec::new(); groups],
            arbitration: vec![Vec::new(); Arb::ALL.len()],
            start_time,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.learning.len()
    }

    pub fn is_empty(&self) -> bool {
        self.learning.is_empty()
    }

    pub fn groups(&self) -> usize {
        self.outputs.len()
    }

    /// Output spikes per group over `range` of this log's steps.
    pub fn output_counts(&self, range: std::ops::Range<usize>) -> Vec<u64> {
        self.outputs
            .iter()
            .map(|s| s[range.clone()].iter().map(|&c| c as u64).sum())
            .collect()
    }

    pub fn wta_counts(&self, range: std::ops::Range<usize>) -> Vec<u64> {
        self.wta
            .iter()
            .map(|s| s[range.clone()].iter().filter(|&&b| b).count() as u64)
            .collect()
    }

    pub fn arb(&self, a: Arb) -> &[bool] {
        &self.arbitration[a as usize]
    }

    /// Groups whose select neuron spiked at least once.
    pub fn selected_groups(&self) -> Vec<usize> {
        (0..self.groups())
            .filter(|&g| self.select[g].iter().any(|&b| b))
            .collect()
    }
}

/// Strictly greatest entry, or `None` on a tie for first or all zeros.
pub fn dominant(counts: &[u64]) -> Option<usize> {
    let (best, &max) = counts.iter().enumerate().max_by_key(|&(i, c)| (c, std::cmp::Reverse(i)))?;
    if max == 0 || counts.iter().filter(|&&c| c == max).count() > 1 {
        None
    } else {
        Some(best)
    }
}

/// Feeds inputs into a simulator and logs the activity of the network's
/// named populations.
pub struct Driver<'n> {
    sim: Simulator<'n>,
    h: &'n LayerHandles,
    external: Vec<NeuronId>,
    /// What each neuron id counts towards in the activity log.
    kinds: Vec<Kind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Other,
    Output(u16),
    Feature,
    Learning,
    Recognition,
    Arbitration(u8),
    Wta(u16),
    Trigger,
    Select(u16),
}

fn classify(net: &NetworkSpec, h: &LayerHandles) -> Vec<Kind> {
    let mut k = vec![Kind::Other; net.neuron_count()];
    let mut set = |id: NeuronId, kind| k[id.index()] = kind;
    for g in 0..h.n_groups {
        for o in h.group_outputs(g) {
            set(NeuronId(o as u32), Kind::Output(g as u16));
        }
        set(h.wta_id(g), Kind::Wta(g as u16));
        set(h.nsm_id(g, NsmRole::Select), Kind::Select(g as u16));
    }
    h.feature.ids().for_each(|i| set(i, Kind::Feature));
    h.learning.ids().for_each(|i| set(i, Kind::Learning));
    h.recognition.ids().for_each(|i| set(i, Kind::Recognition));
    for a in Arb::ALL {
        set(h.arb(a), Kind::Arbitration(a as u8));
    }
    set(h.control(NsmControl::Trigger), Kind::Trigger);
    k
}

impl<'n> Driver<'n> {
    pub fn new(net: &'n NetworkSpec, h: &'n LayerHandles, seed: u64) -> Self {
        Self::with_state(net, h, SimState::new(net, seed))
    }

    pub fn with_state(net: &'n NetworkSpec, h: &'n LayerHandles, state: SimState) -> Self {
        Driver {
            sim: Simulator::with_state(net, state),
            h,
            external: Vec::new(),
            kinds: classify(net, h),
        }
    }

    pub fn simulator(&self) -> &Simulator<'n> {
        &self.sim
    }

    pub fn simulator_mut(&mut self) -> &mut Simulator<'n> {
        &mut self.sim
    }

    pub fn state(&self) -> &SimState {
        self.sim.state()
    }

    pub fn into_state(self) -> SimState {
        self.sim.into_state()
    }

    /// Present `input` for its full duration with the motor neuron firing
    /// on the first `motor_steps` steps.
    pub fn present(&mut self, input: &BinnedInput, motor_steps: usize) -> Result<ActivityLog> {
        self.present_with(input, motor_steps, |_, _, _| {})
    }

    /// As [`present`](Self::present), also handing every step's spikes and
    /// the plastic weights after it to `observe`.
    pub fn present_with(
        &mut self,
        input: &BinnedInput,
        motor_steps: usize,
        mut observe: impl FnMut(usize, &[NeuronId], &[i32]),
    ) -> Result<ActivityLog> {
        let h = self.h;
        let groups = h.n_groups;
        let mut log = ActivityLog::new(groups, self.sim.time());
        let mut out_row = vec![0u16; groups];
        let mut wta_row = vec![false; groups];
        let mut sel_row = vec![false; groups];
        let mut arb_row = [false; 6];
        for t in 0..input.duration() {
            self.external.clear();
            self.external
                .extend(input.at(t).iter().map(|&p| h.input.id(p as usize)));
            if t < motor_steps {
                self.external.push(h.motor_id());
            }
            self.sim.step(&self.external)?;
            let spikes = self.sim.last_spikes();
            out_row.iter_mut().for_each(|c| *c = 0);
            wta_row.iter_mut().for_each(|c| *c = false);
            sel_row.iter_mut().for_each(|c| *c = false);
            arb_row.iter_mut().for_each(|c| *c = false);
            let (mut learn, mut recog, mut feat, mut trig) = (0u16, 0u16, 0u16, false);
            for &s in spikes {
                match self.kinds[s.index()] {
                    Kind::Other => {}
                    Kind::Output(g) => out_row[g as usize] += 1,
                    Kind::Feature => feat += 1,
                    Kind::Learning => learn += 1,
                    Kind::Recognition => recog += 1,
                    Kind::Arbitration(a) => arb_row[a as usize] = true,
                    Kind::Wta(g) => wta_row[g as usize] = true,
                    Kind::Trigger => trig = true,
                    Kind::Select(g) => sel_row[g as usize] = true,
                }
            }
            observe(t, spikes, self.sim.weights());
            for g in 0..groups {
                log.outputs[g].push(out_row[g]);
                log.wta[g].push(wta_row[g]);
                log.select[g].push(sel_row[g]);
            }
            for (a, &b) in arb_row.iter().enumerate() {
                log.arbitration[a].push(b);
            }
            log.learning.push(learn);
            log.recognition.push(recog);
            log.feature.push(feat);
            log.trigger.push(trig);
        }
        Ok(log)
    }
}
