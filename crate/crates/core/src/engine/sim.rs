use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{NetworkSpec, NeuronId, PlasticId};
use super::params::apply_decay;
use super::probe::{ProbeRecord, ProbeSet, Recorder};
use crate::error::{Error, Result};
use crate::plasticity::update_trace;

/// Spikes an input neuron is forced to emit at the listed timesteps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeGenerator {
    pub neuron: NeuronId,
    pub schedule: Vec<u64>,
}

impl SpikeGenerator {
    pub fn new(neuron: NeuronId, schedule: Vec<u64>) -> Result<Self> {
        if schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition(format!(
                "spike schedule for {neuron} is not strictly increasing"
            )));
        }
        Ok(SpikeGenerator { neuron, schedule })
    }
}

/// Dynamic state of one simulation.
#[derive(Debug, Clone)]
pub struct SimState {
    t: u64,
    u: Vec<i32>,
    v: Vec<i32>,
    refractory: Vec<u32>,
    /// `ring_len` rows of per-neuron pending input, indexed by arrival step.
    ring: Vec<i64>,
    ring_len: usize,
    weights: Vec<i32>,
    traces: Vec<u32>,
    rng: ChaCha8Rng,
    saturations: u64,
}

impl SimState {
    pub fn new(net: &NetworkSpec, seed: u64) -> Self {
        let n = net.neuron_count();
        let ring_len = net.max_delay as usize + 2;
        SimState {
            t: 0,
            u: vec![0; n],
            v: vec![0; n],
            refractory: vec![0; n],
            ring: vec![0; n * ring_len],
            ring_len,
            weights: net.initial_weights(),
            traces: vec![0; net.slots.len()],
            rng: ChaCha8Rng::seed_from_u64(seed),
            saturations: 0,
        }
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn voltage(&self, id: NeuronId) -> i32 {
        self.v[id.index()]
    }

    pub fn current(&self, id: NeuronId) -> i32 {
        self.u[id.index()]
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    /// Number of times `u` or `v` had to be clamped to the `i32` range.
    pub fn saturation_events(&self) -> u64 {
        self.saturations
    }

    /// Restart the noise stream from `seed`, keeping all other state.
    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }
}

/// Runs a [`NetworkSpec`] one timestep at a time.
///
/// Within a step the order is fixed: pending synaptic input for this step
/// is delivered, every compartment integrates, thresholds are checked,
/// traces and plastic weights are updated, the new spikes are scheduled
/// for delivery and finally probes are sampled. A spike emitted at step
/// `t` through a synapse with delay `d` arrives at step `t + 1 + d`.
pub struct Simulator<'n> {
    net: &'n NetworkSpec,
    state: SimState,
    spiked: Vec<bool>,
    forced: Vec<bool>,
    spikes: Vec<NeuronId>,
    /// Ring row offset for each delay, refreshed every step.
    rows: Vec<usize>,
    recorder: Option<Recorder>,
}

impl<'n> Simulator<'n> {
    pub fn new(net: &'n NetworkSpec, seed: u64) -> Self {
        Self::with_state(net, SimState::new(net, seed))
    }

    pub fn with_state(net: &'n NetworkSpec, state: SimState) -> Self {
        let n = net.neuron_count();
        Simulator {
            net,
            state,
            spiked: vec![false; n],
            forced: vec![false; n],
            spikes: Vec::new(),
            rows: Vec::new(),
            recorder: None,
        }
    }

    pub fn attach_probes(&mut self, probes: &ProbeSet) {
        self.recorder = Some(probes.recorder());
    }

    pub fn take_records(&mut self) -> Vec<ProbeRecord> {
        self.recorder.take().map(|r| r.records).unwrap_or_default()
    }

    pub fn network(&self) -> &'n NetworkSpec {
        self.net
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn into_state(self) -> SimState {
        self.state
    }

    pub fn time(&self) -> u64 {
        self.state.t
    }

    pub fn weights(&self) -> &[i32] {
        &self.state.weights
    }

    /// Neurons that spiked on the most recent step.
    pub fn last_spikes(&self) -> &[NeuronId] {
        &self.spikes
    }

    pub fn weight(&self, id: PlasticId) -> i32 {
        self.state.weights[id.0 as usize]
    }

    /// Replace all plastic weights, e.g. with a trained weight vector.
    pub fn set_weights(&mut self, weights: &[i32]) -> Result<()> {
        if weights.len() != self.state.weights.len() {
            return Err(Error::structural(format!(
                "weight vector has {} entries, network has {} plastic synapses",
                weights.len(),
                self.state.weights.len()
            )));
        }
        for (i, (&w, spec)) in weights.iter().zip(&self.net.plastic).enumerate() {
            let (lo, hi) = self.net.rules[spec.rule as usize].bounds();
            if !(lo..=hi).contains(&w) {
                return Err(Error::structural(format!(
                    "weight {w} of plastic synapse {i} outside [{lo}, {hi}]"
                )));
            }
        }
        self.state.weights.copy_from_slice(weights);
        Ok(())
    }

    pub fn set_weight(&mut self, id: PlasticId, w: i32) -> Result<()> {
        let spec = self
            .net
            .plastic
            .get(id.0 as usize)
            .ok_or_else(|| Error::structural(format!("plastic synapse {} does not exist", id.0)))?;
        let (lo, hi) = self.net.rules[spec.rule as usize].bounds();
        if !(lo..=hi).contains(&w) {
            return Err(Error::structural(format!("weight {w} outside [{lo}, {hi}]")));
        }
        self.state.weights[id.0 as usize] = w;
        Ok(())
    }

    /// Presynaptic trace (Q12) seen by a plastic synapse.
    pub fn trace(&self, id: PlasticId) -> u32 {
        self.state.traces[self.net.plastic[id.0 as usize].trace_slot as usize]
    }

    pub fn set_trace(&mut self, id: PlasticId, x1: u32) -> Result<()> {
        let spec = self
            .net
            .plastic
            .get(id.0 as usize)
            .ok_or_else(|| Error::structural(format!("plastic synapse {} does not exist", id.0)))?;
        self.state.traces[spec.trace_slot as usize] = x1;
        Ok(())
    }

    /// Advance one timestep. `external` lists input neurons forced to spike
    /// on this step. Returns the neurons that spiked, in ascending id order.
    pub fn step(&mut self, external: &[NeuronId]) -> Result<&[NeuronId]> {
        let net = self.net;
        let n = net.neuron_count();
        for &id in external {
            if id.index() >= n {
                return Err(Error::structural(format!("external spike on unknown neuron {id}")));
            }
            if !net.is_input[id.index()] {
                return Err(Error::structural(format!(
                    "external spike on {id}, which is not an input neuron"
                )));
            }
            self.forced[id.index()] = true;
        }

        let st = &mut self.state;
        let t = st.t;
        let row = (t % st.ring_len as u64) as usize * n;

        for &i in &net.noisy {
            let a = net.noise[i as usize];
            st.ring[row + i as usize] += st.rng.random_range(-a..=a) as i64;
        }

        for s in self.spikes.drain(..) {
            self.spiked[s.index()] = false;
        }

        // Deliver, integrate, threshold.
        let input = &mut st.ring[row..row + n];
        let dynamics = &net.dynamics[..n];
        let us = &mut st.u[..n];
        let vs = &mut st.v[..n];
        let refr = &mut st.refractory[..n];
        let forced = &mut self.forced[..n];
        let spiked = &mut self.spiked[..n];
        for i in 0..n {
            let p = &dynamics[i];
            let delivered = std::mem::take(&mut input[i]);
            let u = apply_decay(us[i], p.retain_u) + delivered + p.bias;
            let u = saturate(u, &mut st.saturations);
            us[i] = u;
            let f = std::mem::take(&mut forced[i]);
            let fire = if refr[i] > 0 {
                refr[i] -= 1;
                vs[i] = 0;
                f
            } else {
                let v = apply_decay(vs[i], p.retain_v) + u as i64;
                let v = saturate(v, &mut st.saturations);
                vs[i] = v;
                f || v >= p.threshold
            };
            if fire {
                vs[i] = 0;
                refr[i] = p.refractory;
                spiked[i] = true;
                self.spikes.push(NeuronId(i as u32));
            }
        }

        // Plasticity: traces first, then weights of synapses onto spiking neurons.
        for (x, slot) in st.traces.iter_mut().zip(&net.slots) {
            *x = update_trace(*x, self.spiked[slot.pre as usize], slot.cfg);
        }
        for &post in &self.spikes {
            let i = post.index();
            for &pid in &net.pin[net.pin_start[i] as usize..net.pin_start[i + 1] as usize] {
                let spec = &net.plastic[pid as usize];
                let x1 = st.traces[spec.trace_slot as usize];
                let w = &mut st.weights[pid as usize];
                *w = net.rules[spec.rule as usize].apply(x1, *w);
            }
        }

        // Schedule delivery of this step's spikes.
        let ring_len = st.ring_len as u64;
        self.rows.clear();
        self.rows
            .extend((0..ring_len).map(|d| ((t + 1 + d) % ring_len) as usize * n));
        let rows = &self.rows;
        for &pre in &self.spikes {
            let i = pre.index();
            for e in &net.out[net.out_start[i] as usize..net.out_start[i + 1] as usize] {
                st.ring[rows[e.delay as usize] + e.post as usize] += e.weight as i64;
            }
            for e in &net.pout[net.pout_start[i] as usize..net.pout_start[i + 1] as usize] {
                st.ring[rows[e.delay as usize] + e.post as usize] += st.weights[e.plastic as usize] as i64;
            }
        }

        if let Some(rec) = &mut self.recorder {
            rec.sample(t, &self.spiked, &st.v, &st.weights);
        }
        st.t += 1;
        Ok(&self.spikes)
    }
}

#[inline]
fn saturate(x: i64, counter: &mut u64) -> i32 {
    if x > i32::MAX as i64 {
        *counter += 1;
        i32::MAX
    } else if x < i32::MIN as i64 {
        *counter += 1;
        i32::MIN
    } else {
        x as i32
    }
}

/// Run `n_steps` timesteps from a fresh state and return the filled probes.
/// Bit-identical for identical `(net, inputs, seed, probes)`.
pub fn run(
    net: &NetworkSpec,
    inputs: &[SpikeGenerator],
    n_steps: u64,
    seed: u64,
    probes: &ProbeSet,
) -> Result<Vec<ProbeRecord>> {
    if n_steps == 0 {
        return Err(Error::precondition("n_steps must be > 0"));
    }
    let mut events: Vec<(u64, NeuronId)> = Vec::new();
    for g in inputs {
        if g.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition(format!(
                "spike schedule for {} is not strictly increasing",
                g.neuron
            )));
        }
        if !net.is_input(g.neuron) {
            return Err(Error::structural(format!(
                "spike generator targets {}, which is not an input neuron",
                g.neuron
            )));
        }
        events.extend(g.schedule.iter().map(|&t| (t, g.neuron)));
    }
    events.sort_unstable();

    let mut sim = Simulator::new(net, seed);
    sim.attach_probes(probes);
    let mut next = 0;
    let mut ext = Vec::new();
    for t in 0..n_steps {
        ext.clear();
        while next < events.len() && events[next].0 == t {
            ext.push(events[next].1);
            next += 1;
        }
        sim.step(&ext)?;
    }
    Ok(sim.take_records())
}
