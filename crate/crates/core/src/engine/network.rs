use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::params::CompartmentParams;
use crate::error::{Error, Result};
use crate::plasticity::{FixedTrace, Rule, TraceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(transparent)]
#[serde(transparent)]
pub struct NeuronId(pub u32);

impl NeuronId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Index over every synapse, fixed and plastic, in creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SynapseId(pub u32);

/// Index over plastic synapses only; also the index into the weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlasticId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceId(pub u32);

/// A named contiguous block of neuron ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Population {
    pub name: String,
    pub start: u32,
    pub len: u32,
}

impl Population {
    pub fn id(&self, i: usize) -> NeuronId {
        debug_assert!(i < self.len as usize, "{}[{i}] out of range", self.name);
        NeuronId(self.start + i as u32)
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = NeuronId> + Clone {
        (self.start..self.start + self.len).map(NeuronId)
    }

    pub fn range(&self) -> Range<usize> {
        self.start as usize..(self.start + self.len) as usize
    }

    pub fn contains(&self, id: NeuronId) -> bool {
        id.0 >= self.start && id.0 < self.start + self.len
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Position of `id` inside the population.
    pub fn offset(&self, id: NeuronId) -> Option<usize> {
        self.contains(id).then(|| (id.0 - self.start) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct OutEdge {
    pub post: u32,
    pub weight: i32,
    pub delay: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PlasticOut {
    pub post: u32,
    pub plastic: u32,
    pub delay: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlasticSpec {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub rule: u32,
    pub trace_slot: u32,
    pub delay: u32,
    pub initial_weight: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixedSpec {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub weight: i32,
    pub delay: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynapseRef {
    Fixed(u32),
    Plastic(PlasticId),
}

/// One presynaptic trace shared by every plastic synapse with the same
/// presynaptic neuron and trace configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct TraceSlot {
    pub pre: u32,
    pub cfg: FixedTrace,
}

#[derive(Debug, Default)]
pub struct NetworkBuilder {
    params: Vec<CompartmentParams>,
    is_input: Vec<bool>,
    noise: Vec<i32>,
    populations: Vec<Population>,
    fixed: Vec<FixedSpec>,
    plastic: Vec<PlasticSpec>,
    synapses: Vec<SynapseRef>,
    rules: Vec<Rule>,
    traces: Vec<FixedTrace>,
    slot_index: HashMap<(u32, u32), u32>,
    slots: Vec<TraceSlot>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn neuron_count(&self) -> usize {
        self.params.len()
    }

    pub fn add_population(
        &mut self,
        name: impl Into<String>,
        len: usize,
        params: CompartmentParams,
    ) -> Result<Population> {
        self.push_population(name.into(), len, params, false)
    }

    /// Neurons whose spikes are supplied externally (spike generators).
    pub fn add_input_population(&mut self, name: impl Into<String>, len: usize) -> Result<Population> {
        self.push_population(name.into(), len, CompartmentParams::memoryless(1), true)
    }

    fn push_population(
        &mut self,
        name: String,
        len: usize,
        params: CompartmentParams,
        input: bool,
    ) -> Result<Population> {
        params
            .validate()
            .map_err(|e| Error::structural(format!("population `{name}`: {e}")))?;
        if self.populations.iter().any(|p| p.name == name) {
            return Err(Error::structural(format!("duplicate population `{name}`")));
        }
        let start = self.params.len();
        if start + len > u32::MAX as usize {
            return Err(Error::structural("too many neurons"));
        }
        self.params.extend(std::iter::repeat_n(params, len));
        self.is_input.extend(std::iter::repeat_n(input, len));
        self.noise.extend(std::iter::repeat_n(0, len));
        let pop = Population {
            name,
            start: start as u32,
            len: len as u32,
        };
        self.populations.push(pop.clone());
        Ok(pop)
    }

    /// Override the parameters of one neuron.
    pub fn set_params(&mut self, id: NeuronId, params: CompartmentParams) -> Result<()> {
        self.check(id)?;
        params.validate()?;
        self.params[id.index()] = params;
        Ok(())
    }

    pub fn params(&self, id: NeuronId) -> Result<CompartmentParams> {
        self.check(id)?;
        Ok(self.params[id.index()])
    }

    fn check(&self, id: NeuronId) -> Result<()> {
        if id.index() >= self.params.len() {
            return Err(Error::structural(format!("neuron {id} does not exist")));
        }
        Ok(())
    }

    pub fn add_rule(&mut self, rule: Rule) -> Result<RuleId> {
        rule.validate()?;
        self.rules.push(rule);
        Ok(RuleId(self.rules.len() as u32 - 1))
    }

    pub fn add_trace(&mut self, cfg: TraceConfig) -> Result<TraceId> {
        cfg.validate()?;
        self.traces.push(cfg.fixed());
        Ok(TraceId(self.traces.len() as u32 - 1))
    }

    pub fn connect(&mut self, pre: NeuronId, post: NeuronId, weight: i32, delay: u32) -> Result<SynapseId> {
        self.check(pre)?;
        self.check(post)?;
        self.fixed.push(FixedSpec {
            pre,
            post,
            weight,
            delay,
        });
        self.synapses.push(SynapseRef::Fixed(self.fixed.len() as u32 - 1));
        Ok(SynapseId(self.synapses.len() as u32 - 1))
    }

    pub fn connect_plastic(
        &mut self,
        pre: NeuronId,
        post: NeuronId,
        rule: RuleId,
        trace: TraceId,
        initial_weight: i32,
        delay: u32,
    ) -> Result<SynapseId> {
        self.check(pre)?;
        self.check(post)?;
        let r = self
            .rules
            .get(rule.0 as usize)
            .ok_or_else(|| Error::structural(format!("unknown rule {}", rule.0)))?;
        let cfg = *self
            .traces
            .get(trace.0 as usize)
            .ok_or_else(|| Error::structural(format!("unknown trace config {}", trace.0)))?;
        let (lo, hi) = r.bounds();
        if !(lo..=hi).contains(&initial_weight) {
            return Err(Error::structural(format!(
                "initial weight {initial_weight} outside rule bounds [{lo}, {hi}]"
            )));
        }
        let next = self.slots.len() as u32;
        let slot = *self.slot_index.entry((pre.0, trace.0)).or_insert(next);
        if slot == next {
            self.slots.push(TraceSlot { pre: pre.0, cfg });
        }
        self.plastic.push(PlasticSpec {
            pre,
            post,
            rule: rule.0,
            trace_slot: slot,
            delay,
            initial_weight,
        });
        let pid = PlasticId(self.plastic.len() as u32 - 1);
        self.synapses.push(SynapseRef::Plastic(pid));
        Ok(SynapseId(self.synapses.len() as u32 - 1))
    }

    /// Per-timestep uniform current noise of amplitude `amplitude` on `id`.
    pub fn set_noise(&mut self, id: NeuronId, amplitude: i32) -> Result<()> {
        self.check(id)?;
        if amplitude < 0 {
            return Err(Error::structural("noise amplitude must be >= 0"));
        }
        self.noise[id.index()] = amplitude;
        Ok(())
    }

    pub fn build(self) -> Result<NetworkSpec> {
        let n = self.params.len();
        let mut out_start = vec![0u32; n + 1];
        for s in &self.fixed {
            out_start[s.pre.index() + 1] += 1;
        }
        prefix_sum(&mut out_start);
        let mut cursor = out_start.clone();
        let mut out = vec![
            OutEdge {
                post: 0,
                weight: 0,
                delay: 0
            };
            self.fixed.len()
        ];
        for s in &self.fixed {
            let c = &mut cursor[s.pre.index()];
            out[*c as usize] = OutEdge {
                post: s.post.0,
                weight: s.weight,
                delay: s.delay,
            };
            *c += 1;
        }

        let mut pout_start = vec![0u32; n + 1];
        let mut pin_start = vec![0u32; n + 1];
        for s in &self.plastic {
            pout_start[s.pre.index() + 1] += 1;
            pin_start[s.post.index() + 1] += 1;
        }
        prefix_sum(&mut pout_start);
        prefix_sum(&mut pin_start);
        let mut pout = vec![
            PlasticOut {
                post: 0,
                plastic: 0,
                delay: 0
            };
            self.plastic.len()
        ];
        let mut pin = vec![0u32; self.plastic.len()];
        let mut oc = pout_start.clone();
        let mut ic = pin_start.clone();
        for (i, s) in self.plastic.iter().enumerate() {
            let c = &mut oc[s.pre.index()];
            pout[*c as usize] = PlasticOut {
                post: s.post.0,
                plastic: i as u32,
                delay: s.delay,
            };
            *c += 1;
            let c = &mut ic[s.post.index()];
            pin[*c as usize] = i as u32;
            *c += 1;
        }

        let max_delay = self
            .fixed
            .iter()
            .map(|s| s.delay)
            .chain(self.plastic.iter().map(|s| s.delay))
            .max()
            .unwrap_or(0);
        if max_delay > 1 << 16 {
            return Err(Error::structural(format!("delay {max_delay} too large")));
        }
        let noisy = (0..n as u32).filter(|&i| self.noise[i as usize] > 0).collect();

        Ok(NetworkSpec {
            dynamics: compile(&self.params),
            params: self.params,
            is_input: self.is_input,
            noise: self.noise,
            noisy,
            populations: self.populations,
            fixed: self.fixed,
            plastic: self.plastic,
            synapses: self.synapses,
            rules: self.rules,
            slots: self.slots,
            out_start,
            out,
            pout_start,
            pout,
            pin_start,
            pin,
            max_delay,
        })
    }
}

/// Per-neuron constants in the form the stepping loop consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Dynamics {
    pub retain_u: i64,
    pub retain_v: i64,
    pub bias: i64,
    pub threshold: i32,
    pub refractory: u32,
}

fn compile(params: &[CompartmentParams]) -> Vec<Dynamics> {
    params
        .iter()
        .map(|p| Dynamics {
            retain_u: p.current_decay.retain(),
            retain_v: p.voltage_decay.retain(),
            bias: p.bias as i64,
            threshold: p.threshold,
            refractory: p.refractory_period,
        })
        .collect()
}

fn prefix_sum(v: &mut [u32]) {
    for i in 1..v.len() {
        v[i] += v[i - 1];
    }
}

/// An immutable, fully wired network. Cheap to share between concurrent
/// simulations; all dynamic state lives in [`super::SimState`].
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    pub(crate) params: Vec<CompartmentParams>,
    pub(crate) dynamics: Vec<Dynamics>,
    pub(crate) is_input: Vec<bool>,
    pub(crate) noise: Vec<i32>,
    pub(crate) noisy: Vec<u32>,
    pub(crate) populations: Vec<Population>,
    pub(crate) fixed: Vec<FixedSpec>,
    pub(crate) plastic: Vec<PlasticSpec>,
    pub(crate) synapses: Vec<SynapseRef>,
    pub(crate) rules: Vec<Rule>,
    pub(crate) slots: Vec<TraceSlot>,
    pub(crate) out_start: Vec<u32>,
    pub(crate) out: Vec<OutEdge>,
    pub(crate) pout_start: Vec<u32>,
    pub(crate) pout: Vec<PlasticOut>,
    pub(crate) pin_start: Vec<u32>,
    pub(crate) pin: Vec<u32>,
    pub(crate) max_delay: u32,
}

impl NetworkSpec {
    pub fn neuron_count(&self) -> usize {
        self.params.len()
    }

    pub fn synapse_count(&self) -> usize {
        self.synapses.len()
    }

    pub fn fixed_synapse_count(&self) -> usize {
        self.fixed.len()
    }

    pub fn plastic_synapse_count(&self) -> usize {
        self.plastic.len()
    }

    pub fn populations(&self) -> &[Population] {
        &self.populations
    }

    pub fn population(&self, name: &str) -> Option<&Population> {
        self.populations.iter().find(|p| p.name == name)
    }

    pub fn params(&self, id: NeuronId) -> Option<&CompartmentParams> {
        self.params.get(id.index())
    }

    pub fn is_input(&self, id: NeuronId) -> bool {
        self.is_input.get(id.index()).copied().unwrap_or(false)
    }

    pub fn noise_amplitude(&self, id: NeuronId) -> i32 {
        self.noise.get(id.index()).copied().unwrap_or(0)
    }

    pub fn synapse(&self, id: SynapseId) -> Option<SynapseRef> {
        self.synapses.get(id.0 as usize).copied()
    }

    pub fn fixed_synapses(&self) -> &[FixedSpec] {
        &self.fixed
    }

    pub fn plastic_synapses(&self) -> &[PlasticSpec] {
        &self.plastic
    }

    pub fn plastic(&self, id: PlasticId) -> Option<&PlasticSpec> {
        self.plastic.get(id.0 as usize)
    }

    pub fn rule(&self, idx: u32) -> Option<&Rule> {
        self.rules.get(idx as usize)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn trace_slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn max_delay(&self) -> u32 {
        self.max_delay
    }

    /// Plastic synapses terminating on `post`.
    pub fn plastic_inputs(&self, post: NeuronId) -> impl Iterator<Item = PlasticId> + '_ {
        let i = post.index();
        self.pin[self.pin_start[i] as usize..self.pin_start[i + 1] as usize]
            .iter()
            .map(|&p| PlasticId(p))
    }

    /// A copy with some neurons' parameters and noise amplitudes replaced.
    /// Topology and plastic bindings are unchanged.
    pub fn with_overrides(
        &self,
        params: &[(NeuronId, CompartmentParams)],
        noise: &[(NeuronId, i32)],
    ) -> Result<NetworkSpec> {
        let mut net = self.clone();
        for &(id, p) in params {
            if id.index() >= net.params.len() {
                return Err(Error::structural(format!("neuron {id} does not exist")));
            }
            p.validate()?;
            net.params[id.index()] = p;
        }
        for &(id, a) in noise {
            if id.index() >= net.params.len() || a < 0 {
                return Err(Error::structural(format!("invalid noise override for {id}")));
            }
            net.noise[id.index()] = a;
        }
        net.dynamics = compile(&net.params);
        net.noisy = (0..net.params.len() as u32)
            .filter(|&i| net.noise[i as usize] > 0)
            .collect();
        Ok(net)
    }

    pub(crate) fn initial_weights(&self) -> Vec<i32> {
        self.plastic.iter().map(|p| p.initial_weight).collect()
    }
}
