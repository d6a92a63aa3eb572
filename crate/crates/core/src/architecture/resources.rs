use serde::{Deserialize, Serialize};

use super::build::build;
use super::config::PatternNetConfig;
use super::layout::LayerHandles;
use crate::engine::{NetworkSpec, Population};
use crate::error::{Error, Result};
use crate::plasticity::Rule;

/// Sizes of one built network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSize {
    pub neurons: usize,
    pub synapses: usize,
    pub fixed_synapses: usize,
    /// Plastic synapses under the pattern-learning rule.
    pub pattern_synapses: usize,
    /// Plastic synapses under the self-disabling rule.
    pub disable_synapses: usize,
}

impl NetworkSize {
    pub fn of(net: &NetworkSpec) -> Self {
        let mut pattern = 0;
        let mut disable = 0;
        for s in net.plastic_synapses() {
            match net.rule(s.rule) {
                Some(Rule::Pattern(_)) => pattern += 1,
                Some(Rule::Nsm(_)) => disable += 1,
                None => {}
            }
        }
        NetworkSize {
            neurons: net.neuron_count(),
            synapses: net.synapse_count(),
            fixed_synapses: net.fixed_synapse_count(),
            pattern_synapses: pattern,
            disable_synapses: disable,
        }
    }
}

/// Totals for a configuration and the cost of one more output group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub n_output_groups: usize,
    pub neurons_total: usize,
    pub synapses_total: usize,
    pub neurons_per_added_pattern: usize,
    pub synapses_per_added_pattern: usize,
    pub pattern_synapses_per_added_pattern: usize,
    pub disable_synapses_per_added_pattern: usize,
    pub fixed_synapses_per_added_pattern: usize,
}

/// Exact counts from the builder; per-pattern figures are the difference
/// between builds with `n` and `n + 1` output groups.
pub fn count_resources(config: &PatternNetConfig) -> Result<ResourceCount> {
    let (net, _, _) = build(config)?;
    let here = NetworkSize::of(&net);
    drop(net);
    let mut next_cfg = config.clone();
    next_cfg.n_output_groups += 1;
    let (next, _, _) = build(&next_cfg)?;
    let next = NetworkSize::of(&next);
    Ok(ResourceCount {
        n_output_groups: config.n_output_groups,
        neurons_total: here.neurons,
        synapses_total: here.synapses,
        neurons_per_added_pattern: next.neurons - here.neurons,
        synapses_per_added_pattern: next.synapses - here.synapses,
        pattern_synapses_per_added_pattern: next.pattern_synapses - here.pattern_synapses,
        disable_synapses_per_added_pattern: next.disable_synapses - here.disable_synapses,
        fixed_synapses_per_added_pattern: next.fixed_synapses - here.fixed_synapses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlasticInventory {
    pub name: String,
    pub rule: String,
    pub count: usize,
}

/// JSON-serializable description of a built network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub populations: Vec<Population>,
    pub size: NetworkSize,
    pub plastic: Vec<PlasticInventory>,
    pub outputs_per_group: usize,
    pub n_output_groups: usize,
    pub max_delay: u32,
}

impl Manifest {
    pub fn new(net: &NetworkSpec, handles: &LayerHandles) -> Self {
        let size = NetworkSize::of(net);
        Manifest {
            populations: net.populations().to_vec(),
            size,
            plastic: vec![
                PlasticInventory {
                    name: "mapping->output".into(),
                    rule: "pattern".into(),
                    count: size.pattern_synapses,
                },
                PlasticInventory {
                    name: "nsm tap->latch".into(),
                    rule: "nsm".into(),
                    count: size.disable_synapses,
                },
            ],
            outputs_per_group: handles.outputs_per_group,
            n_output_groups: handles.n_groups,
            max_delay: net.max_delay(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// Where one output group's plastic weights sit in the weight vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupWeights {
    /// Mapping → output synapses of the group, contiguous.
    pub pattern: std::ops::Range<usize>,
    /// The group's self-disabling tap → latch synapse.
    pub disable: usize,
}

/// Locate every group's plastic synapses by their postsynaptic neurons.
pub fn group_weights(net: &NetworkSpec, h: &LayerHandles) -> Result<Vec<GroupWeights>> {
    let mut pattern: Vec<Vec<usize>> = vec![Vec::new(); h.n_groups];
    let mut disable: Vec<Option<usize>> = vec![None; h.n_groups];
    for (i, s) in net.plastic_synapses().iter().enumerate() {
        let Some(g) = h.group_of(s.post) else { continue };
        match net.rule(s.rule) {
            Some(Rule::Pattern(_)) => pattern[g].push(i),
            Some(Rule::Nsm(_)) => disable[g] = Some(i),
            None => {}
        }
    }
    pattern
        .into_iter()
        .zip(disable)
        .enumerate()
        .map(|(g, (p, d))| {
            let (Some(&lo), Some(&hi)) = (p.first(), p.last()) else {
                return Err(Error::structural(format!("group {g} has no pattern synapses")));
            };
            if hi + 1 - lo != p.len() {
                return Err(Error::structural(format!("group {g} pattern synapses are not contiguous")));
            }
            let disable = d.ok_or_else(|| Error::structural(format!("group {g} has no disable synapse")))?;
            Ok(GroupWeights { pattern: lo..hi + 1, disable })
        })
        .collect()
}
