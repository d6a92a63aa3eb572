use serde::{Deserialize, Serialize};

use super::network::{NetworkSpec, NeuronId, SynapseId, SynapseRef};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Spike,
    Voltage,
    Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeTarget {
    Neuron(NeuronId),
    Synapse(SynapseId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProbeHandle(pub usize);

/// Samples captured by one probe.
///
/// Spike probes hold `(t, 1)` for each spike. Voltage probes hold one
/// sample per step. Weight probes hold the weight at the first step and
/// thereafter one sample per step on which the weight changed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub kind: ProbeKind,
    pub target: ProbeTarget,
    pub samples: Vec<(u64, i64)>,
}

/// Probes to fill during a run, validated against a network.
#[derive(Debug, Clone, Default)]
pub struct ProbeSet {
    pub(crate) probes: Vec<(ProbeKind, ProbeTarget, Option<u32>)>,
}

impl ProbeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn attach(&mut self, net: &NetworkSpec, kind: ProbeKind, target: ProbeTarget) -> Result<ProbeHandle> {
        let plastic = match (kind, target) {
            (ProbeKind::Spike | ProbeKind::Voltage, ProbeTarget::Neuron(id)) => {
                if id.index() >= net.neuron_count() {
                    return Err(Error::structural(format!("probe target {id} does not exist")));
                }
                None
            }
            (ProbeKind::Weight, ProbeTarget::Synapse(sid)) => match net.synapse(sid) {
                Some(SynapseRef::Plastic(p)) => Some(p.0),
                Some(SynapseRef::Fixed(_)) => {
                    return Err(Error::structural(format!(
                        "weight probe on synapse {} which is not plastic",
                        sid.0
                    )))
                }
                None => return Err(Error::structural(format!("synapse {} does not exist", sid.0))),
            },
            (k, t) => {
                return Err(Error::structural(format!(
                    "probe kind {k:?} cannot target {t:?}"
                )))
            }
        };
        self.probes.push((kind, target, plastic));
        Ok(ProbeHandle(self.probes.len() - 1))
    }

    pub(crate) fn recorder(&self) -> Recorder {
        Recorder {
            records: self
                .probes
                .iter()
                .map(|&(kind, target, _)| ProbeRecord {
                    kind,
                    target,
                    samples: Vec::new(),
                })
                .collect(),
            plastic: self.probes.iter().map(|p| p.2).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Recorder {
    pub records: Vec<ProbeRecord>,
    plastic: Vec<Option<u32>>,
}

impl Recorder {
    pub fn sample(&mut self, t: u64, spiked: &[bool], v: &[i32], weights: &[i32]) {
        for (rec, plastic) in self.records.iter_mut().zip(&self.plastic) {
            match (rec.kind, rec.target) {
                (ProbeKind::Spike, ProbeTarget::Neuron(id)) => {
                    if spiked[id.index()] {
                        rec.samples.push((t, 1));
                    }
                }
                (ProbeKind::Voltage, ProbeTarget::Neuron(id)) => {
                    rec.samples.push((t, v[id.index()] as i64));
                }
                (ProbeKind::Weight, _) => {
                    let w = weights[plastic.expect("validated at attach") as usize] as i64;
                    if rec.samples.last().is_none_or(|&(_, last)| last != w) {
                        rec.samples.push((t, w));
                    }
                }
                _ => unreachable!("validated at attach"),
            }
        }
    }
}
