//! Discrete-timestep leaky integrate-and-fire simulation core.
//!
//! State is integer valued throughout; decays are Q12 fixed-point
//! multiplies and `u`/`v` saturate instead of wrapping. A single
//! simulation is strictly sequential, which is what makes every probe
//! series reproducible bit for bit.

mod network;
mod params;
mod probe;
mod sim;

pub use network::{
    FixedSpec, NetworkBuilder, NetworkSpec, NeuronId, PlasticId, PlasticSpec, Population, RuleId,
    SynapseId, SynapseRef, TraceId,
};
pub use params::{apply_decay, CompartmentParams, Decay, DECAY_FRAC_BITS, DECAY_ONE};
pub use probe::{ProbeHandle, ProbeKind, ProbeRecord, ProbeSet, ProbeTarget};
pub use sim::{run, SimState, Simulator, SpikeGenerator};
