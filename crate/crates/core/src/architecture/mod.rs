//! The five-layer recognition network.
//!
//! Input pixels (L1) feed two bar-detecting feature maps (L2). From there a
//! learning pathway pools each map to 5×5 and a recognition pathway pools it
//! to 5×5, 7×7, 9×9 and 11×11 (L3). Every 5×5 window of a pooled grid drives
//! one tuple of ON/OFF mapping neurons (L4), and each tuple projects through
//! plastic synapses onto one output neuron per output group (L5). Six
//! arbitration neurons decide which pathway is open, a cascade of state
//! machines picks the output group that learns a novel pattern, and one WTA
//! neuron per group reads out the winner.

mod build;
mod config;
mod layout;
mod resources;
mod tuning;

pub use build::build;
pub use config::{PatternNetConfig, ScaleGroup};
pub use layout::{
    kernel_weight, pool_block, pool_boundary, Arb, LayerHandles, NsmControl, NsmRole, Side,
    TupleWindow, WindowMap,
};
pub use resources::{count_resources, group_weights, GroupWeights, Manifest, NetworkSize, PlasticInventory, ResourceCount};
pub use tuning::{
    ArbitrationTuning, FeatureTuning, MappingTuning, NsmTuning, OutputTuning, PathwayTuning,
    PatternRuleTuning, Tuning, WtaTuning,
};
