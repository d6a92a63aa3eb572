use serde::{Deserialize, Serialize};

use crate::engine::{NeuronId, Population};

/// Arbitration neurons, in id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arb {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
}

impl Arb {
    pub const ALL: [Arb; 6] = [Arb::A1, Arb::A2, Arb::A3, Arb::A4, Arb::A5, Arb::A6];
}

/// Neurons of one state-machine unit, in id order within the unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NsmRole {
    /// Delayed copy of the shared trigger; carries the disable synapse.
    Tap,
    /// Self-exciting state neuron.
    Latch,
    /// Output-selecting neuron O.
    Select,
    /// Delay stage between O and S.
    Relay,
    /// Output-stimulating neuron S.
    Stim,
    /// Inhibits latch and select while A4 is active.
    Suppress,
    /// Fires for a while after O falls silent; ends the episode.
    End,
}

impl NsmRole {
    pub const ALL: [NsmRole; 7] = [
        NsmRole::Tap,
        NsmRole::Latch,
        NsmRole::Select,
        NsmRole::Relay,
        NsmRole::Stim,
        NsmRole::Suppress,
        NsmRole::End,
    ];
    pub const COUNT: usize = 7;
}

/// Shared state-machine control neurons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NsmControl {
    /// Leaky timer that fires after a stretch with A3 and A4 silent.
    QuietTimer,
    /// Self-latching trigger that starts the competition.
    Trigger,
    /// Mutual inhibition pool between latches.
    Pool,
}

impl NsmControl {
    pub const ALL: [NsmControl; 3] = [NsmControl::QuietTimer, NsmControl::Trigger, NsmControl::Pool];
}

/// Side of a mapping neuron pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    On,
    Off,
}

/// Named id ranges of the built network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerHandles {
    pub input_side: usize,
    pub tuple_resolution: usize,
    pub n_features: usize,
    pub n_groups: usize,
    pub outputs_per_group: usize,
    pub input: Population,
    pub motor: Population,
    pub feature: Population,
    pub learning: Population,
    pub recognition: Population,
    /// One population per scale group, `n_features × downscale²` each.
    pub pools: Vec<Population>,
    pub pool_sizes: Vec<usize>,
    pub mapping: Population,
    pub arbitration: Population,
    pub nsm_control: Population,
    pub wta_inhibitor: Population,
    pub output: Population,
    pub nsm: Population,
    pub wta: Population,
}

impl LayerHandles {
    fn map_size(&self) -> usize {
        self.input_side * self.input_side
    }

    pub fn input_id(&self, row: usize, col: usize) -> NeuronId {
        self.input.id(row * self.input_side + col)
    }

    pub fn motor_id(&self) -> NeuronId {
        self.motor.id(0)
    }

    pub fn feature_id(&self, f: usize, row: usize, col: usize) -> NeuronId {
        self.feature.id(f * self.map_size() + row * self.input_side + col)
    }

    /// Feature population for feature `f` (0 horizontal, 1 vertical).
    pub fn feature_map(&self, f: usize) -> std::ops::Range<usize> {
        let s = self.feature.start as usize + f * self.map_size();
        s..s + self.map_size()
    }

    pub fn recognition_id(&self, f: usize, row: usize, col: usize) -> NeuronId {
        self.recognition.id(f * self.map_size() + row * self.input_side + col)
    }

    pub fn learning_id(&self, f: usize, cell: usize) -> NeuronId {
        self.learning.id(f * self.tuple_resolution * self.tuple_resolution + cell)
    }

    pub fn pool_id(&self, scale: usize, f: usize, row: usize, col: usize) -> NeuronId {
        let n = self.pool_sizes[scale];
        self.pools[scale].id(f * n * n + row * n + col)
    }

    pub fn mapping_id(&self, tuple: usize, f: usize, side: Side, cell: usize) -> NeuronId {
        let cells = self.tuple_resolution * self.tuple_resolution;
        let s = match side {
            Side::On => 0,
            Side::Off => 1,
        };
        self.mapping.id(((tuple * self.n_features + f) * 2 + s) * cells + cell)
    }

    /// Ids of the mapping neurons of one tuple, in the order their plastic
    /// synapses onto the tuple's output neuron are created.
    pub fn tuple_mapping(&self, tuple: usize) -> std::ops::Range<usize> {
        let per = 2 * self.n_features * self.tuple_resolution * self.tuple_resolution;
        let s = self.mapping.start as usize + tuple * per;
        s..s + per
    }

    pub fn arb(&self, a: Arb) -> NeuronId {
        self.arbitration.id(a as usize)
    }

    pub fn control(&self, c: NsmControl) -> NeuronId {
        self.nsm_control.id(c as usize)
    }

    pub fn wta_inhibitor_id(&self) -> NeuronId {
        self.wta_inhibitor.id(0)
    }

    pub fn output_id(&self, group: usize, tuple: usize) -> NeuronId {
        self.output.id(group * self.outputs_per_group + tuple)
    }

    pub fn group_outputs(&self, group: usize) -> std::ops::Range<usize> {
        let s = self.output.start as usize + group * self.outputs_per_group;
        s..s + self.outputs_per_group
    }

    pub fn nsm_id(&self, group: usize, role: NsmRole) -> NeuronId {
        self.nsm.id(group * NsmRole::COUNT + role as usize)
    }

    pub fn wta_id(&self, group: usize) -> NeuronId {
        self.wta.id(group)
    }

    /// Group index of an output, NSM or WTA neuron.
    pub fn group_of(&self, id: NeuronId) -> Option<usize> {
        if let Some(o) = self.output.offset(id) {
            Some(o / self.outputs_per_group)
        } else if let Some(o) = self.nsm.offset(id) {
            Some(o / NsmRole::COUNT)
        } else {
            self.wta.offset(id)
        }
    }
}

/// Window of one mapping tuple into its scale's pooled grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleWindow {
    pub scale_group: usize,
    pub downscale: usize,
    /// `(row, col)` of the window's top-left cell in the pooled grid.
    pub offset: (usize, usize),
    /// Per feature, the pool neurons feeding cells `0..25` in row-major
    /// order.
    pub sources: Vec<Vec<NeuronId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowMap {
    pub tuples: Vec<TupleWindow>,
}

impl WindowMap {
    /// Tuple index for a scale group and window offset.
    pub fn find(&self, scale_group: usize, offset: (usize, usize)) -> Option<usize> {
        self.tuples
            .iter()
            .position(|t| t.scale_group == scale_group && t.offset == offset)
    }
}

/// Pixel boundary `i` of an `n`-way near-uniform partition of `side`
/// pixels: `round(i * side / n)`, halves up.
pub fn pool_boundary(i: usize, n: usize, side: usize) -> usize {
    (2 * side * i + n) / (2 * n)
}

/// Block index containing `pixel` under an `n`-way partition of `side`.
pub fn pool_block(pixel: usize, n: usize, side: usize) -> usize {
    (0..n)
        .find(|&i| pixel < pool_boundary(i + 1, n, side))
        .expect("pixel inside the grid")
}

/// Convolution weight at kernel offset `(dr, dc)` for feature `f`
/// (0: horizontal bars, 1: vertical bars): `k` within one row (column) of
/// the centre, `-flank` further out.
pub fn kernel_weight(f: usize, dr: isize, dc: isize, k: i32, flank: i32) -> i32 {
    let across = if f == 0 { dr } else { dc };
    if across.abs() <= 1 {
        k
    } else {
        -flank
    }
}
