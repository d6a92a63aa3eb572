//! Event-stream front end: AER file codecs, downsampling to the 16×16 input
//! grid, timestep binning, synthetic jiggled patterns and input noise.

mod aer;
mod binning;
mod noise;
mod synth;

pub use aer::{
    decode_binary, decode_csv, encode_binary, encode_csv, load_events, save_events, EventFormat,
    EventLoad, Polarity, RawEvent, BINARY_MAGIC, BINARY_RECORD_LEN, CSV_HEADER,
};
pub use binning::{
    downsample_bin, downsample_x, downsample_y, sensor_coords, to_raw_events, BinnedInput,
    PolarityFilter,
};
pub use noise::{inject_noise, noise_spike_count};
pub use synth::{
    block_boundary, block_centre, grid_for_scale, synthesize, Bar, Jiggle, Orientation, Shape,
    SynthPattern, CELLS, SCALE_CLASSES,
};

pub const SENSOR_WIDTH: usize = 240;
pub const SENSOR_HEIGHT: usize = 180;
pub const GRID_SIDE: usize = 16;
pub const INPUT_PIXELS: usize = GRID_SIDE * GRID_SIDE;
/// Source time per engine step, in microseconds.
pub const TIMESTEP_US: u32 = 250;
