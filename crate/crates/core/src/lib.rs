//! Spiking network for one-shot learning and location/scale invariant
//! recognition of bar-composed visual patterns, simulated on a
//! deterministic integer discrete-timestep engine.
//!
//! Modules, bottom up:
//!
//! - [`engine`]: leaky integrate-and-fire compartments, delayed synapses,
//!   spike generators, probes.
//! - [`plasticity`]: presynaptic traces and the pattern / self-disabling
//!   learning rules.
//! - [`architecture`]: builds the five-layer recognition network with its
//!   arbitration circuit, state-machine cascade and readout.
//! - [`events`]: address-event file codecs, downsampling, synthetic
//!   jiggled patterns, input noise.
//! - [`experiments`]: training/evaluation protocol, sweeps, latency and
//!   resource reports.
//! - [`config`]: the run configuration file.

pub mod architecture;
pub mod config;
pub mod engine;
pub mod error;
pub mod events;
pub mod experiments;
pub mod plasticity;

pub use error::{Error, Result};
