use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::binning::BinnedInput;
use super::INPUT_PIXELS;
use crate::error::{Error, Result};

/// Number of spikes [`inject_noise`] adds to a stream of `signal` spikes.
pub fn noise_spike_count(signal: usize, noise_percent: f64) -> usize {
    (noise_percent * signal as f64 / 100.0).round() as usize
}

/// Add uniformly drawn `(step, pixel)` spikes over the input's duration.
///
/// Draws that land on an occupied slot, signal or earlier noise, are redrawn,
/// so the output holds exactly `signal + noise_spike_count(..)` spikes.
pub fn inject_noise(input: &BinnedInput, noise_percent: f64, seed: u64) -> Result<BinnedInput> {
    if !noise_percent.is_finite() || noise_percent < 0.0 {
        return Err(Error::precondition(format!(
            "noise percent {noise_percent} must be a finite non-negative number"
        )));
    }
    let signal = input.spike_count();
    let added = noise_spike_count(signal, noise_percent);
    if added == 0 {
        return Ok(input.clone());
    }
    let slots = input.duration() * INPUT_PIXELS;
    if signal + added > slots {
        return Err(Error::precondition(format!(
            "{added} noise spikes do not fit in {} free slots",
            slots - signal
        )));
    }
    let mut occupied = vec![false; slots];
    for (t, f) in input.frames().iter().enumerate() {
        for &p in f {
            occupied[t * INPUT_PIXELS + p as usize] = true;
        }
    }
    let mut frames: Vec<Vec<u16>> = input.frames().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = 0;
    while n < added {
        let slot = rng.random_range(0..slots);
        if occupied[slot] {
            continue;
        }
        occupied[slot] = true;
        frames[slot / INPUT_PIXELS].push((slot % INPUT_PIXELS) as u16);
        n += 1;
    }
    BinnedInput::from_frames(frames)
}
