use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DECAY_FRAC_BITS: u32 = 12;
pub const DECAY_ONE: u16 = 1 << DECAY_FRAC_BITS;

/// Fraction of a state variable removed each timestep, Q12 in `[0, 4096]`.
/// `Decay(0)` is a perfect integrator, `Decay(4096)` forgets everything
/// between steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decay(u16);

impl Decay {
    pub const NONE: Decay = Decay(0);
    pub const FULL: Decay = Decay(DECAY_ONE);

    pub fn from_q12(raw: u16) -> Result<Self> {
        if raw > DECAY_ONE {
            return Err(Error::config("decay", format!("{raw} exceeds {DECAY_ONE}")));
        }
        Ok(Decay(raw))
    }

    /// Nearest Q12 value to `fraction`, which must lie in `[0, 1]`.
    pub fn from_fraction(fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::config("decay", format!("{fraction} outside [0, 1]")));
        }
        Ok(Decay((fraction * DECAY_ONE as f64).round() as u16))
    }

    pub fn q12(self) -> u16 {
        self.0
    }

    /// Multiplier applied to the retained state, `4096 - decay`.
    pub fn retain(self) -> i64 {
        (DECAY_ONE - self.0) as i64
    }

    pub fn is_valid(self) -> bool {
        self.0 <= DECAY_ONE
    }
}

/// `round(x * retain / 4096)`, rounding half away from zero.
#[inline]
pub fn apply_decay(x: i32, retain: i64) -> i64 {
    let p = x as i64 * retain;
    if p >= 0 {
        (p + (1 << (DECAY_FRAC_BITS - 1))) >> DECAY_FRAC_BITS
    } else {
        -((-p + (1 << (DECAY_FRAC_BITS - 1))) >> DECAY_FRAC_BITS)
    }
}

/// Static parameters of one leaky integrate-and-fire compartment.
///
/// Per timestep:
/// `u <- round(u * (1 - current_decay)) + delivered weights + bias (+ noise)`,
/// `v <- round(v * (1 - voltage_decay)) + u`, and a spike is emitted when
/// `v >= threshold` outside the refractory period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompartmentParams {
    pub threshold: i32,
    pub bias: i32,
    pub current_decay: Decay,
    pub voltage_decay: Decay,
    pub refractory_period: u32,
}

impl CompartmentParams {
    /// A threshold unit with no memory: it spikes on any step whose summed
    /// input plus bias reaches `threshold`.
    pub const fn memoryless(threshold: i32) -> Self {
        CompartmentParams {
            threshold,
            bias: 0,
            current_decay: Decay::FULL,
            voltage_decay: Decay::FULL,
            refractory_period: 0,
        }
    }

    pub const fn with_bias(mut self, bias: i32) -> Self {
        self.bias = bias;
        self
    }

    pub const fn with_refractory(mut self, steps: u32) -> Self {
        self.refractory_period = steps;
        self
    }

    pub const fn with_decays(mut self, current: Decay, voltage: Decay) -> Self {
        self.current_decay = current;
        self.voltage_decay = voltage;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.threshold <= 0 {
            return Err(Error::config("threshold", "must be > 0"));
        }
        if !self.current_decay.is_valid() || !self.voltage_decay.is_valid() {
            return Err(Error::config("decay", "must lie in [0, 4096]"));
        }
        Ok(())
    }
}
