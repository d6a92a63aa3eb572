//! Presynaptic traces and the two weight-update rules applied on
//! postsynaptic spikes.
//!
//! Everything here is exact integer arithmetic. Traces are unsigned Q12
//! fixed point (12 fractional bits), learning rates are dyadic rationals
//! `mantissa / 2^shift`, and a weight change is returned as an exact
//! dyadic value before it is rounded and clamped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional bits of trace values.
pub const TRACE_FRAC_BITS: u32 = 12;
/// A trace value of 1.0.
pub const TRACE_ONE: u32 = 1 << TRACE_FRAC_BITS;

/// Largest weight magnitude a rule may use. Keeps every product in
/// [`pattern_delta`] and [`nsm_delta`] well inside `i128`.
pub const MAX_RULE_WEIGHT: i32 = 1 << 15;
const MAX_RATE_SHIFT: u32 = 48;

/// Convert a real trace value to Q12, rounding to nearest.
pub fn trace_from_f64(x: f64) -> u32 {
    (x * TRACE_ONE as f64).round().clamp(0.0, u32::MAX as f64) as u32
}

pub fn trace_to_f64(x: u32) -> f64 {
    x as f64 / TRACE_ONE as f64
}

/// A dyadic rational `mantissa / 2^shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rate {
    pub mantissa: u32,
    pub shift: u32,
}

impl Rate {
    pub const fn new(mantissa: u32, shift: u32) -> Self {
        Rate { mantissa, shift }
    }

    /// `2^-shift`.
    pub const fn pow2(shift: u32) -> Self {
        Rate { mantissa: 1, shift }
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 / (self.shift as f64).exp2()
    }

    fn validate(self, what: &str) -> Result<()> {
        if self.mantissa == 0 {
            return Err(Error::config(what, "must be > 0"));
        }
        if self.shift > MAX_RATE_SHIFT {
            return Err(Error::config(what, format!("shift must be <= {MAX_RATE_SHIFT}")));
        }
        Ok(())
    }
}

/// Exact weight change `num / 2^shift`, prior to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightDelta {
    pub num: i128,
    pub shift: u32,
}

impl WeightDelta {
    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn signum(self) -> i32 {
        self.num.signum() as i32
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (self.shift as f64).exp2()
    }

    /// Round toward zero.
    pub fn trunc(self) -> i128 {
        // i128 division truncates toward zero.
        self.num / (1i128 << self.shift)
    }

    /// The integer step actually applied to a weight: the value rounded
    /// toward zero, but never less than one unit in magnitude when the
    /// exact change is nonzero. Without the floor, weights close to a rail
    /// stall short of it forever.
    pub fn step(self) -> i64 {
        let t = self.trunc();
        let t = if t == 0 && self.num != 0 {
            self.num.signum()
        } else {
            t
        };
        t.clamp(i64::MIN as i128, i64::MAX as i128) as i64
    }
}

/// Dynamics of the presynaptic trace: each presynaptic spike adds
/// `impulse`, and between spikes the trace decays as `exp(-1/decay_tau)`
/// per timestep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Trace units added per spike (real value, stored as Q12 on use).
    pub impulse: f64,
    /// Decay time constant in timesteps.
    pub decay_tau: f64,
}

impl TraceConfig {
    pub fn new(impulse: f64, decay_tau: f64) -> Result<Self> {
        let cfg = TraceConfig { impulse, decay_tau };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.impulse > 0.0 && self.impulse.is_finite()) {
            return Err(Error::config("trace.impulse", "must be > 0"));
        }
        if !(self.decay_tau > 0.0 && self.decay_tau.is_finite()) {
            return Err(Error::config("trace.decay_tau", "must be > 0"));
        }
        Ok(())
    }

    /// Fixed-point form used by [`update_trace`].
    pub fn fixed(&self) -> FixedTrace {
        FixedTrace {
            impulse: trace_from_f64(self.impulse),
            multiplier: ((-1.0 / self.decay_tau).exp() * TRACE_ONE as f64)
                .round()
                .clamp(0.0, TRACE_ONE as f64) as u32,
        }
    }
}

/// Precomputed Q12 impulse and per-step decay multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedTrace {
    pub impulse: u32,
    pub multiplier: u32,
}

/// One timestep of trace dynamics: decay (round half up), then add the
/// impulse if the presynaptic neuron spiked. Saturates at `u32::MAX`.
pub fn update_trace(x1: u32, presyn_spiked: bool, cfg: FixedTrace) -> u32 {
    let decayed = (x1 as u64 * cfg.multiplier as u64 + (1 << (TRACE_FRAC_BITS - 1))) >> TRACE_FRAC_BITS;
    let next = decayed + if presyn_spiked { cfg.impulse as u64 } else { 0 };
    next.min(u32::MAX as u64) as u32
}

/// Parameters of the pattern-learning rule
/// `dw = (x1 - alpha)(w_max - w)(w - w_min) * lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternRule {
    /// Trace threshold, Q12.
    pub alpha: u32,
    pub lambda: Rate,
    pub w_max: i32,
    pub w_min: i32,
}

impl PatternRule {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_min < 0 && self.w_max > 0) {
            return Err(Error::config("pattern_rule", "requires w_min < 0 < w_max"));
        }
        if self.w_max > MAX_RULE_WEIGHT || self.w_min < -MAX_RULE_WEIGHT {
            return Err(Error::config(
                "pattern_rule",
                format!("weights limited to +-{MAX_RULE_WEIGHT}"),
            ));
        }
        if self.alpha == 0 {
            return Err(Error::config("pattern_rule.alpha", "must be > 0"));
        }
        self.lambda.validate("pattern_rule.lambda")
    }
}

/// Parameters of the self-disabling rule
/// `dw = (alpha - x1)(w_max - w) * lambda - x1 * gamma`.
///
/// Weights under this rule live in `[0, w_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NsmRule {
    /// Trace threshold, Q12.
    pub alpha: u32,
    pub lambda: Rate,
    pub gamma: Rate,
    pub w_max: i32,
}

impl NsmRule {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_max > 0 && self.w_max <= MAX_RULE_WEIGHT) {
            return Err(Error::config(
                "nsm_rule.w_max",
                format!("must be in 1..={MAX_RULE_WEIGHT}"),
            ));
        }
        self.lambda.validate("nsm_rule.lambda")?;
        self.gamma.validate("nsm_rule.gamma")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    Pattern(PatternRule),
    Nsm(NsmRule),
}

impl Rule {
    pub fn validate(&self) -> Result<()> {
        match self {
            Rule::Pattern(r) => r.validate(),
            Rule::Nsm(r) => r.validate(),
        }
    }

    /// Inclusive weight range `(min, max)` the rule confines weights to.
    pub fn bounds(&self) -> (i32, i32) {
        match self {
            Rule::Pattern(r) => (r.w_min, r.w_max),
            Rule::Nsm(r) => (0, r.w_max),
        }
    }

    pub fn delta(&self, x1: u32, w: i32) -> WeightDelta {
        match self {
            Rule::Pattern(r) => pattern_delta(x1, w, r),
            Rule::Nsm(r) => nsm_delta(x1, w, r),
        }
    }

    /// New weight after one postsynaptic spike.
    pub fn apply(&self, x1: u32, w: i32) -> i32 {
        let (lo, hi) = self.bounds();
        let step = self.delta(x1, w).step();
        (w as i64).saturating_add(step).clamp(lo as i64, hi as i64) as i32
    }
}

pub fn pattern_delta(x1: u32, w: i32, rule: &PatternRule) -> WeightDelta {
    let num = (x1 as i128 - rule.alpha as i128)
        * (rule.w_max as i128 - w as i128)
        * (w as i128 - rule.w_min as i128)
        * rule.lambda.mantissa as i128;
    WeightDelta {
        num,
        shift: TRACE_FRAC_BITS + rule.lambda.shift,
    }
}

pub fn nsm_delta(x1: u32, w: i32, rule: &NsmRule) -> WeightDelta {
    let shift = rule.lambda.shift.max(rule.gamma.shift);
    let growth = (rule.alpha as i128 - x1 as i128)
        * (rule.w_max as i128 - w as i128)
        * rule.lambda.mantissa as i128
        * (1i128 << (shift - rule.lambda.shift));
    let decay = x1 as i128 * rule.gamma.mantissa as i128 * (1i128 << (shift - rule.gamma.shift));
    WeightDelta {
        num: growth - decay,
        shift: TRACE_FRAC_BITS + shift,
    }
}

/// A learnable synapse's dynamic state together with its rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlasticSynapse {
    pub weight: i32,
    /// Presynaptic trace, Q12.
    pub trace: u32,
    pub rule: Rule,
}

impl PlasticSynapse {
    pub fn new(rule: Rule) -> Self {
        PlasticSynapse {
            weight: 0,
            trace: 0,
            rule,
        }
    }
}

/// Weight update for one postsynaptic spike. The trace is left alone; it
/// evolves every timestep through [`update_trace`].
pub fn apply_on_post_spike(syn: PlasticSynapse) -> PlasticSynapse {
    PlasticSynapse {
        weight: syn.rule.apply(syn.trace, syn.weight),
        ..syn
    }
}
