use serde::{Deserialize, Serialize};

use super::tuning::Tuning;
use crate::error::{Error, Result};

/// One scale of the recognition pathway: the recognition maps are pooled
/// to `downscale × downscale`, and every `tuple_resolution`-sized window
/// of that grid feeds one mapping tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGroup {
    pub downscale: usize,
    /// Side of the square grid of tuples (window offsets).
    pub tuple_side: usize,
}

impl ScaleGroup {
    pub const fn new(downscale: usize, tuple_side: usize) -> Self {
        ScaleGroup {
            downscale,
            tuple_side,
        }
    }

    pub fn tuples(&self) -> usize {
        self.tuple_side * self.tuple_side
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternNetConfig {
    pub input_side: usize,
    pub n_features: usize,
    pub kernel_size: usize,
    pub scale_groups: Vec<ScaleGroup>,
    pub tuple_resolution: usize,
    pub n_output_groups: usize,
    pub tuning: Tuning,
}

impl Default for PatternNetConfig {
    fn default() -> Self {
        PatternNetConfig {
            input_side: 16,
            n_features: 2,
            kernel_size: 7,
            scale_groups: vec![
                ScaleGroup::new(5, 1),
                ScaleGroup::new(7, 3),
                ScaleGroup::new(9, 5),
                ScaleGroup::new(11, 7),
            ],
            tuple_resolution: 5,
            n_output_groups: 4,
            tuning: Tuning::default(),
        }
    }
}

impl PatternNetConfig {
    pub fn with_groups(n_output_groups: usize) -> Self {
        PatternNetConfig {
            n_output_groups,
            ..Self::default()
        }
    }

    /// Output neurons per group: one per mapping tuple.
    pub fn outputs_per_group(&self) -> usize {
        self.scale_groups.iter().map(ScaleGroup::tuples).sum()
    }

    pub fn tuple_cells(&self) -> usize {
        self.tuple_resolution * self.tuple_resolution
    }

    /// Mapping neurons per tuple: ON and OFF cell arrays for every feature.
    pub fn mapping_per_tuple(&self) -> usize {
        2 * self.n_features * self.tuple_cells()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::structural(msg));
        if self.input_side == 0 {
            return bad("input_side must be positive".into());
        }
        if self.n_features != 2 {
            return bad(format!(
                "n_features must be 2 (horizontal and vertical bars), got {}",
                self.n_features
            ));
        }
        if self.kernel_size < 3 || self.kernel_size % 2 == 0 {
            return bad(format!("kernel_size must be odd and >= 3, got {}", self.kernel_size));
        }
        if self.tuple_resolution == 0 || self.tuple_resolution > self.input_side {
            return bad(format!(
                "tuple_resolution {} must be in 1..={}",
                self.tuple_resolution, self.input_side
            ));
        }
        if self.scale_groups.is_empty() {
            return bad("at least one scale group is required".into());
        }
        for (i, g) in self.scale_groups.iter().enumerate() {
            if self.scale_groups[..i].iter().any(|o| o.downscale == g.downscale) {
                return bad(format!("scale group {i}: duplicate downscale {}", g.downscale));
            }
            if g.downscale > self.input_side || g.downscale < self.tuple_resolution {
                return bad(format!(
                    "scale group {i}: downscale {} must lie in {}..={}",
                    g.downscale, self.tuple_resolution, self.input_side
                ));
            }
            if g.downscale + 1 != self.tuple_resolution + g.tuple_side {
                return bad(format!(
                    "scale group {i}: window identity violated, downscale {} - {} + 1 != tuple side {}",
                    g.downscale, self.tuple_resolution, g.tuple_side
                ));
            }
        }
        self.tuning.pattern_rule.rule.validate()?;
        self.tuning.pattern_rule.trace.validate()?;
        self.tuning.nsm.disable_rule.validate()?;
        self.tuning.nsm.disable_trace.validate()?;
        let nsm = &self.tuning.nsm;
        let spread = nsm.tap_stagger as usize * self.n_output_groups.saturating_sub(1);
        if spread + 4 > nsm.end_window as usize {
            return bad(format!(
                "end_window {} too short for {} groups with tap stagger {}",
                nsm.end_window, self.n_output_groups, nsm.tap_stagger
            ));
        }
        Ok(())
    }
}
