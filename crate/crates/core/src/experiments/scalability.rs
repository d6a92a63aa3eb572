use serde::{Deserialize, Serialize};

use crate::architecture::{build, NetworkSize, PatternNetConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalabilityRow {
    pub n_patterns: usize,
    pub size: NetworkSize,
    /// Difference to the network with one group fewer.
    pub delta: NetworkSize,
}

fn diff(a: NetworkSize, b: NetworkSize) -> NetworkSize {
    NetworkSize {
        neurons: a.neurons - b.neurons,
        synapses: a.synapses - b.synapses,
        fixed_synapses: a.fixed_synapses - b.fixed_synapses,
        pattern_synapses: a.pattern_synapses - b.pattern_synapses,
        disable_synapses: a.disable_synapses - b.disable_synapses,
    }
}

/// Builds `base` with 0..=`max_patterns` output groups and differences the
/// counts. Fails unless every added group costs the same.
pub fn report_scalability(base: &PatternNetConfig, max_patterns: usize) -> Result<Vec<ScalabilityRow>> {
    let size = |n| -> Result<NetworkSize> {
        let cfg = PatternNetConfig {
            n_output_groups: n,
            ..base.clone()
        };
        let (net, _, _) = build(&cfg)?;
        Ok(NetworkSize::of(&net))
    };
    let mut prev = size(0)?;
    let mut rows: Vec<ScalabilityRow> = Vec::with_capacity(max_patterns);
    for n in 1..=max_patterns {
        let here = size(n)?;
        let delta = diff(here, prev);
        if let Some(first) = rows.first() {
            if first.delta != delta {
                return Err(Error::structural(format!(
                    "group {n} costs {delta:?}, group 1 cost {:?}",
                    first.delta
                )));
            }
        }
        rows.push(ScalabilityRow {
            n_patterns: n,
            size: here,
            delta,
        });
        prev = here;
    }
    Ok(rows)
}
