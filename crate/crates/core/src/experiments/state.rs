use std::path::Path;

use serde::{Deserialize, Serialize};

use super::training::{Episode, PresentationOutcome, TrainingOutcome};
use crate::engine::{NetworkSpec, SimState, Simulator};
use crate::error::{Error, Result};

/// What a training run leaves behind: the full plastic weight vector, the
/// group labels, and the hash of the network it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedState {
    pub network_hash: String,
    /// Names of the trained classes, indexed by pattern.
    pub classes: Vec<String>,
    /// Class each output group learned, if any.
    pub labels: Vec<Option<usize>>,
    pub episodes: Vec<Episode>,
    pub outcomes: Vec<PresentationOutcome>,
    pub weights: Vec<i32>,
}

impl TrainedState {
    /// The state of a network nothing has been presented to.
    pub fn initial(net: &NetworkSpec, n_groups: usize, network_hash: &str) -> Self {
        TrainedState {
            network_hash: network_hash.to_string(),
            classes: Vec::new(),
            labels: vec![None; n_groups],
            episodes: Vec::new(),
            outcomes: Vec::new(),
            weights: SimState::new(net, 0).weights().to_vec(),
        }
    }

    pub fn from_outcome(outcome: &TrainingOutcome, classes: Vec<String>, network_hash: &str) -> Self {
        TrainedState {
            network_hash: network_hash.to_string(),
            classes,
            labels: outcome.labels.clone(),
            episodes: outcome.episodes.clone(),
            outcomes: outcome.outcomes.clone(),
            weights: outcome.weights().to_vec(),
        }
    }

    /// Rebuild a training outcome on `net`, refusing a state that was
    /// trained on a different network.
    pub fn to_outcome(&self, net: &NetworkSpec, expected_hash: &str) -> Result<TrainingOutcome> {
        self.check_hash(expected_hash)?;
        let mut sim = Simulator::new(net, 0);
        sim.set_weights(&self.weights)?;
        Ok(TrainingOutcome {
            state: sim.into_state(),
            episodes: self.episodes.clone(),
            outcomes: self.outcomes.clone(),
            labels: self.labels.clone(),
            trajectory: Vec::new(),
        })
    }

    pub fn check_hash(&self, expected: &str) -> Result<()> {
        if self.network_hash != expected {
            return Err(Error::NetworkMismatch {
                expected: expected.to_string(),
                found: self.network_hash.clone(),
            });
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::architecture::{build, PatternNetConfig};

    #[test]
    fn round_trip_and_hash_check() {
        let (net, h, _) = build(&PatternNetConfig::with_groups(1)).unwrap();
        let s = TrainedState::initial(&net, h.n_groups, "abc");
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        s.save(&p).unwrap();
        let back = TrainedState::load(&p).unwrap();
        assert_eq!(back, s);
        assert!(back.to_outcome(&net, "abc").is_ok());
        assert!(matches!(back.to_outcome(&net, "xyz"), Err(Error::NetworkMismatch { .. })));
    }
}
