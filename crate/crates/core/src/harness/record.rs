// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::circuit::Genotype;
use crate::evolution::Scenario;

/// One adaptation of a pretrained population to one test goal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub seed: u64,
    pub scenario: Scenario,
    /// Index into the configured test goals.
    pub task: usize,
    pub goal: String,
    pub pre: Genotype,
    pub post: Genotype,
    /// Generations bred; `max_generations` when unsolved.
    pub adaption_cost: u32,
    /// Hamming distance between `pre` and `post`.
    pub reconfiguration_cost: u32,
    pub solved: bool,
    pub wall_time_ms: f64,
    pub config_hash: String,
}

impl RunRecord {
    /// Same run, ignoring wall time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        self.seed == other.seed
            && self.scenario == other.scenario
            && self.task == other.task
            && self.pre == other.pre
            && self.post == other.post
            && self.adaption_cost == other.adaption_cost
            && self.reconfiguration_cost == other.reconfiguration_cost
            && self.solved == other.solved
    }
}
