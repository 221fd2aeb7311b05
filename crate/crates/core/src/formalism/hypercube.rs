// SPDX-License-Identifier: Apache-2.0

//! A small reference system on the `k`-bit hypercube.
//!
//! Configurations are `k`-bit words, reconfiguration cost is Hamming distance
//! and each task is solved by an explicit target set. Adaptation is a greedy
//! hill climb on the distance to the target set that flips one bit per step,
//! so its cost is measured in the same unit as reconfiguration cost.

use rand::Rng;

use super::system::{Adaptation, AdaptiveSystem, UNREACHABLE};
use super::task::{State, Task, TaskId};
use crate::error::{Error, Result};
use crate::seed::Seed;

pub const MAX_BITS: u32 = 16;

#[derive(Clone, Debug)]
pub struct HypercubeSystem {
    bits: u32,
    targets: Vec<Vec<u32>>,
    initial: u32,
    run_cost: Option<f64>,
}

/// Builds the hypercube system and one task per target set (ids `0..n`).
pub fn hypercube_reference_system(
    bits: u32,
    target_sets: Vec<Vec<u32>>,
) -> Result<(HypercubeSystem, Vec<Task>)> {
    let system = HypercubeSystem::new(bits, target_sets)?;
    let tasks = system.tasks();
    Ok((system, tasks))
}

impl HypercubeSystem {
    pub fn new(bits: u32, target_sets: Vec<Vec<u32>>) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::Config(format!(
                "hypercube needs 1..={MAX_BITS} bits, got {bits}"
            )));
        }
        let limit = 1u32 << bits;
        let mut targets = Vec::with_capacity(target_sets.len());
        for (i, mut set) in target_sets.into_iter().enumerate() {
            if let Some(bad) = set.iter().find(|&&c| c >= limit) {
                return Err(Error::Config(format!(
                    "target {bad} of task {i} exceeds {bits} bits"
                )));
            }
            set.sort_unstable();
            set.dedup();
            targets.push(set);
        }
        Ok(HypercubeSystem {
            bits,
            targets,
            initial: 0,
            run_cost: None,
        })
    }

    pub fn with_initial(mut self, config: u32) -> Self {
        self.initial = config & ((1u32 << self.bits) - 1);
        self
    }

    /// Constant execution cost per input.
    pub fn with_run_cost(mut self, cost: f64) -> Self {
        self.run_cost = Some(cost);
        self
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn target_set(&self, id: TaskId) -> &[u32] {
        self.targets.get(id.0).map(Vec::as_slice).unwrap_or(&[])
    }

    /// One task per target set. The goal oracle is the identity on the
    /// configuration bits; the target set itself lives in the system.
    pub fn tasks(&self) -> Vec<Task> {
        (0..self.targets.len())
            .map(|i| {
                Task::new(TaskId(i), self.bits, |s| s, 1.0)
                    .expect("bits already validated")
                    .with_distance_tag(format!("{:?}", self.targets[i]))
            })
            .collect()
    }

    /// Hamming distance from `config` to the nearest target of `id`.
    pub fn distance_to_targets(&self, config: u32, id: TaskId) -> Option<u32> {
        self.target_set(id)
            .iter()
            .map(|t| (t ^ config).count_ones())
            .min()
    }
}

impl AdaptiveSystem for HypercubeSystem {
    type Config = u32;

    fn initial_config(&self) -> u32 {
        self.initial
    }

    fn adapt(&mut self, current: &u32, task: &Task, seed: Seed) -> Adaptation<u32> {
        let Some(mut dist) = self.distance_to_targets(*current, task.id()) else {
            return Adaptation {
                config: *current,
                cost: UNREACHABLE,
            };
        };
        let mut rng = seed.rng();
        let mut config = *current;
        let mut flips = 0u32;
        while dist > 0 {
            let improving: Vec<u32> = (0..self.bits)
                .filter(|&b| {
                    self.distance_to_targets(config ^ (1 << b), task.id())
                        .is_some_and(|d| d < dist)
                })
                .collect();
            let bit = improving[rng.random_range(0..improving.len())];
            config ^= 1 << bit;
            flips += 1;
            dist -= 1;
        }
        Adaptation {
            config,
            cost: f64::from(flips),
        }
    }

    fn reconfig_cost(&self, from: &u32, to: &u32) -> f64 {
        f64::from((from ^ to).count_ones())
    }

    fn performs(&self, config: &u32, task: &Task) -> bool {
        self.target_set(task.id()).binary_search(config).is_ok()
    }

    fn symmetric_reconfig(&self) -> bool {
        true
    }

    fn enumerate_configs(&self) -> Option<Vec<u32>> {
        Some((0..(1u32 << self.bits)).collect())
    }

    fn exec_cost(&self, _config: &u32, _input: State) -> Option<f64> {
        self.run_cost
    }
}
