// SPDX-License-Identifier: Apache-2.0

use super::task::{State, Task};
use crate::seed::Seed;

/// Cost of something that cannot be done: an unsolvable task, a failed
/// adaptation, an empty solution set.
pub const UNREACHABLE: f64 = f64::INFINITY;

/// Outcome of adapting a system to a task.
#[derive(Clone, Debug, PartialEq)]
pub struct Adaptation<C> {
    /// New configuration; on failure, whatever the system ended up with.
    pub config: C,
    /// Search plus reconfiguration cost, [`UNREACHABLE`] on failure.
    pub cost: f64,
}

impl<C> Adaptation<C> {
    pub fn succeeded(&self) -> bool {
        self.cost.is_finite()
    }
}

/// A configurable system that can adapt itself to tasks.
///
/// Implementations may carry learning state (a GA population, a cache) that
/// `adapt` updates. Estimators clone the system once per trial so every trial
/// starts from the same state.
pub trait AdaptiveSystem {
    type Config: Clone;

    /// Configuration before any task has been seen.
    fn initial_config(&self) -> Self::Config;

    /// Adapts from `current` until the system performs `task`.
    ///
    /// `seed` keys all randomness the search uses.
    fn adapt(
        &mut self,
        current: &Self::Config,
        task: &Task,
        seed: Seed,
    ) -> Adaptation<Self::Config>;

    /// Cost of moving between two configurations; zero on the diagonal.
    fn reconfig_cost(&self, from: &Self::Config, to: &Self::Config) -> f64;

    /// Binary performance predicate.
    fn performs(&self, config: &Self::Config, task: &Task) -> bool;

    /// Whether `reconfig_cost` is symmetric.
    fn symmetric_reconfig(&self) -> bool {
        false
    }

    /// Whole configuration space, for systems small enough to enumerate.
    fn enumerate_configs(&self) -> Option<Vec<Self::Config>> {
        None
    }

    /// Execution cost of running `config` on one input; `None` when the
    /// system has no execution-cost model.
    fn exec_cost(&self, _config: &Self::Config, _input: State) -> Option<f64> {
        None
    }
}

/// Average-case execution cost of `config` on `task`, with the input drawn
/// uniformly from the task's feasible states. `None` without a cost model.
pub fn average_exec_cost<S: AdaptiveSystem + ?Sized>(
    system: &S,
    config: &S::Config,
    task: &Task,
) -> Option<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for x in task.inputs() {
        total += system.exec_cost(config, x)?;
        count += 1;
    }
    Some(if count == 0 {
        0.0
    } else {
        total / count as f64
    })
}
