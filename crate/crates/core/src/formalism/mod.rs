// SPDX-License-Identifier: Apache-2.0

//! Tasks, task contexts and the flexibility measures of an adaptive system.

mod context;
mod hypercube;
mod measures;
mod pareto;
mod system;
mod task;

pub use context::{sample_history, Sampling, TaskContext};
pub use hypercube::{hypercube_reference_system, HypercubeSystem};
pub use measures::{
    adaptability, adaptability_trials, average_case_reconfigurability, min_reco_matrix,
    min_reconfiguration_cost, min_reconfiguration_cost_sampled, sequence_length, solution_set,
    task_diversity, task_richness, total_cost, worst_case_reconfigurability, AdaptTrial, Averaging,
    MinReco, StepCost, TotalCost, MAX_STREAM_LEN,
};
pub use pareto::pareto_dominates;
pub use system::{average_exec_cost, Adaptation, AdaptiveSystem, UNREACHABLE};
pub use task::{CostBudget, State, Task, TaskDistance, TaskHistory, TaskId};
