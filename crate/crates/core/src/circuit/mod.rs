// SPDX-License-Identifier: Apache-2.0

//! NAND circuits as an evolvable task-performing system.
//!
//! A genome of `m(2M+1)` bits wires `M` NAND gates and one output to the `d`
//! primary inputs and to each other. Goals are Boolean functions given as
//! truth tables; fitness is the fraction of matching rows.

mod fitness;
mod genotype;
mod goal;
mod params;
mod table;
mod wiring;

pub(crate) use fitness::table_fitness;
pub use fitness::{binary_performance, fitness};
pub use genotype::{hamming, Genotype};
pub use goal::{
    build_contexts, goal_task, modular_goal, task_table, BoolOp, BooleanGoal, CircuitContexts,
    GoalFamily,
};
pub use params::{CircuitParams, MAX_GATES, MAX_INPUTS};
pub use table::TruthTable;
pub use wiring::{decode, evaluate, genome_table, nand, truth_table, CircuitTopology, CyclePolicy};
