// SPDX-License-Identifier: Apache-2.0

//! Genetic algorithm over circuit genomes, goal schedules and the
//! population-plus-GA adaptive system.

mod baseline;
mod ga;
mod params;
mod schedule;
mod system;
mod trace;

pub use baseline::{estimate_random_baseline, threshold_from_baseline, NormalizedFitness};
pub use ga::{
    best_index, breed, evaluate_population, init_population, population_tables, run_until_solved,
    step_generation, GenerationStats, Population, SolveOutcome,
};
pub use params::{GaParams, Scenario, Schedule};
pub use schedule::{run_schedule, Pretrained};
pub use system::{circuit_adaptive_system, Adapted, CircuitSystem};
pub use trace::{RunTrace, TraceRecord};
