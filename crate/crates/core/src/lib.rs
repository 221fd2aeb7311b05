// SPDX-License-Identifier: Apache-2.0

//! Flexibility measures for task-performing systems, and an evolvability
//! testbed built on them: NAND circuits evolved by a genetic algorithm under
//! fixed or modularly varying goals.
//!
//! * [`formalism`] – tasks, contexts, the [`AdaptiveSystem`] trait and the
//!   reconfigurability / adaptability / richness / diversity measures.
//! * [`circuit`] – genotype encoding, decoding and evaluation of NAND circuits,
//!   Boolean goal families and fitness.
//! * [`evolution`] – the genetic algorithm, goal schedules and the circuit
//!   system as an [`AdaptiveSystem`].
//! * [`harness`] – reproducible FG vs. MVG experiments, statistics and persistence.
//! * [`oracle`] – brute-force cross-checks used by tests and the `oracle` command.

pub mod circuit;
pub mod error;
pub mod evolution;
pub mod formalism;
pub mod harness;
pub mod oracle;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use formalism::{AdaptiveSystem, Task, TaskContext, TaskId};
pub use seed::Seed;
