// SPDX-License-Identifier: Apache-2.0

use super::goal::BooleanGoal;
use super::table::TruthTable;
use crate::error::{Error, Result};

/// Fraction of input rows on which `u` agrees with the goal.
pub fn fitness(u: &TruthTable, goal: &BooleanGoal) -> Result<f64> {
    if u.inputs() != goal.table.inputs() {
        return Err(Error::Usage(format!(
            "truth tables of {} and {} rows",
            u.len(),
            goal.table.len()
        )));
    }
    Ok(table_fitness(u, &goal.table))
}

pub(crate) fn table_fitness(u: &TruthTable, t: &TruthTable) -> f64 {
    f64::from(u.agreement(t)) / u.len() as f64
}

/// Binary performance: the task counts as performed iff `fitness >= eps`.
pub fn binary_performance(fitness: f64, eps: f64) -> bool {
    fitness >= eps
}
