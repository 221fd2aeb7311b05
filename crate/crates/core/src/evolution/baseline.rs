// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::ga::{init_population, population_tables};
use super::params::GaParams;
use crate::circuit::{table_fitness, CircuitParams, CyclePolicy, TruthTable};
use crate::seed::Seed;

/// Best fitness rescaled against the random-population baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedFitness {
    /// Best fitness in the population.
    pub best: f64,
    /// Mean best fitness of random populations of the same size.
    pub baseline: f64,
    pub normalized: f64,
}

impl NormalizedFitness {
    pub fn new(best: f64, baseline: f64) -> Self {
        let normalized = if baseline < 1.0 {
            (best - baseline) / (1.0 - baseline)
        } else {
            // Random search already solves the goal; any population does too.
            1.0
        };
        NormalizedFitness {
            best,
            baseline,
            normalized,
        }
    }
}

/// Raw-fitness threshold equivalent to a normalized-fitness threshold:
/// `F > eps` iff `F_N > normalized_threshold`.
pub fn threshold_from_baseline(baseline: f64, normalized_threshold: f64) -> f64 {
    baseline + (1.0 - baseline) * normalized_threshold
}

/// Mean over `n_populations` fresh random populations of the best fitness
/// against each goal. Population `p` uses seed `seed.child(p)`.
pub fn estimate_random_baseline(
    ga: &GaParams,
    circuit: &CircuitParams,
    policy: CyclePolicy,
    goals: &[TruthTable],
    n_populations: usize,
    seed: Seed,
) -> Vec<f64> {
    assert!(n_populations >= 1, "baseline needs at least one population");
    let mut sums = vec![0.0; goals.len()];
    for p in 0..n_populations {
        let pop = init_population(ga, circuit, seed.child(p as u64));
        let tables = population_tables(&pop, circuit, policy);
        for (sum, goal) in sums.iter_mut().zip(goals) {
            *sum += tables
                .iter()
                .map(|t| table_fitness(t, goal))
                .fold(0.0, f64::max);
        }
    }
    sums.iter().map(|s| s / n_populations as f64).collect()
}
