// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Genetic algorithm settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub pop_size: usize,
    /// Per-bit flip probability.
    pub mutation_rate: f64,
    /// Probability that a child comes from single-point crossover rather than cloning.
    pub crossover_rate: f64,
    /// Best genomes copied unchanged into the next generation.
    pub elite_count: usize,
    /// Binary tournaments barely select on a fitness scale of 1/16 steps;
    /// the default is 5.
    pub tournament_size: usize,
    /// Cap on generations spent adapting to one goal.
    pub max_generations: u32,
}

impl GaParams {
    /// Desk-scale defaults for a genome of `genome_len` bits.
    pub fn defaults_for(genome_len: usize) -> Self {
        GaParams {
            pop_size: 1000,
            mutation_rate: 1.0 / genome_len as f64,
            crossover_rate: 0.5,
            elite_count: 1,
            tournament_size: 5,
            max_generations: 2000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size == 0 {
            return Err(Error::Config("ga.pop_size must be positive".into()));
        }
        for (name, p) in [
            ("ga.mutation_rate", self.mutation_rate),
            ("ga.crossover_rate", self.crossover_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must be in [0,1], got {p}")));
            }
        }
        // Equality is allowed: an all-elite step is the identity.
        if self.elite_count > self.pop_size {
            return Err(Error::Config(format!(
                "ga.elite_count ({}) exceeds ga.pop_size ({})",
                self.elite_count, self.pop_size
            )));
        }
        if self.tournament_size == 0 {
            return Err(Error::Config("ga.tournament_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    /// Fixed goal: only the first training task.
    #[serde(rename = "FG")]
    Fixed,
    /// Modularly varying goals: Markov walk over the training tasks.
    #[serde(rename = "MVG")]
    Varying,
}

impl Scenario {
    pub const BOTH: [Scenario; 2] = [Scenario::Fixed, Scenario::Varying];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fixed => "FG",
            Scenario::Varying => "MVG",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "FG" => Some(Scenario::Fixed),
            "MVG" => Some(Scenario::Varying),
            _ => None,
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Goal schedule during pretraining.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub scenario: Scenario,
    /// Generations between goal switches. Ignored for FG.
    pub epoch_len: u32,
    /// Row-stochastic transition matrix over the training goals.
    pub transition: Vec<Vec<f64>>,
    /// Re-randomize the population whenever the goal changes.
    pub reset_on_switch: bool,
}

impl Schedule {
    pub fn fixed() -> Self {
        Schedule {
            scenario: Scenario::Fixed,
            epoch_len: 1,
            transition: vec![vec![1.0]],
            reset_on_switch: false,
        }
    }

    /// Uniform walk over `n` goals, switching every `epoch_len` generations.
    pub fn varying(n: usize, epoch_len: u32) -> Self {
        Schedule {
            scenario: Scenario::Varying,
            epoch_len,
            transition: vec![vec![1.0 / n as f64; n]; n],
            reset_on_switch: false,
        }
    }

    pub fn for_scenario(scenario: Scenario, n: usize, epoch_len: u32) -> Self {
        match scenario {
            Scenario::Fixed => Schedule::fixed(),
            Scenario::Varying => Schedule::varying(n, epoch_len),
        }
    }

    pub fn validate(&self, n_goals: usize) -> Result<()> {
        if self.epoch_len == 0 {
            return Err(Error::Config("schedule.epoch_len must be >= 1".into()));
        }
        if self.scenario == Scenario::Varying {
            if self.transition.len() != n_goals
                || self.transition.iter().any(|r| r.len() != n_goals)
            {
                return Err(Error::Config(format!(
                    "transition matrix must be {n_goals}x{n_goals}"
                )));
            }
            for row in &self.transition {
                let sum: f64 = row.iter().sum();
                if row.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "transition row {row:?} is not a distribution"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = GaParams::defaults_for(100);
        assert_eq!(p.mutation_rate, 0.01);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn validation() {
        let base = GaParams::defaults_for(100);
        assert!(GaParams {
            pop_size: 0,
            ..base
        }
        .validate()
        .is_err());
        assert!(GaParams {
            mutation_rate: 1.5,
            ..base
        }
        .validate()
        .is_err());
        assert!(GaParams {
            crossover_rate: -0.1,
            ..base
        }
        .validate()
        .is_err());
        assert!(GaParams {
            elite_count: 1001,
            ..base
        }
        .validate()
        .is_err());
        assert!(GaParams {
            tournament_size: 0,
            ..base
        }
        .validate()
        .is_err());
        assert!(Schedule::varying(3, 0).validate(3).is_err());
        assert!(Schedule::varying(3, 20).validate(2).is_err());
        assert!(Schedule::varying(3, 20).validate(3).is_ok());
    }
}
