// SPDX-License-Identifier: Apache-2.0

use super::ga::{best_index, evaluate_population, run_until_solved, Population};
use super::params::GaParams;
use super::trace::RunTrace;
use crate::circuit::{
    genome_table, hamming, table_fitness, task_table, CircuitParams, CyclePolicy, Genotype,
    TruthTable,
};
use crate::formalism::{Adaptation, AdaptiveSystem, Task, UNREACHABLE};
use crate::seed::Seed;

/// A NAND-circuit population and its GA, seen as one adaptive system.
///
/// The configuration is a single genome: the best member of the population.
/// Adapting runs the GA from the current population until some genome
/// performs the task; the cost is the number of generations bred, and the
/// population carries over to the next adaptation.
#[derive(Clone, Debug)]
pub struct CircuitSystem {
    population: Population,
    ga: GaParams,
    circuit: CircuitParams,
    policy: CyclePolicy,
    /// Goal the population was last evolved on; ranks the initial configuration.
    last_goal: Option<TruthTable>,
}

/// Wraps a (pretrained) population as an adaptive system.
pub fn circuit_adaptive_system(
    population: Population,
    ga: GaParams,
    circuit: CircuitParams,
    policy: CyclePolicy,
    last_goal: Option<TruthTable>,
) -> CircuitSystem {
    assert!(
        !population.is_empty(),
        "circuit system needs a nonempty population"
    );
    CircuitSystem {
        population,
        ga,
        circuit,
        policy,
        last_goal,
    }
}

impl CircuitSystem {
    pub fn population(&self) -> &[Genotype] {
        &self.population
    }

    pub fn fitness_on(&self, genome: &Genotype, task: &Task) -> f64 {
        table_fitness(
            &genome_table(genome, &self.circuit, self.policy),
            &task_table(task),
        )
    }
}

/// Result of one circuit adaptation.
#[derive(Clone, Debug, PartialEq)]
pub struct Adapted {
    pub generations: u32,
    pub solved: bool,
    /// Qualifying genome, or the best one at the cap.
    pub solver: Genotype,
}

impl CircuitSystem {
    /// Adaptation with its per-generation trace. A `current` genome that
    /// already performs costs nothing and leaves the population untouched.
    pub fn adapt_traced(
        &mut self,
        current: &Genotype,
        task: &Task,
        seed: Seed,
    ) -> (Adapted, RunTrace) {
        let goal = task_table(task);
        if self.performs(current, task) {
            self.last_goal = Some(goal);
            let mut trace = RunTrace::default();
            trace.finish(true, 0, current);
            let done = Adapted {
                generations: 0,
                solved: true,
                solver: current.clone(),
            };
            return (done, trace);
        }
        let pop = std::mem::take(&mut self.population);
        let out = run_until_solved(
            pop,
            &goal,
            task.id(),
            task.perf_threshold(),
            &self.ga,
            &self.circuit,
            self.policy,
            seed,
        );
        self.population = out.population;
        self.last_goal = Some(goal);
        let done = Adapted {
            generations: out.generations,
            solved: out.solved,
            solver: out.solver,
        };
        (done, out.trace)
    }
}

impl AdaptiveSystem for CircuitSystem {
    type Config = Genotype;

    fn initial_config(&self) -> Genotype {
        match &self.last_goal {
            Some(goal) => {
                let f = evaluate_population(&self.population, goal, &self.circuit, self.policy);
                self.population[best_index(&f)].clone()
            }
            None => self.population[0].clone(),
        }
    }

    fn adapt(&mut self, current: &Genotype, task: &Task, seed: Seed) -> Adaptation<Genotype> {
        let (out, _) = self.adapt_traced(current, task, seed);
        Adaptation {
            cost: if out.solved {
                f64::from(out.generations)
            } else {
                UNREACHABLE
            },
            config: out.solver,
        }
    }

    fn reconfig_cost(&self, from: &Genotype, to: &Genotype) -> f64 {
        hamming(from, to).map(f64::from).unwrap_or(UNREACHABLE)
    }

    fn performs(&self, config: &Genotype, task: &Task) -> bool {
        self.fitness_on(config, task) >= task.perf_threshold()
    }

    fn symmetric_reconfig(&self) -> bool {
        true
    }
}
