// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::ga::{
    best_index, breed, evaluate_population, init_population, GenerationStats, Population,
};
use super::params::{GaParams, Scenario, Schedule};
use super::trace::{RunTrace, TraceRecord};
use crate::circuit::{CircuitParams, CyclePolicy, Genotype, TruthTable};
use crate::error::Result;
use crate::formalism::TaskId;
use crate::seed::Seed;

/// Population and bookkeeping after pretraining.
#[derive(Clone, Debug)]
pub struct Pretrained {
    pub population: Population,
    pub trace: RunTrace,
    /// Goal active in the last generation.
    pub last_goal: usize,
    /// Best genome of the final population on `last_goal`.
    pub best: Genotype,
}

/// Evolves a fresh population for `total_generations` under the schedule.
///
/// FG trains on goal 0 throughout. MVG starts at a uniformly drawn goal and
/// every `epoch_len` generations draws the next goal from the transition
/// matrix; the population carries over unless `reset_on_switch` is set.
///
/// Streams: `seed.label("init")` for the initial population, `"goals"` for
/// the goal walk, `"breed"` children per generation and `"reset"` for
/// re-randomization. FG and MVG runs with the same seed start from the same
/// population.
pub fn run_schedule(
    schedule: &Schedule,
    goals: &[TruthTable],
    ga: &GaParams,
    circuit: &CircuitParams,
    policy: CyclePolicy,
    total_generations: u32,
    seed: Seed,
) -> Result<Pretrained> {
    schedule.validate(goals.len())?;
    let mut pop = init_population(ga, circuit, seed.label("init"));
    let mut walk = seed.label("goals").rng();
    let breed_seed = seed.label("breed");

    let mut goal = match schedule.scenario {
        Scenario::Fixed => 0,
        Scenario::Varying => walk.random_range(0..goals.len()),
    };
    let mut trace = RunTrace::default();
    for gen in 0..total_generations {
        if schedule.scenario == Scenario::Varying && gen > 0 && gen % schedule.epoch_len == 0 {
            let next = draw_row(&schedule.transition[goal], walk.random());
            if schedule.reset_on_switch && next != goal {
                pop = init_population(ga, circuit, seed.label("reset").child(u64::from(gen)));
            }
            goal = next;
        }
        let fitness = evaluate_population(&pop, &goals[goal], circuit, policy);
        trace.push(TraceRecord::new(
            gen,
            TaskId(goal),
            &GenerationStats::of(&pop, &fitness),
        ));
        pop = breed(&pop, &fitness, ga, breed_seed.child(u64::from(gen)));
    }

    let fitness = evaluate_population(&pop, &goals[goal], circuit, policy);
    let best = pop[best_index(&fitness)].clone();
    trace.finish(false, total_generations, &best);
    Ok(Pretrained {
        population: pop,
        trace,
        last_goal: goal,
        best,
    })
}

fn draw_row(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
