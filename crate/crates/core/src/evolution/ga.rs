// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;

use super::params::GaParams;
use super::trace::{RunTrace, TraceRecord};
use crate::circuit::{
    genome_table, table_fitness, CircuitParams, CyclePolicy, Genotype, TruthTable,
};
use crate::formalism::TaskId;
use crate::seed::{Seed, SimRng};

pub type Population = Vec<Genotype>;

/// `pop_size` uniform random genomes.
pub fn init_population(ga: &GaParams, circuit: &CircuitParams, seed: Seed) -> Population {
    let mut rng = seed.rng();
    (0..ga.pop_size)
        .map(|_| Genotype::random(circuit.genome_len(), &mut rng))
        .collect()
}

/// Truth tables of every genome, in population order.
pub fn population_tables(
    pop: &[Genotype],
    circuit: &CircuitParams,
    policy: CyclePolicy,
) -> Vec<TruthTable> {
    pop.par_iter()
        .map(|g| genome_table(g, circuit, policy))
        .collect()
}

/// Fitness of every genome against `goal`.
pub fn evaluate_population(
    pop: &[Genotype],
    goal: &TruthTable,
    circuit: &CircuitParams,
    policy: CyclePolicy,
) -> Vec<f64> {
    pop.par_iter()
        .map(|g| table_fitness(&genome_table(g, circuit, policy), goal))
        .collect()
}

/// Higher fitness first; among equals, lower index first.
fn rank_cmp(fitness: &[f64], a: usize, b: usize) -> Ordering {
    fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b))
}

/// Index of the best genome under the fitness-then-index order.
pub fn best_index(fitness: &[f64]) -> usize {
    (0..fitness.len())
        .min_by(|&a, &b| rank_cmp(fitness, a, b))
        .expect("nonempty population")
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_index: usize,
    pub best_hash: String,
}

impl GenerationStats {
    pub fn of(pop: &[Genotype], fitness: &[f64]) -> Self {
        let best = best_index(fitness);
        GenerationStats {
            best_fitness: fitness[best],
            mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
            best_index: best,
            best_hash: pop[best].digest(),
        }
    }
}

fn tournament(fitness: &[f64], size: usize, rng: &mut SimRng) -> usize {
    let n = fitness.len();
    let mut best = rng.random_range(0..n);
    for _ in 1..size {
        let c = rng.random_range(0..n);
        if rank_cmp(fitness, c, best) == Ordering::Less {
            best = c;
        }
    }
    best
}

/// Flips each bit independently with probability `rate`, by geometric skips.
fn mutate(g: &mut Genotype, rate: f64, rng: &mut SimRng) {
    if rate <= 0.0 {
        return;
    }
    let len = g.len();
    if rate >= 1.0 {
        (0..len).for_each(|i| g.flip(i));
        return;
    }
    let ln_keep = (1.0 - rate).ln();
    let mut i = 0usize;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / ln_keep).floor();
        if skip >= (len - i) as f64 {
            break;
        }
        i += skip as usize;
        g.flip(i);
        i += 1;
        if i >= len {
            break;
        }
    }
}

/// Next generation from an evaluated population.
///
/// The `elite_count` best genomes survive unchanged (kept in population
/// order). Every other slot draws its own stream `seed.child(slot)`, picks
/// parents by tournament, applies single-point crossover with probability
/// `crossover_rate`, then per-bit mutation.
pub fn breed(pop: &[Genotype], fitness: &[f64], ga: &GaParams, seed: Seed) -> Population {
    let n = pop.len();
    let elites = ga.elite_count.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    if elites > 0 && elites < n {
        order.select_nth_unstable_by(elites - 1, |&a, &b| rank_cmp(fitness, a, b));
    }
    let mut elite_idx: Vec<usize> = order[..elites].to_vec();
    elite_idx.sort_unstable();

    let children: Vec<Genotype> = (elites..n)
        .into_par_iter()
        .map(|slot| {
            let mut rng = seed.child(slot as u64).rng();
            let a = tournament(fitness, ga.tournament_size, &mut rng);
            let mut child = if rng.random::<f64>() < ga.crossover_rate {
                let b = tournament(fitness, ga.tournament_size, &mut rng);
                let len = pop[a].len();
                let point = if len > 1 { rng.random_range(1..len) } else { 0 };
                Genotype::crossover(&pop[a], &pop[b], point)
            } else {
                pop[a].clone()
            };
            mutate(&mut child, ga.mutation_rate, &mut rng);
            child
        })
        .collect();

    elite_idx
        .into_iter()
        .map(|i| pop[i].clone())
        .chain(children)
        .collect()
}

/// Evaluates `pop` against `goal` and breeds the next generation.
pub fn step_generation(
    pop: &[Genotype],
    goal: &TruthTable,
    ga: &GaParams,
    circuit: &CircuitParams,
    policy: CyclePolicy,
    seed: Seed,
) -> (Population, GenerationStats) {
    let fitness = evaluate_population(pop, goal, circuit, policy);
    let stats = GenerationStats::of(pop, &fitness);
    (breed(pop, &fitness, ga, seed), stats)
}

/// Result of evolving until some genome performs the goal.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// Generations bred before a solver appeared; the cap on failure.
    pub generations: u32,
    pub solved: bool,
    /// Lowest-index qualifying genome; on failure, the best genome at the cap.
    pub solver: Genotype,
    pub population: Population,
    pub trace: RunTrace,
}

/// Evolves `pop` on `goal` until a genome reaches fitness `>= eps` or
/// `max_generations` generations have been bred. Generation `g` breeds with
/// seed `seed.child(g)`.
#[allow(clippy::too_many_arguments)]
pub fn run_until_solved(
    mut pop: Population,
    goal: &TruthTable,
    goal_id: TaskId,
    eps: f64,
    ga: &GaParams,
    circuit: &CircuitParams,
    policy: CyclePolicy,
    seed: Seed,
) -> SolveOutcome {
    let mut trace = RunTrace::default();
    let mut gen = 0u32;
    loop {
        let fitness = evaluate_population(&pop, goal, circuit, policy);
        let stats = GenerationStats::of(&pop, &fitness);
        trace.push(TraceRecord::new(gen, goal_id, &stats));
        if let Some(i) = fitness.iter().position(|&f| f >= eps) {
            let solver = pop[i].clone();
            trace.finish(true, gen, &solver);
            return SolveOutcome {
                generations: gen,
                solved: true,
                solver,
                population: pop,
                trace,
            };
        }
        if gen >= ga.max_generations {
            let solver = pop[stats.best_index].clone();
            trace.finish(false, gen, &solver);
            return SolveOutcome {
                generations: gen,
                solved: false,
                solver,
                population: pop,
                trace,
            };
        }
        pop = breed(&pop, &fitness, ga, seed.child(u64::from(gen)));
        gen += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{modular_goal, BoolOp, GoalFamily};

    fn small_ga(pop_size: usize) -> GaParams {
        GaParams {
            pop_size,
            ..GaParams::defaults_for(100)
        }
    }

    fn goal() -> TruthTable {
        modular_goal(
            GoalFamily::new(BoolOp::And, BoolOp::Xor, BoolOp::Xor),
            &CircuitParams::default(),
        )
        .unwrap()
        .table
    }

    #[test]
    fn init_sizes_and_determinism() {
        let c = CircuitParams::default();
        let ga = small_ga(5000);
        let a = init_population(&ga, &c, Seed(1));
        assert_eq!(a.len(), 5000);
        assert!(a.iter().all(|g| g.len() == 100));
        assert_eq!(a, init_population(&ga, &c, Seed(1)));
        assert_ne!(a, init_population(&ga, &c, Seed(2)));
    }

    #[test]
    fn bit_frequencies_near_half() {
        let c = CircuitParams::default();
        let pop = init_population(&small_ga(5000), &c, Seed(77));
        // Binomial(5000, 1/2): sd of the frequency is ~0.0071, so 0.02 is ~2.8 sd
        // per locus; check the loci jointly through the max deviation bound 0.03
        // and the per-locus bound on the average.
        let mut worst: f64 = 0.0;
        let mut within = 0;
        for locus in 0..100 {
            let f = pop.iter().filter(|g| g.get(locus)).count() as f64 / 5000.0;
            worst = worst.max((f - 0.5).abs());
            if (f - 0.5).abs() <= 0.02 {
                within += 1;
            }
        }
        assert!(worst < 0.035, "max deviation {worst}");
        assert!(within >= 97, "{within} of 100 loci within 0.02");
    }

    #[test]
    fn identity_step() {
        let c = CircuitParams::default();
        let ga = GaParams {
            pop_size: 50,
            mutation_rate: 0.0,
            crossover_rate: 0.0,
            elite_count: 50,
            ..GaParams::defaults_for(100)
        };
        let pop = init_population(&ga, &c, Seed(3));
        let (next, _) = step_generation(&pop, &goal(), &ga, &c, CyclePolicy::Settle, Seed(4));
        assert_eq!(next, pop);
    }

    #[test]
    fn elitism_keeps_best_fitness() {
        let c = CircuitParams::default();
        let ga = small_ga(200);
        let mut pop = init_population(&ga, &c, Seed(5));
        let mut last = 0.0;
        for g in 0..30 {
            let (next, stats) = step_generation(
                &pop,
                &goal(),
                &ga,
                &c,
                CyclePolicy::Settle,
                Seed(6).child(g),
            );
            assert!(stats.best_fitness >= last);
            assert_eq!(next.len(), pop.len());
            last = stats.best_fitness;
            pop = next;
        }
    }

    #[test]
    fn planted_solver_found_immediately() {
        let c = CircuitParams::default();
        let ga = small_ga(100);
        let mut pop = init_population(&ga, &c, Seed(8));
        // Plant a genome that computes x1 (output wired to input 0) and use its table as goal.
        let planted = Genotype::zeros(100);
        let target = genome_table(&planted, &c, CyclePolicy::Settle);
        pop[37] = planted.clone();
        let fitness = evaluate_population(&pop, &target, &c, CyclePolicy::Settle);
        assert_eq!(fitness[37], 1.0);
        let out = run_until_solved(
            pop,
            &target,
            TaskId(0),
            1.0,
            &ga,
            &c,
            CyclePolicy::Settle,
            Seed(9),
        );
        assert!(out.solved);
        assert_eq!(out.generations, 0);
        let first = out
            .population
            .iter()
            .position(|g| genome_table(g, &c, CyclePolicy::Settle) == target)
            .unwrap();
        assert_eq!(out.solver, out.population[first]);
    }

    #[test]
    fn zero_cap_without_solver_fails() {
        let c = CircuitParams::default();
        let ga = GaParams {
            max_generations: 0,
            ..small_ga(20)
        };
        let pop = init_population(&ga, &c, Seed(10));
        let out = run_until_solved(
            pop,
            &goal(),
            TaskId(0),
            1.0,
            &ga,
            &c,
            CyclePolicy::Settle,
            Seed(11),
        );
        assert!(!out.solved);
        assert_eq!(out.generations, 0);
        assert_eq!(out.trace.records.len(), 1);
    }

    #[test]
    fn mutation_rate_matches_expectation() {
        let mut rng = Seed(12).rng();
        let mut flips = 0u32;
        let trials = 20_000;
        for _ in 0..trials {
            let mut g = Genotype::zeros(100);
            mutate(&mut g, 0.01, &mut rng);
            flips += g.count_ones();
        }
        // Mean 1 flip per genome; sd of the mean ~0.007.
        let mean = f64::from(flips) / f64::from(trials);
        assert!((mean - 1.0).abs() < 0.03, "{mean}");
    }

    #[test]
    fn tournament_prefers_fitter() {
        let fitness = vec![0.1, 0.9, 0.5];
        let mut rng = Seed(13).rng();
        let wins = (0..3000)
            .filter(|_| tournament(&fitness, 2, &mut rng) == 1)
            .count();
        // P(best of two draws is index 1) = 1 - (2/3)^2 = 5/9.
        assert!((wins as f64 / 3000.0 - 5.0 / 9.0).abs() < 0.04);
    }

    #[test]
    fn evaluation_matches_circuit_module() {
        let c = CircuitParams::default();
        let pop = init_population(&small_ga(300), &c, Seed(14));
        let g = goal();
        let fit = evaluate_population(&pop, &g, &c, CyclePolicy::Settle);
        let goal = crate::circuit::BooleanGoal::from_table(g);
        for (genome, f) in pop.iter().zip(&fit) {
            let topo = crate::circuit::decode(genome, &c).unwrap();
            let table = crate::circuit::truth_table(&topo, &c, CyclePolicy::Settle);
            assert_eq!(*f, crate::circuit::fitness(&table, &goal).unwrap());
        }
    }
}
