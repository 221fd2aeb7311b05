// SPDX-License-Identifier: Apache-2.0

//! Reconfigurability, adaptability, total cost, task richness and task diversity.
//!
//! Every Monte Carlo estimator runs its trials from per-trial seeds derived
//! from one master seed and collects results by trial index, so the estimate
//! does not depend on how rayon schedules the trials.

use rayon::prelude::*;

use super::context::{sample_history, TaskContext};
use super::system::{average_exec_cost, AdaptiveSystem, UNREACHABLE};
use super::task::{CostBudget, Task, TaskDistance, TaskHistory, TaskId};
use crate::error::{Error, Result};
use crate::seed::Seed;
use crate::stats::Estimate;

/// Streams longer than this stop counting even if the budget is not spent.
/// Only reachable when tasks cost nothing.
pub const MAX_STREAM_LEN: usize = 100_000;

/// Minimal reconfiguration cost between two tasks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinReco {
    pub cost: f64,
    /// `false` when computed from sampled solution sets; the cost is then an
    /// upper bound on the true minimum.
    pub exact: bool,
}

/// Every configuration in which the system performs `task`.
pub fn solution_set<S: AdaptiveSystem>(system: &S, task: &Task) -> Result<Vec<S::Config>> {
    let configs = system
        .enumerate_configs()
        .ok_or_else(|| Error::Usage("system does not enumerate its configurations".into()))?;
    Ok(configs
        .into_iter()
        .filter(|c| system.performs(c, task))
        .collect())
}

/// Exact minimal reconfiguration cost from `t1` to `t2` by enumeration.
pub fn min_reconfiguration_cost<S: AdaptiveSystem>(
    system: &S,
    t1: &Task,
    t2: &Task,
) -> Result<MinReco> {
    let a = solution_set(system, t1)?;
    let b = if t1.id() == t2.id() {
        a.clone()
    } else {
        solution_set(system, t2)?
    };
    Ok(MinReco {
        cost: min_pair_cost(system, &a, &b),
        exact: true,
    })
}

/// Minimal reconfiguration cost over sampled solution sets (an upper bound).
pub fn min_reconfiguration_cost_sampled<S: AdaptiveSystem>(
    system: &S,
    observed_t1: &[S::Config],
    observed_t2: &[S::Config],
) -> MinReco {
    MinReco {
        cost: min_pair_cost(system, observed_t1, observed_t2),
        exact: false,
    }
}

fn min_pair_cost<S: AdaptiveSystem>(system: &S, a: &[S::Config], b: &[S::Config]) -> f64 {
    let mut best = UNREACHABLE;
    for x in a {
        for y in b {
            let c = system.reconfig_cost(x, y);
            if c < best {
                best = c;
                if best == 0.0 {
                    return 0.0;
                }
            }
        }
    }
    best
}

/// Exact min-reco cost for every ordered pair of context tasks, indexed by
/// position in the context.
pub fn min_reco_matrix<S: AdaptiveSystem>(
    system: &S,
    context: &TaskContext,
) -> Result<Vec<Vec<f64>>> {
    let sets = context
        .tasks()
        .iter()
        .map(|t| solution_set(system, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(sets
        .iter()
        .map(|a| sets.iter().map(|b| min_pair_cost(system, a, b)).collect())
        .collect())
}

/// Worst-case reconfigurability: minus the largest pairwise min-reco cost.
pub fn worst_case_reconfigurability<S: AdaptiveSystem>(
    system: &S,
    context: &TaskContext,
) -> Result<f64> {
    let m = min_reco_matrix(system, context)?;
    let worst = m.iter().flatten().copied().fold(0.0, f64::max);
    Ok(-worst)
}

#[derive(Clone, Copy, Debug)]
pub enum Averaging {
    /// Weighted sum over all ordered task pairs.
    Exact,
    /// Mean over sampled independent task pairs.
    MonteCarlo { samples: usize, seed: Seed },
}

/// Average-case reconfigurability `-E[min-reco(T1, T2)]` for independent
/// `T1, T2` drawn from the context's marginal distribution.
pub fn average_case_reconfigurability<S: AdaptiveSystem>(
    system: &S,
    context: &TaskContext,
    mode: Averaging,
) -> Result<Estimate> {
    let m = min_reco_matrix(system, context)?;
    let q = context.marginal();
    match mode {
        Averaging::Exact => {
            let mut total = 0.0;
            for (i, row) in m.iter().enumerate() {
                for (j, &c) in row.iter().enumerate() {
                    let w = q[i] * q[j];
                    if w > 0.0 {
                        total += w * c;
                    }
                }
            }
            Ok(Estimate::exact(-total))
        }
        Averaging::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Usage("need at least one Monte Carlo sample".into()));
            }
            let mut rng = seed.rng();
            let costs: Vec<f64> = (0..samples)
                .map(|_| {
                    let i = context.draw_independent(&mut rng);
                    let j = context.draw_independent(&mut rng);
                    m[i][j]
                })
                .collect();
            Ok(Estimate::from_samples(&costs).negated())
        }
    }
}

/// One adaptability trial.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptTrial {
    pub history: TaskHistory,
    pub test_task: TaskId,
    /// Adaption cost for the test task; unreachable if any adaptation failed.
    pub cost: f64,
}

/// Runs `n_trials` adaptability trials with histories of length `history_len`.
///
/// Each trial starts a fresh clone of `system` at its initial configuration,
/// adapts through a sampled history, then adapts to a test task: the next
/// step of the chain for Markov contexts, an independent draw otherwise.
pub fn adaptability_trials<S>(
    system: &S,
    context: &TaskContext,
    history_len: usize,
    n_trials: usize,
    seed: Seed,
) -> Result<Vec<AdaptTrial>>
where
    S: AdaptiveSystem + Clone + Send + Sync,
{
    if n_trials == 0 {
        return Err(Error::Usage("adaptability needs at least one trial".into()));
    }
    Ok((0..n_trials as u64)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seed.child(trial);
            let mut rng = trial_seed.label("tasks").rng();
            let history = sample_history(context, history_len, &mut rng);
            let test_idx = match history.last() {
                Some(last) => context.draw_next(
                    context.index_of(last).expect("sampled from context"),
                    &mut rng,
                ),
                None => context.draw_initial(&mut rng),
            };
            let test_task = &context.tasks()[test_idx];

            let mut sys = system.clone();
            let mut config = sys.initial_config();
            let mut failed = false;
            for (step, id) in history.entries.iter().enumerate() {
                let task = context.task(*id).expect("sampled from context");
                let a = sys.adapt(&config, task, trial_seed.child(step as u64));
                if !a.succeeded() {
                    failed = true;
                    break;
                }
                config = a.config;
            }
            let cost = if failed {
                UNREACHABLE
            } else {
                sys.adapt(&config, test_task, trial_seed.child(history_len as u64))
                    .cost
            };
            AdaptTrial {
                history,
                test_task: test_task.id(),
                cost,
            }
        })
        .collect())
}

/// Adaptability `-E[c^ada(S, H_n, T)]`; failed trials are reported in
/// `failures` and left out of the mean.
pub fn adaptability<S>(
    system: &S,
    context: &TaskContext,
    history_len: usize,
    n_trials: usize,
    seed: Seed,
) -> Result<Estimate>
where
    S: AdaptiveSystem + Clone + Send + Sync,
{
    let trials = adaptability_trials(system, context, history_len, n_trials, seed)?;
    let costs: Vec<f64> = trials.iter().map(|t| t.cost).collect();
    Ok(Estimate::from_samples(&costs).negated())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepCost {
    pub task: TaskId,
    pub adaption: f64,
    pub run: f64,
}

impl StepCost {
    pub fn total(&self) -> f64 {
        self.adaption + self.run
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TotalCost {
    pub total: f64,
    pub steps: Vec<StepCost>,
    /// `false` when the system has no execution-cost model and run costs were taken as 0.
    pub run_cost_modeled: bool,
}

/// Total cost of performing `sequence` in order, starting from the initial
/// configuration. Step `i` adapts with seed `seed.child(i)`. An adaptation
/// failure makes the total unreachable and ends the sequence.
pub fn total_cost<S>(
    system: &S,
    context: &TaskContext,
    sequence: &[TaskId],
    seed: Seed,
) -> Result<TotalCost>
where
    S: AdaptiveSystem + Clone,
{
    if sequence.is_empty() {
        return Err(Error::Usage(
            "total cost needs a nonempty task sequence".into(),
        ));
    }
    let tasks = sequence
        .iter()
        .map(|id| {
            context
                .task(*id)
                .ok_or_else(|| Error::Usage(format!("unknown task {id}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sys = system.clone();
    let mut config = sys.initial_config();
    let mut steps = Vec::with_capacity(tasks.len());
    let mut total = 0.0;
    let mut modeled = true;
    for (i, task) in tasks.iter().enumerate() {
        let a = sys.adapt(&config, task, seed.child(i as u64));
        if !a.succeeded() {
            return Ok(TotalCost {
                total: UNREACHABLE,
                steps,
                run_cost_modeled: modeled,
            });
        }
        config = a.config;
        let run = match average_exec_cost(&sys, &config, task) {
            Some(c) => c,
            None => {
                modeled = false;
                0.0
            }
        };
        let step = StepCost {
            task: task.id(),
            adaption: a.cost,
            run,
        };
        total += step.total();
        steps.push(step);
    }
    Ok(TotalCost {
        total,
        steps,
        run_cost_modeled: modeled,
    })
}

/// Streams independent tasks into a fresh system clone and returns the
/// indices of the longest prefix whose total cost stays strictly below the
/// budget. The stream and adaptation seeds do not depend on the budget, so
/// prefixes for larger budgets extend those for smaller ones.
fn affordable_prefix<S>(
    system: &S,
    context: &TaskContext,
    budget: CostBudget,
    trial_seed: Seed,
) -> Vec<usize>
where
    S: AdaptiveSystem + Clone,
{
    let mut rng = trial_seed.label("tasks").rng();
    let mut sys = system.clone();
    let mut config = sys.initial_config();
    let mut spent = 0.0;
    let mut prefix = Vec::new();
    while prefix.len() < MAX_STREAM_LEN {
        let idx = context.draw_independent(&mut rng);
        let task = &context.tasks()[idx];
        let a = sys.adapt(&config, task, trial_seed.child(prefix.len() as u64));
        if !a.succeeded() {
            break;
        }
        let run = average_exec_cost(&sys, &a.config, task).unwrap_or(0.0);
        let next = spent + a.cost + run;
        if next >= budget.get() {
            break;
        }
        spent = next;
        config = a.config;
        prefix.push(idx);
    }
    prefix
}

/// Task richness: expected number of independent tasks performed strictly
/// within the budget.
pub fn task_richness<S>(
    system: &S,
    context: &TaskContext,
    budget: CostBudget,
    n_trials: usize,
    seed: Seed,
) -> Result<Estimate>
where
    S: AdaptiveSystem + Clone + Send + Sync,
{
    if n_trials == 0 {
        return Err(Error::Usage(
            "task richness needs at least one trial".into(),
        ));
    }
    let counts: Vec<f64> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| affordable_prefix(system, context, budget, seed.child(t)).len() as f64)
        .collect();
    Ok(Estimate::from_samples(&counts))
}

/// Distance-weighted length `1 + sum d(T_i, T_{i+1})` of a task sequence;
/// zero for the empty sequence.
pub fn sequence_length(context: &TaskContext, distance: &TaskDistance, indices: &[usize]) -> f64 {
    if indices.is_empty() {
        return 0.0;
    }
    let tasks = context.tasks();
    1.0 + indices
        .windows(2)
        .map(|w| distance.eval(&tasks[w[0]], &tasks[w[1]]))
        .sum::<f64>()
}

/// Task diversity: expected distance-weighted length of the longest
/// affordable prefix of an independent task stream.
pub fn task_diversity<S>(
    system: &S,
    context: &TaskContext,
    distance: &TaskDistance,
    budget: CostBudget,
    n_trials: usize,
    seed: Seed,
) -> Result<Estimate>
where
    S: AdaptiveSystem + Clone + Send + Sync,
{
    if n_trials == 0 {
        return Err(Error::Usage(
            "task diversity needs at least one trial".into(),
        ));
    }
    distance.validate(context.tasks())?;
    let lengths: Vec<f64> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let prefix = affordable_prefix(system, context, budget, seed.child(t));
            sequence_length(context, distance, &prefix)
        })
        .collect();
    Ok(Estimate::from_samples(&lengths))
}
