// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::record::RunRecord;
use crate::circuit::{build_contexts, hamming, modular_goal, CircuitContexts, TruthTable};
use crate::error::{Error, Result};
use crate::evolution::{
    circuit_adaptive_system, estimate_random_baseline, run_schedule, threshold_from_baseline,
    CircuitSystem, RunTrace, Scenario,
};
use crate::formalism::AdaptiveSystem;
use crate::seed::Seed;

/// Goals, thresholds and the random baseline an experiment runs against.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub contexts: CircuitContexts,
    /// `F_r` per goal, training goals first.
    pub baseline: Vec<f64>,
    /// Success threshold per goal, in the same order.
    pub thresholds: Vec<f64>,
    pub config_hash: String,
}

/// Estimates the random baseline and builds both task contexts.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let circuit = config.circuit_params();
    let ga = config.ga_params();
    let goals = config
        .goals
        .training
        .iter()
        .chain(&config.goals.test)
        .map(|f| modular_goal(*f, &circuit).map(|g| g.table))
        .collect::<Result<Vec<TruthTable>>>()?;
    let baseline = estimate_random_baseline(
        &ga,
        &circuit,
        config.circuit.policy,
        &goals,
        config.threshold.baseline_populations,
        config.master_seed().label("baseline"),
    );
    let thresholds: Vec<f64> = baseline
        .iter()
        .map(|&fr| threshold_from_baseline(fr, config.threshold.normalized))
        .collect();
    let by_table = |t: &TruthTable| {
        goals
            .iter()
            .position(|g| g == t)
            .map(|i| thresholds[i])
            .unwrap_or(1.0)
    };
    let contexts = build_contexts(&config.goals.training, &config.goals.test, &circuit, |g| {
        by_table(&g.table)
    })?;
    Ok(Prepared {
        config: config.clone(),
        contexts,
        baseline,
        thresholds,
        config_hash: config.hash(),
    })
}

impl Prepared {
    fn run_seed(&self, seed: u64) -> Seed {
        self.config.master_seed().label("run").child(seed)
    }

    /// Pretrains a population for one seed and scenario.
    pub fn pretrain(&self, seed: u64, scenario: Scenario) -> Result<(CircuitSystem, RunTrace)> {
        let c = &self.config;
        let tables: Vec<TruthTable> = self.contexts.train_goals.iter().map(|g| g.table).collect();
        let out = run_schedule(
            &c.schedule(scenario),
            &tables,
            &c.ga_params(),
            &c.circuit_params(),
            c.circuit.policy,
            c.schedule.pretrain_generations,
            self.run_seed(seed),
        )?;
        let system = circuit_adaptive_system(
            out.population,
            c.ga_params(),
            c.circuit_params(),
            c.circuit.policy,
            Some(tables[out.last_goal]),
        );
        Ok((system, out.trace))
    }

    /// Adapts a copy of `system` to test goal `task`.
    pub fn adapt(
        &self,
        system: &CircuitSystem,
        seed: u64,
        scenario: Scenario,
        task: usize,
    ) -> Result<(RunRecord, RunTrace)> {
        let test = self.contexts.test.tasks();
        let t = test.get(task).ok_or_else(|| {
            Error::Usage(format!(
                "test task {task} out of range ({} tasks)",
                test.len()
            ))
        })?;
        let start = Instant::now();
        let mut sys = system.clone();
        let pre = sys.initial_config();
        let adapt_seed = self
            .run_seed(seed)
            .label(scenario.name())
            .label("adapt")
            .child(task as u64);
        let (outcome, trace) = sys.adapt_traced(&pre, t, adapt_seed);
        let reco = hamming(&pre, &outcome.solver)?;
        let record = RunRecord {
            seed,
            scenario,
            task,
            goal: t.label().to_string(),
            pre,
            post: outcome.solver,
            adaption_cost: outcome.generations,
            reconfiguration_cost: reco,
            solved: outcome.solved,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            config_hash: self.config_hash.clone(),
        };
        Ok((record, trace))
    }

    /// All test adaptations for one seed and scenario, in task order.
    pub fn run_cell(&self, seed: u64, scenario: Scenario) -> Result<Vec<RunRecord>> {
        let (system, _) = self.pretrain(seed, scenario)?;
        (0..self.config.goals.test.len())
            .into_par_iter()
            .map(|task| self.adapt(&system, seed, scenario, task).map(|(r, _)| r))
            .collect()
    }
}

/// Runs every seed under both scenarios. `sink` receives each seed's
/// records (FG then MVG, tasks in order) as soon as they exist.
pub fn run_experiment(
    config: &ExperimentConfig,
    mut sink: impl FnMut(&[RunRecord]) -> Result<()>,
    progress: impl Fn(&str),
) -> Result<Vec<RunRecord>> {
    let prepared = prepare(config)?;
    progress(&format!(
        "baseline F_r: {}",
        prepared
            .baseline
            .iter()
            .map(|f| format!("{f:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    let mut all = Vec::new();
    let seeds = config.seeds();
    for (i, &seed) in seeds.iter().enumerate() {
        let batches = Scenario::BOTH
            .par_iter()
            .map(|&sc| prepared.run_cell(seed, sc))
            .collect::<Result<Vec<_>>>()?;
        let batch: Vec<RunRecord> = batches.into_iter().flatten().collect();
        sink(&batch)?;
        let solved = batch.iter().filter(|r| r.solved).count();
        progress(&format!(
            "seed {seed} ({}/{}): {solved}/{} solved",
            i + 1,
            seeds.len(),
            batch.len()
        ));
        all.extend(batch);
    }
    Ok(all)
}

/// Re-runs the adaptation behind `record` and checks it reproduces exactly.
pub fn replay(record: &RunRecord, config: &ExperimentConfig) -> Result<RunTrace> {
    let hash = config.hash();
    if record.config_hash != hash {
        return Err(Error::Integrity(format!(
            "record was produced by config {}, replaying with {hash}",
            record.config_hash
        )));
    }
    let prepared = prepare(config)?;
    let (system, _) = prepared.pretrain(record.seed, record.scenario)?;
    let (again, trace) = prepared.adapt(&system, record.seed, record.scenario, record.task)?;
    if !again.same_outcome(record) {
        return Err(Error::Integrity(format!(
            "replay of seed {} {} task {} diverged: cost {} vs {}, post {} vs {}",
            record.seed,
            record.scenario,
            record.task,
            again.adaption_cost,
            record.adaption_cost,
            again.post.digest(),
            record.post.digest()
        )));
    }
    Ok(trace)
}
