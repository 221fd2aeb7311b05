// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ga::GenerationStats;
use crate::circuit::Genotype;
use crate::formalism::TaskId;

/// One generation of a run, as written to JSON lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub gen: u32,
    pub goal: usize,
    pub best_f: f64,
    pub mean_f: f64,
    pub best_hash: String,
}

impl TraceRecord {
    pub fn new(gen: u32, goal: TaskId, stats: &GenerationStats) -> Self {
        TraceRecord {
            gen,
            goal: goal.0,
            best_f: stats.best_fitness,
            mean_f: stats.mean_fitness,
            best_hash: stats.best_hash.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub solved: bool,
    pub generations: u32,
    pub final_best: Option<Genotype>,
}

impl RunTrace {
    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.gen < record.gen));
        self.records.push(record);
    }

    pub fn finish(&mut self, solved: bool, generations: u32, best: &Genotype) {
        self.solved = solved;
        self.generations = generations;
        self.final_best = Some(best.clone());
    }

    /// Goal ids in generation order.
    pub fn goals(&self) -> impl Iterator<Item = usize> + '_ {
        self.records.iter().map(|r| r.goal)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
