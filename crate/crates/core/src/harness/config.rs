// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{BoolOp, CircuitParams, CyclePolicy, GoalFamily};
use crate::error::{Error, Result};
use crate::evolution::{GaParams, Scenario, Schedule};
use crate::seed::Seed;

/// Everything an FG vs. MVG experiment depends on.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub circuit: CircuitSection,
    #[serde(default)]
    pub ga: GaSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub goals: GoalsSection,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitSection {
    pub inputs: usize,
    pub gates: usize,
    #[serde(default)]
    pub policy: CyclePolicy,
}

impl Default for CircuitSection {
    fn default() -> Self {
        let p = CircuitParams::default();
        CircuitSection {
            inputs: p.inputs,
            gates: p.gates,
            policy: CyclePolicy::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSection {
    pub pop_size: usize,
    /// Per-bit; `1/B` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_rate: Option<f64>,
    pub crossover_rate: f64,
    pub elite_count: usize,
    pub tournament_size: usize,
    pub max_generations: u32,
}

impl Default for GaSection {
    fn default() -> Self {
        let d = GaParams::defaults_for(CircuitParams::default().genome_len());
        GaSection {
            pop_size: d.pop_size,
            mutation_rate: None,
            crossover_rate: d.crossover_rate,
            elite_count: d.elite_count,
            tournament_size: d.tournament_size,
            max_generations: d.max_generations,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    /// Generations between MVG goal switches.
    pub epoch_len: u32,
    /// Pretraining length, the same for both scenarios.
    pub pretrain_generations: u32,
    #[serde(default)]
    pub reset_on_switch: bool,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection {
            epoch_len: 20,
            pretrain_generations: 200,
            reset_on_switch: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GoalsSection {
    /// `[f, g, h]` triples; the first is the FG goal.
    pub training: Vec<GoalFamily>,
    pub test: Vec<GoalFamily>,
}

impl Default for GoalsSection {
    fn default() -> Self {
        GoalsSection {
            training: default_training(),
            test: default_test(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    /// Success requires normalized fitness above this.
    pub normalized: f64,
    /// Random populations averaged for the baseline.
    pub baseline_populations: usize,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        ThresholdSection {
            normalized: 0.8,
            baseline_populations: 20,
        }
    }
}

/// How failed adaptations enter cost means.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Means over successful runs; failures reported as a fraction.
    #[default]
    Exclude,
    /// Failures count as `max_generations`.
    Cap,
}

impl Aggregation {
    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Exclude => "exclude",
            Aggregation::Cap => "cap",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exclude" => Some(Aggregation::Exclude),
            "cap" => Some(Aggregation::Cap),
            _ => None,
        }
    }
}

/// A seed count (`0..n`) or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn values(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seeds: Seeds,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seeds: Seeds::Count(20),
            master_seed: 2024,
            output_dir: None,
            aggregation: Aggregation::Exclude,
        }
    }
}

/// T1 = AND(XOR, XOR), T2 = OR(XOR, XOR), T3 = AND(XOR, EQ).
pub fn default_training() -> Vec<GoalFamily> {
    use BoolOp::*;
    vec![
        GoalFamily::new(And, Xor, Xor),
        GoalFamily::new(Or, Xor, Xor),
        GoalFamily::new(And, Xor, Eq),
    ]
}

pub fn default_test() -> Vec<GoalFamily> {
    DEFAULT_TEST
        .iter()
        .map(|&ops| GoalFamily::from(ops))
        .collect()
}

/// Every test goal puts an operator that appears in no training goal
/// (NAND, NOR, ANDN, ORN) into the g or h slot. Swapping f instead either
/// reproduces a training table (ANDN(XOR, XOR) is T3) or gives goals that
/// are rarely solved at all.
const DEFAULT_TEST: [[BoolOp; 3]; 20] = {
    use BoolOp::*;
    [
        [And, Nand, Xor],
        [And, Nor, Xor],
        [And, Andn, Xor],
        [And, Orn, Xor],
        [Or, Nand, Xor],
        [Or, Nor, Xor],
        [Or, Andn, Xor],
        [Or, Orn, Xor],
        [And, Nand, Eq],
        [And, Nor, Eq],
        [And, Andn, Eq],
        [And, Orn, Eq],
        [And, Xor, Nand],
        [And, Xor, Nor],
        [And, Xor, Andn],
        [And, Xor, Orn],
        [Or, Xor, Nand],
        [Or, Xor, Nor],
        [Or, Xor, Andn],
        [Or, Xor, Orn],
    ]
};

impl ExperimentConfig {
    /// Reads a TOML config and applies dotted `key=value` overrides.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, overrides).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Value =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let config: ExperimentConfig = doc
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn circuit_params(&self) -> CircuitParams {
        CircuitParams {
            inputs: self.circuit.inputs,
            gates: self.circuit.gates,
        }
    }

    pub fn ga_params(&self) -> GaParams {
        let b = self.circuit_params().genome_len();
        GaParams {
            pop_size: self.ga.pop_size,
            mutation_rate: self.ga.mutation_rate.unwrap_or(1.0 / b as f64),
            crossover_rate: self.ga.crossover_rate,
            elite_count: self.ga.elite_count,
            tournament_size: self.ga.tournament_size,
            max_generations: self.ga.max_generations,
        }
    }

    pub fn schedule(&self, scenario: Scenario) -> Schedule {
        let mut s =
            Schedule::for_scenario(scenario, self.goals.training.len(), self.schedule.epoch_len);
        s.reset_on_switch = self.schedule.reset_on_switch;
        s
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.run.seeds.values()
    }

    pub fn master_seed(&self) -> Seed {
        Seed(self.run.master_seed)
    }

    pub fn validate(&self) -> Result<()> {
        let circuit = self.circuit_params();
        circuit.validate()?;
        if circuit.inputs != 4 {
            return Err(Error::Config(format!(
                "circuit.inputs must be 4 for goal families, got {}",
                circuit.inputs
            )));
        }
        self.ga_params().validate()?;
        if self.ga.max_generations == 0 {
            return Err(Error::Config("ga.max_generations must be positive".into()));
        }
        if self.schedule.epoch_len == 0 {
            return Err(Error::Config(
                "schedule.epoch_len must be at least 1".into(),
            ));
        }
        if self.goals.training.len() != 3 {
            return Err(Error::Config(format!(
                "goals.training needs 3 families, got {}",
                self.goals.training.len()
            )));
        }
        if self.goals.test.is_empty() {
            return Err(Error::Config("goals.test is empty".into()));
        }
        let t = self.threshold.normalized;
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Config(format!(
                "threshold.normalized must be in (0,1), got {t}"
            )));
        }
        if self.threshold.baseline_populations == 0 {
            return Err(Error::Config(
                "threshold.baseline_populations must be positive".into(),
            ));
        }
        if self.seeds().is_empty() {
            return Err(Error::Config("run.seeds is empty".into()));
        }
        Ok(())
    }

    /// Digest of everything that determines results (the output directory
    /// does not).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.output_dir = None;
        let canon = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Sets `a.b.c = value` in a TOML document. The value is parsed as TOML
/// (`1000`, `0.5`, `true`, `[1, 2]`, `"x"`), falling back to a bare string.
pub fn apply_override(doc: &mut toml::Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override key {key:?} is malformed")));
    }
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = doc;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key}: {part} is not a table")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    node.as_table_mut()
        .ok_or_else(|| Error::Config(format!("override {key}: parent is not a table")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = ExperimentConfig::from_toml("", &[]).unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.goals.test.len(), 20);
        assert_eq!(c.circuit_params().genome_len(), 100);
        assert_eq!(c.ga_params().mutation_rate, 0.01);
    }

    #[test]
    fn toml_round_trip() {
        let c = ExperimentConfig::default();
        let back = ExperimentConfig::from_toml(&c.to_toml(), &[]).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash(), back.hash());
    }

    #[test]
    fn overrides_apply_and_change_hash() {
        let base = ExperimentConfig::default();
        let c =
            ExperimentConfig::from_toml("", &["ga.pop_size=50".into(), "run.seeds=[3, 4]".into()])
                .unwrap();
        assert_eq!(c.ga.pop_size, 50);
        assert_eq!(c.seeds(), vec![3, 4]);
        assert_ne!(c.hash(), base.hash());
        let c = ExperimentConfig::from_toml("", &["circuit.policy=feedforward".into()]).unwrap();
        assert_eq!(c.circuit.policy, CyclePolicy::Feedforward);
    }

    #[test]
    fn output_dir_does_not_change_hash() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.run.output_dir = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn schema_violations_are_config_errors() {
        for bad in [
            "ga.pop_size=-5",
            "ga.pop_size=0",
            "ga.bogus=1",
            "threshold.normalized=1.5",
            "run.seeds=[]",
            "circuit.inputs=5",
            "schedule.epoch_len=0",
            "goals.test=[]",
            "noequals",
        ] {
            let r = ExperimentConfig::from_toml("", &[bad.to_string()]);
            assert!(matches!(r, Err(Error::Config(_))), "{bad}: {r:?}");
        }
        assert!(matches!(
            ExperimentConfig::from_toml("[ga]\nfoo = 1", &[]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_toml("not toml [", &[]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn goal_families_parse_from_triples() {
        let c = ExperimentConfig::from_toml(
            "[goals]\ntraining = [[\"AND\",\"XOR\",\"XOR\"],[\"OR\",\"XOR\",\"XOR\"],[\"AND\",\"XOR\",\"EQ\"]]\ntest = [[\"NOR\",\"XOR\",\"XOR\"]]\n",
            &[],
        )
        .unwrap();
        assert_eq!(
            c.goals.test,
            vec![GoalFamily::new(BoolOp::Nor, BoolOp::Xor, BoolOp::Xor)]
        );
    }

    #[test]
    fn default_goals_have_distinct_tables() {
        let c = ExperimentConfig::default();
        let params = c.circuit_params();
        let tables: Vec<_> = c
            .goals
            .training
            .iter()
            .chain(&c.goals.test)
            .map(|&f| crate::circuit::modular_goal(f, &params).unwrap().table)
            .collect();
        for (i, a) in tables.iter().enumerate() {
            for b in &tables[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }
}
