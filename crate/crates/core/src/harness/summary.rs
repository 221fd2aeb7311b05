// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::config::Aggregation;
use super::record::RunRecord;
use crate::evolution::Scenario;
use crate::seed::Seed;
use crate::stats::{bootstrap_ratio_ci, mean, median, std_err, Interval};

/// Cost statistics over one group of records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub mean_ada: Option<f64>,
    pub median_ada: Option<f64>,
    pub stderr_ada: Option<f64>,
    pub mean_reco: Option<f64>,
    pub fail_frac: f64,
    /// Records in the group, failures included.
    pub n: usize,
}

impl CostSummary {
    pub fn of<'a>(
        records: impl IntoIterator<Item = &'a RunRecord>,
        aggregation: Aggregation,
    ) -> Self {
        let records: Vec<&RunRecord> = records.into_iter().collect();
        let n = records.len();
        let used: Vec<&&RunRecord> = records
            .iter()
            .filter(|r| r.solved || aggregation == Aggregation::Cap)
            .collect();
        let ada: Vec<f64> = used.iter().map(|r| f64::from(r.adaption_cost)).collect();
        let reco: Vec<f64> = used
            .iter()
            .map(|r| f64::from(r.reconfiguration_cost))
            .collect();
        let failures = records.iter().filter(|r| !r.solved).count();
        CostSummary {
            mean_ada: mean(&ada),
            median_ada: median(&ada),
            stderr_ada: std_err(&ada),
            mean_reco: mean(&reco),
            fail_frac: if n == 0 {
                0.0
            } else {
                failures as f64 / n as f64
            },
            n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: Scenario,
    pub overall: CostSummary,
    /// `(test task index, summary)` in task order.
    pub per_task: Vec<(usize, CostSummary)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub aggregation: Aggregation,
    /// Scenarios present in the records, FG first.
    pub scenarios: Vec<ScenarioSummary>,
    /// Mean adaption cost FG / MVG.
    pub ada_ratio: Option<f64>,
    /// Mean reconfiguration cost FG / MVG.
    pub reco_ratio: Option<f64>,
}

impl SummaryStats {
    pub fn scenario(&self, s: Scenario) -> Option<&ScenarioSummary> {
        self.scenarios.iter().find(|x| x.scenario == s)
    }

    pub fn total_records(&self) -> usize {
        self.scenarios.iter().map(|s| s.overall.n).sum()
    }
}

fn in_scenario(records: &[RunRecord], s: Scenario) -> impl Iterator<Item = &RunRecord> {
    records.iter().filter(move |r| r.scenario == s)
}

/// Aggregates records per scenario and per test task.
pub fn summarize(records: &[RunRecord], aggregation: Aggregation) -> SummaryStats {
    let mut scenarios = Vec::new();
    for s in Scenario::BOTH {
        if in_scenario(records, s).next().is_none() {
            continue;
        }
        let mut tasks: Vec<usize> = in_scenario(records, s).map(|r| r.task).collect();
        tasks.sort_unstable();
        tasks.dedup();
        let per_task = tasks
            .into_iter()
            .map(|t| {
                (
                    t,
                    CostSummary::of(in_scenario(records, s).filter(|r| r.task == t), aggregation),
                )
            })
            .collect();
        scenarios.push(ScenarioSummary {
            scenario: s,
            overall: CostSummary::of(in_scenario(records, s), aggregation),
            per_task,
        });
    }
    let ratio = |get: fn(&CostSummary) -> Option<f64>| {
        let fg = scenarios.iter().find(|x| x.scenario == Scenario::Fixed)?;
        let mvg = scenarios.iter().find(|x| x.scenario == Scenario::Varying)?;
        Some(get(&fg.overall)? / get(&mvg.overall)?)
    };
    let ada_ratio = ratio(|c| c.mean_ada);
    let reco_ratio = ratio(|c| c.mean_reco);
    SummaryStats {
        aggregation,
        scenarios,
        ada_ratio,
        reco_ratio,
    }
}

/// A FG / MVG ratio with its bootstrap interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub point: f64,
    pub ci: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFlexibility {
    pub scenario: Scenario,
    /// Negative mean adaption cost.
    pub adaptability: Option<f64>,
    pub mean_reconfiguration_cost: Option<f64>,
    /// Negative mean reconfiguration cost.
    pub reconfigurability: Option<f64>,
    pub fail_frac: f64,
    pub n: usize,
}

/// Flexibility measures per scenario and FG / MVG cost ratios. A ratio is
/// `None` (undefined) when either scenario has no usable records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexibilityReport {
    pub scenarios: Vec<ScenarioFlexibility>,
    pub ada_ratio: Option<RatioEstimate>,
    pub reco_ratio: Option<RatioEstimate>,
    pub resamples: usize,
    pub level: f64,
}

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Flexibility report with 95% percentile-bootstrap intervals.
pub fn flexibility_report(
    records: &[RunRecord],
    aggregation: Aggregation,
    seed: Seed,
) -> FlexibilityReport {
    let level = 0.95;
    let samples = |s: Scenario, f: fn(&RunRecord) -> u32| -> Vec<f64> {
        in_scenario(records, s)
            .filter(|r| r.solved || aggregation == Aggregation::Cap)
            .map(|r| f64::from(f(r)))
            .collect()
    };
    let scenarios = Scenario::BOTH
        .into_iter()
        .filter(|&s| in_scenario(records, s).next().is_some())
        .map(|s| {
            let c = CostSummary::of(in_scenario(records, s), aggregation);
            ScenarioFlexibility {
                scenario: s,
                adaptability: c.mean_ada.map(|m| -m),
                mean_reconfiguration_cost: c.mean_reco,
                reconfigurability: c.mean_reco.map(|m| -m),
                fail_frac: c.fail_frac,
                n: c.n,
            }
        })
        .collect();
    let estimate = |f: fn(&RunRecord) -> u32, label: &str| {
        let fg = samples(Scenario::Fixed, f);
        let mvg = samples(Scenario::Varying, f);
        let point = mean(&fg)? / mean(&mvg)?;
        let ci = bootstrap_ratio_ci(&fg, &mvg, BOOTSTRAP_RESAMPLES, level, seed.label(label))?;
        Some(RatioEstimate { point, ci })
    };
    FlexibilityReport {
        scenarios,
        ada_ratio: estimate(|r| r.adaption_cost, "ada"),
        reco_ratio: estimate(|r| r.reconfiguration_cost, "reco"),
        resamples: BOOTSTRAP_RESAMPLES,
        level,
    }
}

impl FlexibilityReport {
    /// Plain-text table for terminals.
    pub fn render(&self) -> String {
        let opt = |x: Option<f64>| x.map_or("NA".to_string(), |v| format!("{v:.3}"));
        let mut out =
            String::from("scenario  adaptability  mean_reco  reconfigurability  fail_frac     n\n");
        for s in &self.scenarios {
            out.push_str(&format!(
                "{:<8}  {:>12}  {:>9}  {:>17}  {:>9.3}  {:>4}\n",
                s.scenario.name(),
                opt(s.adaptability),
                opt(s.mean_reconfiguration_cost),
                opt(s.reconfigurability),
                s.fail_frac,
                s.n
            ));
        }
        let ratio = |name: &str, r: &Option<RatioEstimate>| match r {
            Some(r) => format!(
                "{name} FG/MVG = {:.3}  [{:.3}, {:.3}] ({:.0}% bootstrap, {} resamples)\n",
                r.point,
                r.ci.lo,
                r.ci.hi,
                self.level * 100.0,
                self.resamples
            ),
            None => format!("{name} FG/MVG = undefined\n"),
        };
        out.push_str(&ratio("adaption cost", &self.ada_ratio));
        out.push_str(&ratio("reconfiguration cost", &self.reco_ratio));
        out
    }
}
