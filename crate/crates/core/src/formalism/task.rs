// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the task environment, encoded as the bit pattern of its
/// `env_dim` binary state variables.
pub type State = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub usize);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

type Predicate = Arc<dyn Fn(State) -> bool + Send + Sync>;
type Oracle = Arc<dyn Fn(State) -> State + Send + Sync>;

/// A task: environment, feasible set, goal map and binary performance threshold.
///
/// The environment is `{0,1}^env_dim`. The goal oracle is evaluated on every
/// feasible state, which is the task's declared input set.
#[derive(Clone)]
pub struct Task {
    id: TaskId,
    label: String,
    env_dim: u32,
    feasible: Predicate,
    goal: Oracle,
    perf_threshold: f64,
    distance_tag: Option<String>,
}

impl Task {
    /// Task whose feasible set is the whole environment.
    pub fn new(
        id: TaskId,
        env_dim: u32,
        goal: impl Fn(State) -> State + Send + Sync + 'static,
        perf_threshold: f64,
    ) -> Result<Self> {
        if env_dim == 0 || env_dim > 32 {
            return Err(Error::Config(format!(
                "task {id}: env_dim must be in 1..=32, got {env_dim}"
            )));
        }
        if !(0.0..=1.0).contains(&perf_threshold) {
            return Err(Error::Config(format!(
                "task {id}: performance threshold {perf_threshold} outside [0,1]"
            )));
        }
        Ok(Task {
            id,
            label: id.to_string(),
            env_dim,
            feasible: Arc::new(|_| true),
            goal: Arc::new(goal),
            perf_threshold,
            distance_tag: None,
        })
    }

    pub fn with_feasible(
        mut self,
        feasible: impl Fn(State) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.feasible = Arc::new(feasible);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_distance_tag(mut self, tag: impl Into<String>) -> Self {
        self.distance_tag = Some(tag.into());
        self
    }

    pub fn with_threshold(mut self, perf_threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&perf_threshold) {
            return Err(Error::Config(format!(
                "task {}: performance threshold {perf_threshold} outside [0,1]",
                self.id
            )));
        }
        self.perf_threshold = perf_threshold;
        Ok(self)
    }

    pub fn id(&self) -> TaskId {
        self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn env_dim(&self) -> u32 {
        self.env_dim
    }

    pub fn perf_threshold(&self) -> f64 {
        self.perf_threshold
    }

    pub fn distance_tag(&self) -> Option<&str> {
        self.distance_tag.as_deref()
    }

    pub fn is_feasible(&self, state: State) -> bool {
        state < (1 << self.env_dim) && (self.feasible)(state)
    }

    pub fn goal(&self, state: State) -> State {
        (self.goal)(state)
    }

    /// Feasible states in increasing order.
    pub fn inputs(&self) -> impl Iterator<Item = State> + '_ {
        (0..(1u64 << self.env_dim)).filter(move |&s| (self.feasible)(s))
    }
}

impl fmt::Debug for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Task")
            .field("id", &self.id)
            .field("label", &self.label)
            .field("env_dim", &self.env_dim)
            .field("perf_threshold", &self.perf_threshold)
            .field("distance_tag", &self.distance_tag)
            .finish_non_exhaustive()
    }
}

/// Ordered record of the tasks a system has already performed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskHistory {
    pub entries: Vec<TaskId>,
}

impl TaskHistory {
    pub fn empty() -> Self {
        TaskHistory::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<TaskId> {
        self.entries.last().copied()
    }
}

/// Positive total cost budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBudget(f64);

impl CostBudget {
    pub fn new(budget: f64) -> Result<Self> {
        if budget > 0.0 && !budget.is_nan() {
            Ok(CostBudget(budget))
        } else {
            Err(Error::Config(format!(
                "cost budget must be > 0, got {budget}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Symmetric, nonnegative distance between tasks.
#[derive(Clone)]
pub struct TaskDistance(Arc<dyn Fn(&Task, &Task) -> f64 + Send + Sync>);

impl TaskDistance {
    pub fn new(f: impl Fn(&Task, &Task) -> f64 + Send + Sync + 'static) -> Self {
        TaskDistance(Arc::new(f))
    }

    /// Unit distance between distinct tasks.
    pub fn discrete() -> Self {
        TaskDistance::new(|a, b| if a.id() == b.id() { 0.0 } else { 1.0 })
    }

    pub fn constant(c: f64) -> Self {
        TaskDistance::new(move |a, b| if a.id() == b.id() { 0.0 } else { c })
    }

    pub fn eval(&self, a: &Task, b: &Task) -> f64 {
        (self.0)(a, b)
    }

    /// Checks the distance axioms on every pair of `tasks`.
    pub fn validate(&self, tasks: &[Task]) -> Result<()> {
        for a in tasks {
            let d = self.eval(a, a);
            if d != 0.0 {
                return Err(Error::Config(format!(
                    "d({0},{0}) = {d}, expected 0",
                    a.id()
                )));
            }
            for b in tasks {
                let ab = self.eval(a, b);
                let ba = self.eval(b, a);
                if !(ab >= 0.0) || ab != ba {
                    return Err(Error::Config(format!(
                        "distance not symmetric/nonnegative on ({}, {}): {ab} vs {ba}",
                        a.id(),
                        b.id()
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TaskDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TaskDistance(..)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_must_be_unit_interval() {
        assert!(Task::new(TaskId(0), 2, |s| s, 1.2).is_err());
        assert!(Task::new(TaskId(0), 2, |s| s, -0.1).is_err());
        assert!(Task::new(TaskId(0), 2, |s| s, 0.0).is_ok());
    }

    #[test]
    fn inputs_respect_feasible_set() {
        let t = Task::new(TaskId(1), 3, |s| s, 1.0)
            .unwrap()
            .with_feasible(|s| s % 2 == 0);
        assert_eq!(t.inputs().collect::<Vec<_>>(), vec![0, 2, 4, 6]);
        assert!(!t.is_feasible(8));
    }

    #[test]
    fn budget_positive() {
        assert!(CostBudget::new(0.0).is_err());
        assert!(CostBudget::new(f64::NAN).is_err());
        assert_eq!(CostBudget::new(2.5).unwrap().get(), 2.5);
    }

    #[test]
    fn distance_validation() {
        let tasks: Vec<Task> = (0..3)
            .map(|i| Task::new(TaskId(i), 1, |s| s, 1.0).unwrap())
            .collect();
        assert!(TaskDistance::discrete().validate(&tasks).is_ok());
        let skew = TaskDistance::new(|a, b| (a.id().0 as f64) - (b.id().0 as f64));
        assert!(skew.validate(&tasks).is_err());
        let self_dist = TaskDistance::new(|_, _| 1.0);
        assert!(self_dist.validate(&tasks).is_err());
    }
}
