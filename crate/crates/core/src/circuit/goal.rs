// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::params::CircuitParams;
use super::table::TruthTable;
use crate::error::{Error, Result};
use crate::formalism::{Task, TaskContext, TaskId};

/// Two-input Boolean operations accepted in goal families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Eq,
    Nand,
    Nor,
    /// `a AND NOT b`
    Andn,
    /// `a OR NOT b`
    Orn,
}

impl BoolOp {
    pub const ALL: [BoolOp; 8] = [
        BoolOp::And,
        BoolOp::Or,
        BoolOp::Xor,
        BoolOp::Eq,
        BoolOp::Nand,
        BoolOp::Nor,
        BoolOp::Andn,
        BoolOp::Orn,
    ];

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Xor => a != b,
            BoolOp::Eq => a == b,
            BoolOp::Nand => !(a && b),
            BoolOp::Nor => !(a || b),
            BoolOp::Andn => a && !b,
            BoolOp::Orn => a || !b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoolOp::And => "AND",
            BoolOp::Or => "OR",
            BoolOp::Xor => "XOR",
            BoolOp::Eq => "EQ",
            BoolOp::Nand => "NAND",
            BoolOp::Nor => "NOR",
            BoolOp::Andn => "ANDN",
            BoolOp::Orn => "ORN",
        }
    }

    pub fn is_commutative(self) -> bool {
        !matches!(self, BoolOp::Andn | BoolOp::Orn)
    }
}

impl fmt::Display for BoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoolOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoolOp::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown Boolean operation {s:?}")))
    }
}

/// Goal family `t(x1,x2,x3,x4) = f(g(x1,x2), h(x3,x4))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[BoolOp; 3]", into = "[BoolOp; 3]")]
pub struct GoalFamily {
    pub f: BoolOp,
    pub g: BoolOp,
    pub h: BoolOp,
}

impl GoalFamily {
    pub const fn new(f: BoolOp, g: BoolOp, h: BoolOp) -> Self {
        GoalFamily { f, g, h }
    }

    pub fn eval(&self, x1: bool, x2: bool, x3: bool, x4: bool) -> bool {
        self.f.apply(self.g.apply(x1, x2), self.h.apply(x3, x4))
    }

    /// Positions among `(f, g, h)` where the two families differ.
    pub fn distance(&self, other: &GoalFamily) -> usize {
        usize::from(self.f != other.f)
            + usize::from(self.g != other.g)
            + usize::from(self.h != other.h)
    }
}

impl From<[BoolOp; 3]> for GoalFamily {
    fn from([f, g, h]: [BoolOp; 3]) -> Self {
        GoalFamily { f, g, h }
    }
}

impl From<GoalFamily> for [BoolOp; 3] {
    fn from(fam: GoalFamily) -> Self {
        [fam.f, fam.g, fam.h]
    }
}

impl fmt::Display for GoalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}(x1,x2),{}(x3,x4))", self.f, self.g, self.h)
    }
}

/// Target Boolean function of a circuit task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BooleanGoal {
    pub table: TruthTable,
    pub family: Option<GoalFamily>,
}

impl BooleanGoal {
    pub fn from_table(table: TruthTable) -> Self {
        BooleanGoal {
            table,
            family: None,
        }
    }
}

/// Truth table of a four-input goal family.
pub fn modular_goal(family: GoalFamily, params: &CircuitParams) -> Result<BooleanGoal> {
    if params.inputs != 4 {
        return Err(Error::Usage(format!(
            "goal families have four inputs, circuit has {}",
            params.inputs
        )));
    }
    let table = TruthTable::from_fn(4, |x| {
        family.eval(x & 8 != 0, x & 4 != 0, x & 2 != 0, x & 1 != 0)
    });
    Ok(BooleanGoal {
        table,
        family: Some(family),
    })
}

/// Wraps a goal as a formal task on `E = {0,1}^d` with threshold `eps`.
pub fn goal_task(id: TaskId, goal: &BooleanGoal, eps: f64) -> Result<Task> {
    let table = goal.table;
    let label = match goal.family {
        Some(f) => f.to_string(),
        None => table.to_string(),
    };
    Ok(Task::new(
        id,
        table.inputs() as u32,
        move |x| u64::from(table.get(x as usize)),
        eps,
    )?
    .with_label(label.clone())
    .with_distance_tag(label))
}

/// Recovers the goal table of a circuit task by querying its goal oracle.
pub fn task_table(task: &Task) -> TruthTable {
    TruthTable::from_fn(task.env_dim() as usize, |x| task.goal(x as u64) & 1 == 1)
}

/// Training and test contexts of the FG/MVG experiment.
#[derive(Clone, Debug)]
pub struct CircuitContexts {
    pub train: TaskContext,
    pub test: TaskContext,
    pub train_goals: Vec<BooleanGoal>,
    pub test_goals: Vec<BooleanGoal>,
}

/// Builds the training context (three families walked with a uniform 1/3
/// transition matrix) and the equally weighted test context.
///
/// Training tasks get ids `0..3`, test tasks `3..3+n`. `threshold` maps each
/// goal to its performance threshold.
pub fn build_contexts(
    training: &[GoalFamily],
    test: &[GoalFamily],
    params: &CircuitParams,
    threshold: impl Fn(&BooleanGoal) -> f64,
) -> Result<CircuitContexts> {
    if training.len() != 3 {
        return Err(Error::Config(format!(
            "training context needs exactly 3 goal families, got {}",
            training.len()
        )));
    }
    for fam in training {
        let ok = matches!(fam.f, BoolOp::And | BoolOp::Or)
            && matches!(fam.g, BoolOp::Eq | BoolOp::Xor)
            && matches!(fam.h, BoolOp::Eq | BoolOp::Xor);
        if !ok {
            return Err(Error::Config(format!(
                "training family {fam} must use f in {{AND, OR}} and g, h in {{EQ, XOR}}"
            )));
        }
    }
    if test.is_empty() {
        return Err(Error::Config("test goal list is empty".into()));
    }

    let train_goals = training
        .iter()
        .map(|f| modular_goal(*f, params))
        .collect::<Result<Vec<_>>>()?;
    let test_goals = test
        .iter()
        .map(|f| modular_goal(*f, params))
        .collect::<Result<Vec<_>>>()?;

    let train_tasks = train_goals
        .iter()
        .enumerate()
        .map(|(i, g)| goal_task(TaskId(i), g, threshold(g)))
        .collect::<Result<Vec<_>>>()?;
    let test_tasks = test_goals
        .iter()
        .enumerate()
        .map(|(i, g)| goal_task(TaskId(training.len() + i), g, threshold(g)))
        .collect::<Result<Vec<_>>>()?;

    let third = 1.0 / 3.0;
    Ok(CircuitContexts {
        train: TaskContext::markov(train_tasks, vec![vec![third; 3]; 3])?,
        test: TaskContext::uniform(test_tasks)?,
        train_goals,
        test_goals,
    })
}
