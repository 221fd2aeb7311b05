// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::task::{Task, TaskHistory, TaskId};
use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-9;

/// How a context presents its tasks.
#[derive(Clone, Debug, PartialEq)]
pub enum Sampling {
    /// Tasks drawn independently with these probabilities.
    Iid(Vec<f64>),
    /// Tasks follow a Markov chain with this row-stochastic matrix.
    Markov(Vec<Vec<f64>>),
}

/// A nonempty task set together with its sampling distribution.
#[derive(Clone, Debug)]
pub struct TaskContext {
    tasks: Vec<Task>,
    sampling: Sampling,
    /// Marginal used for independent draws: the weights in iid mode, a
    /// stationary distribution in Markov mode.
    marginal: Vec<f64>,
}

impl TaskContext {
    pub fn new(tasks: Vec<Task>, sampling: Sampling) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::Config("task context needs at least one task".into()));
        }
        for (i, a) in tasks.iter().enumerate() {
            if tasks[..i].iter().any(|b| b.id() == a.id()) {
                return Err(Error::Config(format!("duplicate task id {}", a.id())));
            }
        }
        let n = tasks.len();
        let marginal = match &sampling {
            Sampling::Iid(w) => {
                check_distribution(w, n, "weights")?;
                w.clone()
            }
            Sampling::Markov(rows) => {
                if rows.len() != n {
                    return Err(Error::Config(format!(
                        "transition matrix has {} rows for {n} tasks",
                        rows.len()
                    )));
                }
                for (i, row) in rows.iter().enumerate() {
                    check_distribution(row, n, &format!("transition row {i}"))?;
                }
                stationary(rows)
            }
        };
        Ok(TaskContext {
            tasks,
            sampling,
            marginal,
        })
    }

    pub fn uniform(tasks: Vec<Task>) -> Result<Self> {
        let n = tasks.len().max(1);
        TaskContext::new(tasks, Sampling::Iid(vec![1.0 / n as f64; n]))
    }

    pub fn iid(tasks: Vec<Task>, weights: Vec<f64>) -> Result<Self> {
        TaskContext::new(tasks, Sampling::Iid(weights))
    }

    pub fn markov(tasks: Vec<Task>, transition: Vec<Vec<f64>>) -> Result<Self> {
        TaskContext::new(tasks, Sampling::Markov(transition))
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn sampling(&self) -> &Sampling {
        &self.sampling
    }

    pub fn marginal(&self) -> &[f64] {
        &self.marginal
    }

    pub fn index_of(&self, id: TaskId) -> Option<usize> {
        self.tasks.iter().position(|t| t.id() == id)
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id() == id)
    }

    /// Draws a task index from the marginal distribution.
    pub fn draw_independent<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        draw(&self.marginal, rng)
    }

    /// First element of a history: a weighted draw in iid mode, uniform in Markov mode.
    pub fn draw_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.sampling {
            Sampling::Iid(w) => draw(w, rng),
            Sampling::Markov(_) => rng.random_range(0..self.tasks.len()),
        }
    }

    /// Successor of task index `prev`.
    pub fn draw_next<R: Rng + ?Sized>(&self, prev: usize, rng: &mut R) -> usize {
        match &self.sampling {
            Sampling::Iid(w) => draw(w, rng),
            Sampling::Markov(rows) => draw(&rows[prev], rng),
        }
    }

    /// Checks that every history entry names a task of this context.
    pub fn validate_history(&self, history: &TaskHistory) -> Result<()> {
        match history
            .entries
            .iter()
            .find(|id| self.index_of(**id).is_none())
        {
            Some(id) => Err(Error::Usage(format!(
                "history references unknown task {id}"
            ))),
            None => Ok(()),
        }
    }
}

/// Samples a task history of length `n` from the context.
///
/// Iid contexts draw each entry independently from the weights. Markov
/// contexts start at a uniformly drawn task and walk the transition matrix.
pub fn sample_history<R: Rng + ?Sized>(
    context: &TaskContext,
    n: usize,
    rng: &mut R,
) -> TaskHistory {
    let mut entries = Vec::with_capacity(n);
    let mut prev = None;
    for _ in 0..n {
        let idx = match prev {
            None => context.draw_initial(rng),
            Some(p) => context.draw_next(p, rng),
        };
        entries.push(context.tasks[idx].id());
        prev = Some(idx);
    }
    TaskHistory { entries }
}

fn check_distribution(p: &[f64], n: usize, what: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::Config(format!(
            "{what}: expected {n} entries, got {}",
            p.len()
        )));
    }
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Config(format!(
            "{what}: negative or non-finite probability"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::Config(format!(
            "{what}: probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn draw<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in p.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding left u above the cumulative sum; fall back to the last positive entry.
    p.iter().rposition(|&w| w > 0.0).unwrap_or(p.len() - 1)
}

/// Cesàro average of the chain started uniform; a stationary distribution
/// even for periodic chains.
fn stationary(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mut pi = vec![1.0 / n as f64; n];
    let mut avg = vec![0.0; n];
    const ITERS: usize = 4096;
    for _ in 0..ITERS {
        for (a, p) in avg.iter_mut().zip(&pi) {
            *a += p;
        }
        let mut next = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &q) in row.iter().enumerate() {
                next[j] += pi[i] * q;
            }
        }
        pi = next;
    }
    let total: f64 = avg.iter().sum();
    avg.iter().map(|a| a / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Seed;

    fn tasks(n: usize) -> Vec<Task> {
        (0..n)
            .map(|i| Task::new(TaskId(i), 1, |s| s, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(TaskContext::iid(tasks(2), vec![0.5, 0.6]).is_err());
        assert!(TaskContext::iid(tasks(2), vec![1.5, -0.5]).is_err());
        assert!(TaskContext::iid(tasks(2), vec![1.0]).is_err());
        assert!(TaskContext::markov(tasks(2), vec![vec![1.0, 0.0], vec![0.3, 0.6]]).is_err());
        assert!(TaskContext::markov(tasks(2), vec![vec![1.0, 0.0]]).is_err());
        assert!(TaskContext::uniform(vec![]).is_err());
    }

    #[test]
    fn rejects_duplicate_ids() {
        let mut t = tasks(2);
        t.push(Task::new(TaskId(1), 1, |s| s, 1.0).unwrap());
        assert!(TaskContext::uniform(t).is_err());
    }

    #[test]
    fn empty_history() {
        let ctx = TaskContext::uniform(tasks(3)).unwrap();
        let h = sample_history(&ctx, 0, &mut Seed(1).rng());
        assert!(h.is_empty());
    }

    #[test]
    fn single_task_history_repeats() {
        let ctx = TaskContext::uniform(tasks(1)).unwrap();
        let h = sample_history(&ctx, 3, &mut Seed(9).rng());
        assert_eq!(h.entries, vec![TaskId(0); 3]);
    }

    #[test]
    fn uniform_markov_frequencies() {
        let third = 1.0 / 3.0;
        let ctx = TaskContext::markov(tasks(3), vec![vec![third; 3]; 3]).unwrap();
        let n = 100_000;
        let h = sample_history(&ctx, n, &mut Seed(2024).rng());
        for i in 0..3 {
            let f = h.entries.iter().filter(|id| id.0 == i).count() as f64 / n as f64;
            assert!((f - third).abs() < 0.01, "task {i}: {f}");
        }
    }

    #[test]
    fn markov_walk_follows_matrix() {
        // Deterministic cycle 0 -> 1 -> 2 -> 0.
        let rows = vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ];
        let ctx = TaskContext::markov(tasks(3), rows).unwrap();
        let h = sample_history(&ctx, 7, &mut Seed(3).rng());
        for w in h.entries.windows(2) {
            assert_eq!(w[1].0, (w[0].0 + 1) % 3);
        }
        // Periodic chain still has the uniform stationary law.
        for p in ctx.marginal() {
            assert!((p - 1.0 / 3.0).abs() < 1e-3);
        }
    }

    #[test]
    fn history_validation() {
        let ctx = TaskContext::uniform(tasks(2)).unwrap();
        assert!(ctx
            .validate_history(&TaskHistory {
                entries: vec![TaskId(1)]
            })
            .is_ok());
        assert!(ctx
            .validate_history(&TaskHistory {
                entries: vec![TaskId(5)]
            })
            .is_err());
    }
}
