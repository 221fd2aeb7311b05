// SPDX-License-Identifier: Apache-2.0

//! Brute-force cross-checks of the fast code paths.
//!
//! Each check compares a library routine against an independent, slow
//! reference (recursive circuit evaluation, row-by-row simulation, explicit
//! enumeration over target sets) or verifies an algebraic identity on many
//! random instances. [`Fault`] swaps in a deliberately broken component so
//! the suite itself can be shown to catch errors.

use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::circuit::{
    decode, fitness, hamming, truth_table, BooleanGoal, CircuitParams, CircuitTopology,
    CyclePolicy, Genotype, TruthTable,
};
use crate::formalism::{
    adaptability, average_case_reconfigurability, min_reconfiguration_cost,
    min_reconfiguration_cost_sampled, pareto_dominates, task_diversity, task_richness,
    worst_case_reconfigurability, Adaptation, AdaptiveSystem, Averaging, CostBudget,
    HypercubeSystem, Task, TaskContext, TaskDistance,
};
use crate::seed::Seed;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckResult {
    /// One line: `PASS name (12.3 ms): detail`.
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.1} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64() * 1e3,
            self.detail
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Circuit,
    Formalism,
    All,
}

impl Scope {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "circuit" => Some(Scope::Circuit),
            "formalism" => Some(Scope::Formalism),
            "all" => Some(Scope::All),
            _ => None,
        }
    }
}

/// Deliberate defects for testing the oracles themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// The circuit evaluator under test flips one output row on some genomes.
    Evaluator,
    /// The hypercube system under test forgets one target of each task.
    Performs,
}

impl Fault {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "evaluator" => Some(Fault::Evaluator),
            "performs" => Some(Fault::Performs),
            _ => None,
        }
    }
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CheckResult {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_oracles(scope: Scope, fault: Option<Fault>, seed: Seed) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if scope != Scope::Formalism {
        out.extend(circuit_checks(fault, seed.label("circuit")));
    }
    if scope != Scope::Circuit {
        out.extend(formalism_checks(fault, seed.label("formalism")));
    }
    out
}

// ---------------------------------------------------------------- circuits

/// Reference evaluation of a feedforward circuit on one input row by
/// recursion over sources, memoized per gate.
pub fn feedforward_recursive(t: &CircuitTopology, params: &CircuitParams, row: usize) -> bool {
    fn value(
        s: usize,
        t: &CircuitTopology,
        d: usize,
        row: usize,
        memo: &mut [Option<bool>],
    ) -> bool {
        if s < d {
            return row >> (d - 1 - s) & 1 == 1;
        }
        let g = s - d;
        if let Some(v) = memo[g] {
            return v;
        }
        // Gate g sees only inputs and earlier gates.
        let [a, b] = t.gate_inputs[g].map(|x| x % (d + g));
        let v = !(value(a, t, d, row, memo) && value(b, t, d, row, memo));
        memo[g] = Some(v);
        v
    }
    let mut memo = vec![None; params.gates];
    value(t.output_source, t, params.inputs, row, &mut memo)
}

/// Reference for the settle policy: every gate updated synchronously, row
/// by row, for `M + 1` passes; a row whose output cone still moved on the
/// last pass reads 0.
pub fn settle_by_rows(t: &CircuitTopology, params: &CircuitParams) -> TruthTable {
    let d = params.inputs;
    let mut cone = vec![false; params.gates];
    let mut todo = vec![t.output_source];
    while let Some(s) = todo.pop() {
        if s >= d && !cone[s - d] {
            cone[s - d] = true;
            todo.extend(t.gate_inputs[s - d]);
        }
    }
    TruthTable::from_fn(d, |row| {
        let input = |i: usize| row >> (d - 1 - i) & 1 == 1;
        if t.output_source < d {
            return input(t.output_source);
        }
        let mut vals = vec![false; params.gates];
        let mut settled = true;
        for _ in 0..=params.gates {
            let read = |vals: &[bool], s: usize| if s < d { input(s) } else { vals[s - d] };
            let next: Vec<bool> = t
                .gate_inputs
                .iter()
                .map(|&[a, b]| !(read(&vals, a) && read(&vals, b)))
                .collect();
            settled = (0..params.gates).all(|g| !cone[g] || next[g] == vals[g]);
            vals = next;
        }
        settled && vals[t.output_source - d]
    })
}

/// The evaluator under test, optionally corrupted.
fn evaluator_under_test(
    t: &CircuitTopology,
    p: &CircuitParams,
    policy: CyclePolicy,
    fault: Option<Fault>,
) -> TruthTable {
    let table = truth_table(t, p, policy);
    if fault == Some(Fault::Evaluator) && t.output_source.is_multiple_of(3) {
        TruthTable::from_bits(table.bits() ^ (1 << 5), p.inputs)
    } else {
        table
    }
}

pub fn circuit_checks(fault: Option<Fault>, seed: Seed) -> Vec<CheckResult> {
    let p = CircuitParams::default();
    let mut out = Vec::new();

    out.push(timed("encoding-arithmetic", || {
        let (m, b) = (p.wire_bits(), p.genome_len());
        (m == 4 && b == 100, format!("d=4 M=12: m={m} B={b}"))
    }));

    out.push(timed("feedforward-vs-recursive", || {
        let start = Instant::now();
        let mut rng = seed.label("feedforward").rng();
        let mut mismatches = 0;
        for _ in 0..1000 {
            let g = Genotype::random(p.genome_len(), &mut rng);
            let t = decode(&g, &p).expect("genome has the right length");
            let fast = evaluator_under_test(&t, &p, CyclePolicy::Feedforward, fault);
            mismatches += (0..16)
                .filter(|&row| fast.get(row) != feedforward_recursive(&t, &p, row))
                .count();
        }
        let secs = start.elapsed().as_secs_f64();
        (
            mismatches == 0 && secs < 1.0,
            format!("1000 genomes x 16 rows, {mismatches} mismatched rows, {secs:.3} s"),
        )
    }));

    out.push(timed("settle-vs-row-simulation", || {
        let mut rng = seed.label("settle").rng();
        let mut bad = 0;
        let mut n = 0;
        for params in [
            p,
            CircuitParams::new(3, 6).unwrap(),
            CircuitParams::new(2, 5).unwrap(),
        ] {
            for _ in 0..1000 {
                let g = Genotype::random(params.genome_len(), &mut rng);
                let t = decode(&g, &params).expect("genome has the right length");
                n += 1;
                if evaluator_under_test(&t, &params, CyclePolicy::Settle, fault)
                    != settle_by_rows(&t, &params)
                {
                    bad += 1;
                }
            }
        }
        (bad == 0, format!("{bad}/{n} genomes disagree"))
    }));

    out.push(timed("or-construction", || {
        // x1 OR x2 = (x1 NAND x1) NAND (x2 NAND x2)
        let q = CircuitParams::new(2, 3).unwrap();
        let t = CircuitTopology {
            gate_inputs: vec![[0, 0], [1, 1], [2, 3]],
            output_source: 4,
        };
        let want = TruthTable::from_fn(2, |row| row != 0);
        let got: Vec<TruthTable> = [CyclePolicy::Feedforward, CyclePolicy::Settle]
            .iter()
            .map(|&policy| evaluator_under_test(&t, &q, policy, fault))
            .collect();
        (
            got.iter().all(|g| *g == want),
            format!(
                "tables {}",
                got.iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        )
    }));

    out.push(timed("fitness-complement", || {
        let mut rng = seed.label("complement").rng();
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let u = TruthTable::from_bits(rng.random(), 4);
            let goal = BooleanGoal::from_table(TruthTable::from_bits(rng.random(), 4));
            let a = fitness(&u, &goal).expect("same arity");
            let b = fitness(&u.complement(), &goal).expect("same arity");
            worst = worst.max((a + b - 1.0).abs());
        }
        (worst == 0.0, format!("max |F(u) + F(~u) - 1| = {worst}"))
    }));

    out.push(timed("decode-round-trip", || {
        let mut rng = seed.label("decode").rng();
        let m = p.wire_bits();
        let mut bad = 0;
        for _ in 0..1000 {
            let g = Genotype::random(p.genome_len(), &mut rng);
            let t = decode(&g, &p).expect("genome has the right length");
            let mut re = Genotype::zeros(p.genome_len());
            for (i, [a, b]) in t.gate_inputs.iter().enumerate() {
                re.write_uint(2 * m * i, m, *a);
                re.write_uint(2 * m * i + m, m, *b);
            }
            re.write_uint(2 * m * p.gates, m, t.output_source);
            bad += usize::from(re != g);
        }
        (
            bad == 0,
            format!("{bad}/1000 genomes re-encode differently"),
        )
    }));

    out.push(timed("hamming-metric", || {
        let mut rng = seed.label("hamming").rng();
        let gs: Vec<Genotype> = (0..40)
            .map(|_| Genotype::random(p.genome_len(), &mut rng))
            .collect();
        let h = |a: &Genotype, b: &Genotype| hamming(a, b).expect("same length");
        let mut bad = 0;
        for a in &gs {
            bad += usize::from(h(a, a) != 0);
            for b in &gs {
                bad += usize::from(h(a, b) != h(b, a));
                bad += usize::from((h(a, b) == 0) != (a == b));
                for c in &gs {
                    bad += usize::from(h(a, c) > h(a, b) + h(b, c));
                }
            }
        }
        (bad == 0, format!("{bad} axiom violations over 40 genomes"))
    }));

    out
}

// --------------------------------------------------------------- formalism

/// A random hypercube instance: `2..=8` bits, `2..=5` tasks, nonempty target sets.
#[derive(Clone, Debug)]
pub struct Instance {
    pub bits: u32,
    pub targets: Vec<Vec<u32>>,
}

impl Instance {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let bits = rng.random_range(2..=8u32);
        let n_tasks = rng.random_range(2..=5usize);
        let all: Vec<u32> = (0..1u32 << bits).collect();
        let targets = (0..n_tasks)
            .map(|_| {
                let k = rng.random_range(1..=4usize.min(all.len()));
                let mut set: Vec<u32> = all.choose_multiple(rng, k).copied().collect();
                set.sort_unstable();
                set
            })
            .collect();
        Instance { bits, targets }
    }

    fn system(&self, fault: Option<Fault>) -> Faulty {
        Faulty {
            inner: HypercubeSystem::new(self.bits, self.targets.clone()).expect("valid instance"),
            fault,
        }
    }

    fn context(&self) -> TaskContext {
        let tasks = HypercubeSystem::new(self.bits, self.targets.clone())
            .expect("valid instance")
            .tasks();
        TaskContext::uniform(tasks).expect("nonempty")
    }

    /// Minimum Hamming distance between two target sets, by enumeration.
    pub fn brute_min_reco(&self, i: usize, j: usize) -> f64 {
        let mut best = u32::MAX;
        for a in &self.targets[i] {
            for b in &self.targets[j] {
                best = best.min((a ^ b).count_ones());
            }
        }
        f64::from(best)
    }

    /// The configuration farthest, on average, from the target sets: a
    /// naive starting point that has learned nothing.
    pub fn naive_start(&self) -> u32 {
        let mean_dist = |c: u32| -> u32 {
            self.targets
                .iter()
                .map(|set| set.iter().map(|t| (t ^ c).count_ones()).min().unwrap_or(0))
                .sum()
        };
        (0..1u32 << self.bits)
            .max_by_key(|&c| (mean_dist(c), std::cmp::Reverse(c)))
            .unwrap_or(0)
    }
}

/// Hypercube system with an optional defect in `performs`.
#[derive(Clone, Debug)]
struct Faulty {
    inner: HypercubeSystem,
    fault: Option<Fault>,
}

impl AdaptiveSystem for Faulty {
    type Config = u32;

    fn initial_config(&self) -> u32 {
        self.inner.initial_config()
    }

    fn adapt(&mut self, current: &u32, task: &Task, seed: Seed) -> Adaptation<u32> {
        self.inner.adapt(current, task, seed)
    }

    fn reconfig_cost(&self, from: &u32, to: &u32) -> f64 {
        self.inner.reconfig_cost(from, to)
    }

    fn performs(&self, config: &u32, task: &Task) -> bool {
        let set = self.inner.target_set(task.id());
        if self.fault == Some(Fault::Performs) && set.len() > 1 && set[0] == *config {
            return false;
        }
        self.inner.performs(config, task)
    }

    fn symmetric_reconfig(&self) -> bool {
        true
    }

    fn enumerate_configs(&self) -> Option<Vec<u32>> {
        self.inner.enumerate_configs()
    }
}

pub fn formalism_checks(fault: Option<Fault>, seed: Seed) -> Vec<CheckResult> {
    let mut rng = seed.label("instances").rng();
    let instances: Vec<Instance> = (0..100).map(|_| Instance::random(&mut rng)).collect();
    let mut out = Vec::new();

    out.push(timed("min-reco-vs-enumeration", || {
        let mut bad = 0;
        let mut pairs = 0;
        for inst in &instances {
            let sys = inst.system(fault);
            let ctx = inst.context();
            for (i, a) in ctx.tasks().iter().enumerate() {
                for (j, b) in ctx.tasks().iter().enumerate() {
                    pairs += 1;
                    let got = min_reconfiguration_cost(&sys, a, b).expect("enumerable");
                    bad += usize::from(got.cost != inst.brute_min_reco(i, j) || !got.exact);
                }
            }
        }
        (
            bad == 0,
            format!("{bad}/{pairs} task pairs differ on 100 instances"),
        )
    }));

    out.push(timed("worst-le-average", || {
        let mut bad = 0;
        for inst in &instances {
            let sys = inst.system(fault);
            let ctx = inst.context();
            let wor = worst_case_reconfigurability(&sys, &ctx).expect("enumerable");
            let avg = average_case_reconfigurability(&sys, &ctx, Averaging::Exact)
                .expect("enumerable")
                .mean;
            bad += usize::from(wor > avg);
        }
        (
            bad == 0,
            format!("{bad}/100 instances with worst-case above average-case"),
        )
    }));

    out.push(timed("monte-carlo-within-3se", || {
        let mut bad = Vec::new();
        for (k, inst) in instances.iter().take(20).enumerate() {
            let sys = inst.system(fault);
            let ctx = inst.context();
            // Expectation from the brute-force matrix, not the library's.
            let n = inst.targets.len();
            let exact = -(0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| inst.brute_min_reco(i, j))
                .sum::<f64>()
                / (n * n) as f64;
            let mc = average_case_reconfigurability(
                &sys,
                &ctx,
                Averaging::MonteCarlo {
                    samples: 4000,
                    seed: seed.label("mc").child(k as u64),
                },
            )
            .expect("enumerable");
            let ok = if mc.std_err > 0.0 {
                mc.within(exact, 3.0)
            } else {
                mc.mean == exact
            };
            if !ok {
                bad.push(format!(
                    "#{k}: {:.3} +- {:.3} vs {exact:.3}",
                    mc.mean, mc.std_err
                ));
            }
        }
        (
            bad.is_empty(),
            format!("{}/20 instances outside 3 SE {}", bad.len(), bad.join("; ")),
        )
    }));

    out.push(timed("sampled-bound-ge-exact", || {
        let mut rng = seed.label("sampled").rng();
        let mut bad = 0;
        for inst in &instances {
            let sys = inst.system(fault);
            let ctx = inst.context();
            let (i, j) = (0, inst.targets.len() - 1);
            let sub = |set: &[u32], rng: &mut crate::seed::SimRng| -> Vec<u32> {
                let k = rng.random_range(1..=set.len());
                set.choose_multiple(rng, k).copied().collect()
            };
            let a = sub(&inst.targets[i], &mut rng);
            let b = sub(&inst.targets[j], &mut rng);
            let sampled = min_reconfiguration_cost_sampled(&sys, &a, &b).cost;
            let exact = min_reconfiguration_cost(&sys, &ctx.tasks()[i], &ctx.tasks()[j])
                .expect("enumerable")
                .cost;
            bad += usize::from(sampled < exact);
        }
        (
            bad == 0,
            format!("{bad}/100 sampled bounds below the exact minimum"),
        )
    }));

    out.push(adaptability_bound(
        &instances[..10],
        fault,
        seed.label("bound"),
    ));

    out.push(timed("pareto-order-axioms", || {
        let pts: Vec<[f64; 3]> = (0..27)
            .map(|i| [(i % 3) as f64, (i / 3 % 3) as f64, (i / 9) as f64])
            .collect();
        let dom = |a: &[f64; 3], b: &[f64; 3]| pareto_dominates(a, b).expect("same length");
        let mut bad = 0;
        for a in &pts {
            bad += usize::from(dom(a, a));
            for b in &pts {
                bad += usize::from(dom(a, b) && dom(b, a));
                for c in &pts {
                    bad += usize::from(dom(a, b) && dom(b, c) && !dom(a, c));
                }
            }
        }
        (
            bad == 0,
            format!("{bad} violations of irreflexivity, asymmetry, transitivity on {{0,1,2}}^3"),
        )
    }));

    out.push(timed("budget-monotonicity", || {
        let mut bad = 0;
        let d = TaskDistance::discrete();
        for (k, inst) in instances.iter().take(10).enumerate() {
            let sys = inst.system(fault).inner.with_run_cost(1.0);
            let ctx = inst.context();
            let s = seed.label("budget").child(k as u64);
            let mut last = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for b in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
                let budget = CostBudget::new(b).expect("positive");
                let r = task_richness(&sys, &ctx, budget, 50, s)
                    .expect("trials")
                    .mean;
                let v = task_diversity(&sys, &ctx, &d, budget, 50, s)
                    .expect("valid distance")
                    .mean;
                bad += usize::from(r < last.0) + usize::from(v < last.1);
                last = (r, v);
            }
        }
        (
            bad == 0,
            format!("{bad} decreases of richness or diversity with a larger budget"),
        )
    }));

    out
}

/// On each instance, from the naive start: `-alpha_n >= c_avg-reco` for
/// `n in {0, 1, 2, 4, 8}`, and the gap shrinks with `n` as a trend.
///
/// After at least one task the system sits inside the last task's solution
/// set, so each trial's cost is at least the min-reco cost of that pair and
/// the bound holds trial by trial. The naive start maximizes the expected
/// distance to a random target set, which is at least the expected
/// min-reco cost from any solution, so `n = 0` obeys the bound too. Means
/// are compared with a 3 SE allowance for the sampled test tasks.
fn adaptability_bound(instances: &[Instance], fault: Option<Fault>, seed: Seed) -> CheckResult {
    timed("adaptability-bound", || {
        const HISTORIES: [usize; 5] = [0, 1, 2, 4, 8];
        let mut bad = Vec::new();
        let mut first_gaps = Vec::new();
        for (k, inst) in instances.iter().enumerate() {
            let sys = Faulty {
                inner: inst.system(fault).inner.with_initial(inst.naive_start()),
                fault,
            };
            let ctx = inst.context();
            let avg_reco = -average_case_reconfigurability(&sys, &ctx, Averaging::Exact)
                .expect("enumerable")
                .mean;
            let mut gaps = Vec::new();
            for &n in &HISTORIES {
                let a = adaptability(&sys, &ctx, n, 200, seed.child(k as u64).child(n as u64))
                    .expect("trials");
                let cost = -a.mean;
                if cost < avg_reco - 3.0 * a.std_err {
                    bad.push(format!("#{k} n={n}: {cost:.3} < {avg_reco:.3}"));
                }
                gaps.push((cost - avg_reco, a.std_err));
            }
            // Trend: no step up by more than the combined sampling error,
            // and the longest history ends no higher than the empty one.
            for w in gaps.windows(2) {
                let allowance = 3.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt();
                if w[1].0 > w[0].0 + allowance {
                    bad.push(format!("#{k}: gap rose {:.3} -> {:.3}", w[0].0, w[1].0));
                }
            }
            if gaps[gaps.len() - 1].0 > gaps[0].0 {
                bad.push(format!("#{k}: gap at n=8 above n=0"));
            }
            first_gaps.push(format!("{:.2}->{:.2}", gaps[0].0, gaps[gaps.len() - 1].0));
        }
        (
            bad.is_empty(),
            format!(
                "{} violations on {} instances x 200 trials; gaps n=0->8: {} {}",
                bad.len(),
                instances.len(),
                first_gaps.join(" "),
                bad.join("; ")
            ),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_on_a_correct_build() {
        for r in run_oracles(Scope::All, None, Seed(2024)) {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn evaluator_fault_is_caught() {
        let r = circuit_checks(Some(Fault::Evaluator), Seed(2024));
        assert!(r.iter().any(|c| !c.passed));
        assert!(
            !r.iter()
                .find(|c| c.name == "feedforward-vs-recursive")
                .unwrap()
                .passed
        );
    }

    #[test]
    fn performs_fault_is_caught() {
        let r = formalism_checks(Some(Fault::Performs), Seed(2024));
        assert!(
            !r.iter()
                .find(|c| c.name == "min-reco-vs-enumeration")
                .unwrap()
                .passed
        );
    }

    #[test]
    fn naive_start_is_farthest() {
        let inst = Instance {
            bits: 3,
            targets: vec![vec![0], vec![1]],
        };
        assert_eq!(inst.naive_start(), 0b110);
    }

    #[test]
    fn scope_parsing() {
        assert_eq!(Scope::parse("all"), Some(Scope::All));
        assert_eq!(Scope::parse("bogus"), None);
        assert_eq!(Fault::parse("evaluator"), Some(Fault::Evaluator));
    }
}
