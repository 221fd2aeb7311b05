// SPDX-License-Identifier: Apache-2.0

//! Genotype decoding and NAND-circuit evaluation.
//!
//! Evaluation is bit-parallel: every wire carries a `u64` whose bit `x` is
//! the wire's value on input row `x`, so one pass over the gates evaluates
//! all `2^d` rows at once.

use serde::{Deserialize, Serialize};

use super::genotype::Genotype;
use super::params::{CircuitParams, MAX_GATES, MAX_INPUTS};
use super::table::TruthTable;
use crate::error::{Error, Result};

pub fn nand(a: bool, b: bool) -> bool {
    !(a && b)
}

/// How wirings with feedback are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CyclePolicy {
    /// Synchronous update from all-zero gate outputs for up to `M + 1`
    /// passes; rows whose output cone has not reached a fixed point read 0.
    #[default]
    Settle,
    /// Gate `i` may read only primary inputs and gates `j < i`; its source
    /// index is reduced modulo `d + i`. One pass.
    Feedforward,
}

/// Decoded wiring. Sources `0..d` are primary inputs, `d..d+M` gate outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitTopology {
    pub gate_inputs: Vec<[usize; 2]>,
    pub output_source: usize,
}

/// Decodes a genome: gate `i` reads two `m`-bit fields at `2mi` and `2mi+m`,
/// the output gene is the last `m` bits; every field is reduced modulo `M + d`.
pub fn decode(genotype: &Genotype, params: &CircuitParams) -> Result<CircuitTopology> {
    if genotype.len() != params.genome_len() {
        return Err(Error::Usage(format!(
            "genome has {} bits, circuit expects {}",
            genotype.len(),
            params.genome_len()
        )));
    }
    Ok(decode_unchecked(genotype, params))
}

pub(crate) fn decode_unchecked(genotype: &Genotype, params: &CircuitParams) -> CircuitTopology {
    let (gates, output_source) = decode_wires(genotype, params);
    CircuitTopology {
        gate_inputs: gates.iter().map(|w| w.map(usize::from)).collect(),
        output_source,
    }
}

/// Decoded wiring in compact form: source indices fit a byte since
/// `d + M <= 70`.
struct Wires {
    gates: [[u8; 2]; MAX_GATES],
    len: usize,
}

impl std::ops::Deref for Wires {
    type Target = [[u8; 2]];
    fn deref(&self) -> &Self::Target {
        &self.gates[..self.len]
    }
}

impl Wires {
    fn from_topology(t: &CircuitTopology, params: &CircuitParams) -> (Self, usize) {
        let n = params.sources();
        assert_eq!(
            t.gate_inputs.len(),
            params.gates,
            "topology has the wrong gate count"
        );
        let check = |s: usize| {
            assert!(s < n, "source index {s} out of range for {n} sources");
            s as u8
        };
        let mut wires = Wires {
            gates: [[0; 2]; MAX_GATES],
            len: params.gates,
        };
        for (w, &[a, b]) in wires.gates.iter_mut().zip(&t.gate_inputs) {
            *w = [check(a), check(b)];
        }
        (wires, usize::from(check(t.output_source)))
    }
}

fn decode_wires(genotype: &Genotype, params: &CircuitParams) -> (Wires, usize) {
    let m = params.wire_bits();
    let n = params.sources();
    let dense = params.is_dense();
    let field = |start: usize| {
        let v = genotype.read_uint(start, m);
        if dense {
            v
        } else {
            v % n
        }
    };
    let mut wires = Wires {
        gates: [[0; 2]; MAX_GATES],
        len: params.gates,
    };
    for (i, w) in wires.gates[..params.gates].iter_mut().enumerate() {
        let base = 2 * m * i;
        *w = [field(base) as u8, field(base + m) as u8];
    }
    (wires, field(2 * m * params.gates))
}

/// Lane word of input `x_{i+1}` with `d` inputs; `x1` is the most significant input bit.
fn input_lane(i: usize, d: usize) -> u64 {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    PATTERNS[d - 1 - i] & row_mask(d)
}

fn row_mask(d: usize) -> u64 {
    if d >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << d)) - 1
    }
}

/// Value words of all sources: inputs first, gates zeroed.
fn source_lanes(d: usize) -> [u64; MAX_INPUTS + MAX_GATES] {
    let mut vals = [0u64; MAX_INPUTS + MAX_GATES];
    for (i, v) in vals.iter_mut().enumerate().take(d) {
        *v = input_lane(i, d);
    }
    vals
}

fn lanes(wires: &[[u8; 2]], output: usize, params: &CircuitParams, policy: CyclePolicy) -> u64 {
    match policy {
        CyclePolicy::Settle => settle(wires, output, params),
        CyclePolicy::Feedforward => feedforward(wires, output, params),
    }
}

/// Truth table of the circuit over all `2^d` inputs, rows in lexicographic order.
pub fn truth_table(
    topology: &CircuitTopology,
    params: &CircuitParams,
    policy: CyclePolicy,
) -> TruthTable {
    let (wires, output) = Wires::from_topology(topology, params);
    let bits = lanes(&wires, output, params, policy);
    TruthTable::from_bits(bits, params.inputs)
}

/// Output of the circuit on a single input row.
pub fn evaluate(
    topology: &CircuitTopology,
    input: &[bool],
    params: &CircuitParams,
    policy: CyclePolicy,
) -> Result<bool> {
    if input.len() != params.inputs {
        return Err(Error::Usage(format!(
            "input has {} bits, circuit has {} inputs",
            input.len(),
            params.inputs
        )));
    }
    let row = input
        .iter()
        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
    Ok(truth_table(topology, params, policy).get(row))
}

fn settle(wires: &[[u8; 2]], output: usize, params: &CircuitParams) -> u64 {
    let d = params.inputs;
    if output < d {
        return input_lane(output, d);
    }
    // An acyclic cone settles to its one-pass value in topological order.
    match topological_cone(wires, output - d, d) {
        Some((order, len)) => {
            let full = row_mask(d);
            let mut vals = source_lanes(d);
            for &g in &order[..len] {
                let [a, b] = wires[g as usize];
                vals[d + g as usize] = !(vals[a as usize] & vals[b as usize]) & full;
            }
            vals[output]
        }
        None => settle_iterate(wires, output, params),
    }
}

/// Synchronous update of the output's fan-in cone from all-zero gate outputs.
///
/// Stops early once every row has entered a cycle of period one or two:
/// such rows never change again or change on every later pass, so the
/// remaining passes cannot alter the result.
fn settle_iterate(wires: &[[u8; 2]], output: usize, params: &CircuitParams) -> u64 {
    let d = params.inputs;
    let full = row_mask(d);
    if output < d {
        return input_lane(output, d);
    }

    // Gates outside the cone cannot affect the output.
    let mut in_cone = 0u64;
    let mut stack = 1u64 << (output - d);
    while stack != 0 {
        let g = stack.trailing_zeros() as usize;
        stack &= stack - 1;
        in_cone |= 1 << g;
        for &s in &wires[g] {
            let s = usize::from(s);
            if s >= d && in_cone >> (s - d) & 1 == 0 {
                stack |= 1 << (s - d);
            }
        }
    }

    // bufs[k % 3] holds the state after pass k.
    let mut bufs = [source_lanes(d); 3];
    let mut changed = full;
    let mut pass = 0;
    while pass <= params.gates {
        let (prev, next) = ((pass) % 3, (pass + 1) % 3);
        changed = 0;
        // Rows whose new state differs from the state two passes back.
        let mut not_periodic = 0u64;
        let mut rest = in_cone;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let [a, b] = wires[g];
            let v = !(bufs[prev][usize::from(a)] & bufs[prev][usize::from(b)]) & full;
            changed |= v ^ bufs[prev][d + g];
            if pass >= 1 {
                not_periodic |= v ^ bufs[(pass + 2) % 3][d + g];
            }
            bufs[next][d + g] = v;
        }
        pass += 1;
        if changed == 0 || (pass >= 2 && not_periodic == 0) {
            break;
        }
    }
    // A row unchanged by the last synchronous pass sits at a fixed point.
    bufs[pass % 3][output] & !changed & full
}

/// Gates feeding `root`, dependencies first; `None` if the cone has a cycle.
fn topological_cone(wires: &[[u8; 2]], root: usize, d: usize) -> Option<([u8; MAX_GATES], usize)> {
    let mut order = [0u8; MAX_GATES];
    let mut len = 0;
    let mut open = 1u64 << root;
    let mut done = 0u64;
    // (gate, next operand to visit)
    let mut stack = [(0u8, 0u8); MAX_GATES];
    stack[0] = (root as u8, 0);
    let mut depth = 1;
    while depth > 0 {
        let (g, k) = stack[depth - 1];
        if k == 2 {
            open &= !(1 << g);
            done |= 1 << g;
            order[len] = g;
            len += 1;
            depth -= 1;
            continue;
        }
        stack[depth - 1].1 += 1;
        let s = usize::from(wires[g as usize][k as usize]);
        if s < d {
            continue;
        }
        let bit = 1u64 << (s - d);
        if open & bit != 0 {
            return None;
        }
        if done & bit == 0 {
            open |= bit;
            stack[depth] = ((s - d) as u8, 0);
            depth += 1;
        }
    }
    Some((order, len))
}

fn feedforward(wires: &[[u8; 2]], output: usize, params: &CircuitParams) -> u64 {
    let d = params.inputs;
    let full = row_mask(d);
    let mut vals = source_lanes(d);
    for (g, w) in wires.iter().enumerate() {
        let allowed = d + g;
        let [a, b] = w.map(|s| usize::from(s) % allowed);
        vals[d + g] = !(vals[a] & vals[b]) & full;
    }
    vals[output]
}

/// Decode and evaluate in one step.
pub fn genome_table(
    genotype: &Genotype,
    params: &CircuitParams,
    policy: CyclePolicy,
) -> TruthTable {
    let (wires, output) = decode_wires(genotype, params);
    TruthTable::from_bits(lanes(&wires, output, params, policy), params.inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Seed;

    fn or_params() -> CircuitParams {
        CircuitParams::new(2, 3).unwrap()
    }

    /// x1 OR x2 = (x1 NAND x1) NAND (x2 NAND x2).
    fn or_circuit() -> CircuitTopology {
        CircuitTopology {
            gate_inputs: vec![[0, 0], [1, 1], [2, 3]],
            output_source: 4,
        }
    }

    #[test]
    fn nand_truth_table() {
        assert!(nand(false, false));
        assert!(nand(false, true));
        assert!(nand(true, false));
        assert!(!nand(true, true));
    }

    #[test]
    fn or_construction() {
        let p = or_params();
        for policy in [CyclePolicy::Settle, CyclePolicy::Feedforward] {
            let t = or_circuit();
            assert!(evaluate(&t, &[false, true], &p, policy).unwrap());
            assert!(!evaluate(&t, &[false, false], &p, policy).unwrap());
            assert_eq!(truth_table(&t, &p, policy).to_string(), "0111");
        }
    }

    #[test]
    fn all_zero_genome_reads_x1() {
        let p = CircuitParams::default();
        let t = decode(&Genotype::zeros(100), &p).unwrap();
        assert!(t.gate_inputs.iter().all(|g| *g == [0, 0]));
        assert_eq!(t.output_source, 0);
        let table = truth_table(&t, &p, CyclePolicy::Settle);
        assert_eq!(table.to_string(), "0000000011111111");
    }

    #[test]
    fn gate_zero_reads_fields() {
        let p = CircuitParams::default();
        let mut g = Genotype::zeros(100);
        g.write_uint(4, 4, 1);
        // Output gene names gate 0 (source 4).
        g.write_uint(96, 4, 4);
        let t = decode(&g, &p).unwrap();
        assert_eq!(t.gate_inputs[0], [0, 1]);
        // NAND(x1, x2) independent of x3, x4.
        let table = truth_table(&t, &p, CyclePolicy::Settle);
        for x in 0..16 {
            let (x1, x2) = (x >> 3 & 1 == 1, x >> 2 & 1 == 1);
            assert_eq!(table.get(x), nand(x1, x2));
        }
    }

    #[test]
    fn oscillating_cycle_reads_zero() {
        let p = or_params();
        // g0 = NAND(g1, g1), g1 = NAND(g0, g0): from (0,0) it alternates with (1,1).
        let t = CircuitTopology {
            gate_inputs: vec![[3, 3], [2, 2], [0, 1]],
            output_source: 2,
        };
        assert_eq!(truth_table(&t, &p, CyclePolicy::Settle).to_string(), "0000");
        // A self-oscillating gate.
        let t = CircuitTopology {
            gate_inputs: vec![[2, 2], [0, 1], [0, 1]],
            output_source: 2,
        };
        assert_eq!(truth_table(&t, &p, CyclePolicy::Settle).to_string(), "0000");
    }

    #[test]
    fn cycles_outside_the_cone_do_not_matter() {
        let p = or_params();
        let t = CircuitTopology {
            gate_inputs: vec![[0, 0], [1, 1], [4, 4]],
            output_source: 2,
        };
        assert_eq!(truth_table(&t, &p, CyclePolicy::Settle).to_string(), "1100");
    }

    #[test]
    fn latch_settles_per_row() {
        // g0 = NAND(x1, g1), g1 = NAND(x2, g0): a set/reset latch. From (0,0):
        // row x1=x2=1 goes (0,0)->(1,1)->(0,0)... and never settles.
        let p = or_params();
        let t = CircuitTopology {
            gate_inputs: vec![[0, 3], [1, 2], [0, 0]],
            output_source: 2,
        };
        let table = truth_table(&t, &p, CyclePolicy::Settle);
        // rows 00, 01, 10 settle to g0 = 1, 1, 0; row 11 oscillates -> 0.
        assert_eq!(table.to_string(), "1100");
    }

    #[test]
    fn topological_shortcut_matches_iteration() {
        let p = CircuitParams::default();
        let mut rng = Seed(31).rng();
        let mut acyclic = 0;
        for _ in 0..20_000 {
            let g = Genotype::random(p.genome_len(), &mut rng);
            let (wires, out) = decode_wires(&g, &p);
            if out >= p.inputs && topological_cone(&wires, out - p.inputs, p.inputs).is_some() {
                acyclic += 1;
            }
            assert_eq!(
                settle(&wires, out, &p),
                settle_iterate(&wires, out, &p),
                "{g}"
            );
        }
        assert!(acyclic > 1000);
    }

    /// Row-by-row synchronous simulation of every gate for all `M + 1` passes.
    fn settle_by_rows(t: &CircuitTopology, p: &CircuitParams) -> u64 {
        let d = p.inputs;
        let cone = {
            let mut seen = vec![false; p.gates];
            let mut todo = vec![t.output_source];
            while let Some(s) = todo.pop() {
                if s >= d && !seen[s - d] {
                    seen[s - d] = true;
                    todo.extend(t.gate_inputs[s - d]);
                }
            }
            seen
        };
        let mut bits = 0u64;
        for row in 0..1usize << d {
            let input = |i: usize| row >> (d - 1 - i) & 1 == 1;
            let mut vals = vec![false; p.gates];
            let mut settled = true;
            for _ in 0..=p.gates {
                let read = |vals: &[bool], s: usize| if s < d { input(s) } else { vals[s - d] };
                let next: Vec<bool> = t
                    .gate_inputs
                    .iter()
                    .map(|&[a, b]| nand(read(&vals, a), read(&vals, b)))
                    .collect();
                settled = (0..p.gates).all(|g| !cone[g] || next[g] == vals[g]);
                vals = next;
            }
            let out = if t.output_source < d {
                input(t.output_source)
            } else {
                settled && vals[t.output_source - d]
            };
            bits |= u64::from(out) << row;
        }
        bits
    }

    #[test]
    fn settle_matches_row_simulation() {
        for p in [
            CircuitParams::default(),
            CircuitParams::new(3, 6).unwrap(),
            CircuitParams::new(2, 5).unwrap(),
        ] {
            let mut rng = Seed(41).rng();
            for _ in 0..3000 {
                let g = Genotype::random(p.genome_len(), &mut rng);
                let t = decode(&g, &p).unwrap();
                assert_eq!(
                    truth_table(&t, &p, CyclePolicy::Settle).bits(),
                    settle_by_rows(&t, &p),
                    "{g}"
                );
            }
        }
    }

    #[test]
    fn decoding_is_total_on_random_genomes() {
        let p = CircuitParams::default();
        let mut rng = Seed(11).rng();
        for _ in 0..100_000 {
            let g = Genotype::random(100, &mut rng);
            let t = decode(&g, &p).unwrap();
            assert!(t.gate_inputs.iter().flatten().all(|&s| s < 16));
            assert!(t.output_source < 16);
        }
    }

    #[test]
    fn decode_round_trip_on_dense_params() {
        let p = CircuitParams::default();
        let m = p.wire_bits();
        let mut rng = Seed(12).rng();
        for _ in 0..1000 {
            let g = Genotype::random(100, &mut rng);
            let t = decode(&g, &p).unwrap();
            let mut re = Genotype::zeros(100);
            for (i, [a, b]) in t.gate_inputs.iter().enumerate() {
                re.write_uint(2 * m * i, m, *a);
                re.write_uint(2 * m * i + m, m, *b);
            }
            re.write_uint(2 * m * p.gates, m, t.output_source);
            assert_eq!(re, g);
        }
    }

    #[test]
    fn one_bit_mutation_moves_one_wire() {
        let p = CircuitParams::default();
        let mut rng = Seed(13).rng();
        for k in 0..2000 {
            let g = Genotype::random(100, &mut rng);
            let mut h = g.clone();
            h.flip(k % 100);
            let (a, b) = (decode(&g, &p).unwrap(), decode(&h, &p).unwrap());
            let diff = a
                .gate_inputs
                .iter()
                .flatten()
                .zip(b.gate_inputs.iter().flatten())
                .filter(|(x, y)| x != y)
                .count()
                + usize::from(a.output_source != b.output_source);
            assert!(diff <= 1);
        }
    }

    #[test]
    fn modulo_reduction_for_sparse_params() {
        // d=2, M=3: five sources in 3-bit fields; field value 7 maps to 2.
        let p = or_params();
        let mut g = Genotype::zeros(p.genome_len());
        g.write_uint(0, 3, 7);
        let t = decode(&g, &p).unwrap();
        assert_eq!(t.gate_inputs[0][0], 2);
        assert!(decode(&Genotype::zeros(5), &p).is_err());
    }

    #[test]
    fn evaluate_checks_arity() {
        let p = or_params();
        assert!(evaluate(&or_circuit(), &[true], &p, CyclePolicy::Settle).is_err());
    }
}
