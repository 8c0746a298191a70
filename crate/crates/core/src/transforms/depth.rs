//! Logarithmic-depth rebuilding of set-multilinear circuits.
//!
//! For every gate `v` the output circuit holds a gate `F[v]` computing
//! `f_v`, and for every pair `(v, w)` with `w` below `v`, `deg(w) ≥ 1` and
//! `deg(v) < 2 deg(w)` a gate `D[v][w]` computing `∂_w f_v` (or nothing when
//! that derivative is identically zero). Stage `j` produces `F[v]` for
//! `deg(v) ∈ (2^(j-1), 2^j]` and `D[v][w]` for `deg(v) - deg(w)` in the same
//! range, using only gates of earlier stages and `F` gates of stage `j`:
//!
//! ```text
//! F[v]    = Σ_{t ∈ G_m}  F[t1] · F[t2] · D[v][t]               m  = 2^(j-1)
//! D[v][w] = Σ_{t ∈ G_m'} F[t2] · D[t1][w] · D[v][t]            m' = 2^(j-1) + deg(w)
//! ```
//!
//! where `t1` is the child of larger degree (the left one on ties). A stage
//! adds three levels, so the output depth is at most `3⌈log2 d⌉ + 2`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::algebra::field::Scalar;
use crate::algebra::poly::Polynomial;
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::error::{Error, Result};
use crate::Limits;

/// What one stage computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: u32,
    /// Input gates `v` whose `F[v]` was built in this stage.
    pub gate_targets: Vec<GateId>,
    /// Pairs `(v, w)` whose `D[v][w]` was built in this stage (nonzero ones only).
    pub derivative_targets: Vec<(GateId, GateId)>,
    /// Derivative pairs of this stage found to be identically zero.
    pub zero_derivatives: usize,
    /// Frontier size for every threshold used in this stage.
    pub frontier_sizes: BTreeMap<usize, usize>,
    pub gates_added: usize,
    /// Largest depth of a gate built in this stage.
    pub depth: usize,
    /// Increase of that depth over the previous stage.
    pub depth_delta: usize,
}

/// Summary of a depth reduction run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageLedger {
    pub input_size: usize,
    pub degree: usize,
    pub output_size: usize,
    pub output_depth: usize,
    pub depth_bound: usize,
    /// `output_size / (input_size^3 · max(1, ⌈log2 d⌉))`.
    pub size_constant: f64,
    pub stages: Vec<StageRecord>,
}

/// `⌈log2 n⌉` for `n ≥ 1`, and 0 for `n = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// The depth bound `3⌈log2 d⌉ + 2` guaranteed by [`depth_reduce`].
pub fn depth_bound(d: usize) -> usize {
    3 * ceil_log2(d) as usize + 2
}

/// Stage in which a target of degree (or degree difference) `k` is built.
fn stage_of(k: usize) -> u32 {
    ceil_log2(k)
}

struct Builder<F> {
    b: CircuitBuilder<F>,
    one: Option<GateId>,
}

impl<F: Scalar> Builder<F> {
    fn mul(&mut self, x: GateId, y: GateId) -> GateId {
        if Some(x) == self.one {
            y
        } else if Some(y) == self.one {
            x
        } else {
            self.b.mul(x, y)
        }
    }

    fn constant(&mut self, c: F) -> GateId {
        let id = self.b.constant(c.clone());
        if c.is_one() {
            self.one = Some(id);
        }
        id
    }

    /// A gate for a polynomial of degree at most one.
    fn small(&mut self, p: &Polynomial<F>) -> Option<GateId> {
        if p.is_zero() {
            return None;
        }
        if let Some(c) = p.constant_value() {
            return Some(self.constant(c));
        }
        let parts = p
            .terms()
            .map(|(m, c)| {
                let x = self.b.input(m.vars()[0]);
                if c.is_one() {
                    x
                } else {
                    let k = self.b.constant(c.clone());
                    self.b.mul(k, x)
                }
            })
            .collect();
        Some(self.b.sum(parts))
    }
}

/// Rebuilds `circuit` with depth at most `3⌈log2 d⌉ + 2`.
///
/// The input must be non-redundant: a reachable gate computing zero is
/// reported as [`Error::RedundantGate`].
pub fn depth_reduce<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<(Circuit<F>, StageLedger)> {
    if let Some(&g) = circuit.redundant_gates(limits)?.first() {
        return Err(Error::RedundantGate { gate: g });
    }
    let c = circuit.prune();
    let sets = c.index_sets()?;
    let n = c.size();
    let gates = c.gates();
    let deg: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let d = deg[c.output()];
    let partition = c.partition().clone();

    let mut ledger = StageLedger {
        input_size: circuit.size(),
        degree: d,
        output_size: 0,
        output_depth: 0,
        depth_bound: depth_bound(d),
        size_constant: 0.0,
        stages: Vec::new(),
    };

    if d == 0 {
        let value = c.evaluate(&Default::default())?;
        let out = Circuit::from_topological(partition, vec![Gate::Const(value)], 0)?;
        ledger.output_size = 1;
        ledger.size_constant = size_constant(1, circuit.size(), d);
        return Ok((out, ledger));
    }

    let below = c.subcircuits();
    let frontier = |m: usize| -> Vec<GateId> {
        (0..n)
            .filter(|&t| match &gates[t] {
                Gate::Mul([a, b]) => deg[t] > m && deg[*a] <= m && deg[*b] <= m,
                _ => false,
            })
            .collect()
    };
    let frontiers: Vec<Vec<GateId>> = (0..=d).map(frontier).collect();

    // admissible derivative pairs, bucketed by stage
    let stages = stage_of(d) as usize;
    let mut pairs_by_stage: Vec<Vec<(GateId, GateId)>> = vec![Vec::new(); stages + 1];
    for v in 0..n {
        for w in below[v].iter() {
            if deg[w] >= 1 && deg[v] < 2 * deg[w] {
                pairs_by_stage[stage_of(deg[v] - deg[w]) as usize].push((v, w));
            }
        }
    }

    let mut bld = Builder {
        b: CircuitBuilder::hash_consing(),
        one: None,
    };
    let mut f_gate: Vec<Option<GateId>> = vec![None; n];
    let mut f_terms: Vec<Vec<GateId>> = vec![Vec::new(); n];
    let mut d_gate: HashMap<(GateId, GateId), GateId> = HashMap::new();
    let mut p_gate: HashMap<GateId, GateId> = HashMap::new();
    let mut stage_gates: Vec<Vec<GateId>> = vec![Vec::new(); stages + 1];

    // stage 0: gates of degree at most one and derivatives of degree at most one
    let mut small: Vec<Option<Polynomial<F>>> = vec![None; n];
    for v in 0..n {
        if deg[v] > 1 {
            continue;
        }
        let p = match &gates[v] {
            Gate::Input(x) => Polynomial::var(*x),
            Gate::Const(k) => Polynomial::constant(k.clone()),
            Gate::Add(args) => {
                let mut acc = small[args[0]]
                    .clone()
                    .expect("child of small gate is small");
                for &a in &args[1..] {
                    acc.add_assign(small[a].as_ref().expect("child of small gate is small"))?;
                }
                acc
            }
            Gate::Mul([a, b]) => small[*a]
                .as_ref()
                .expect("child of small gate is small")
                .mul(small[*b].as_ref().expect("child of small gate is small"))?,
        };
        small[v] = Some(p);
    }
    let mut record0 = StageRecord {
        stage: 0,
        gate_targets: Vec::new(),
        derivative_targets: Vec::new(),
        zero_derivatives: 0,
        frontier_sizes: BTreeMap::new(),
        gates_added: 0,
        depth: 0,
        depth_delta: 0,
    };
    let start = bld.b.len();
    for v in 0..n {
        if deg[v] == 1 {
            let g = bld
                .small(small[v].as_ref().unwrap())
                .ok_or(Error::RedundantGate { gate: v })?;
            f_gate[v] = Some(g);
            record0.gate_targets.push(v);
            stage_gates[0].push(g);
        }
    }
    let mut small_d: HashMap<(GateId, GateId), Polynomial<F>> = HashMap::new();
    for &(v, w) in &pairs_by_stage[0] {
        let p = if v == w {
            Polynomial::constant(F::one())
        } else {
            let zero = || Polynomial::zero(sets[v].difference(sets[w]));
            match &gates[v] {
                Gate::Add(args) => {
                    let mut acc = zero();
                    for &a in args.iter().filter(|&&a| below[a].contains(w)) {
                        acc.add_assign(&small_d[&(a, w)])?;
                    }
                    acc
                }
                Gate::Mul([a, b]) => {
                    let (inner, other) = if below[*a].contains(w) {
                        (*a, *b)
                    } else {
                        (*b, *a)
                    };
                    let f = small[other]
                        .as_ref()
                        .expect("cofactor has degree at most one");
                    small_d[&(inner, w)].mul(f)?
                }
                _ => unreachable!("a leaf has no proper descendants"),
            }
        };
        if let Some(g) = bld.small(&p) {
            d_gate.insert((v, w), g);
            record0.derivative_targets.push((v, w));
            stage_gates[0].push(g);
        } else {
            record0.zero_derivatives += 1;
        }
        small_d.insert((v, w), p);
    }
    record0.gates_added = bld.b.len() - start;
    ledger.stages.push(record0);

    for j in 1..=stages {
        let half = 1usize << (j - 1);
        let full = 1usize << j;
        let start = bld.b.len();
        let mut rec = StageRecord {
            stage: j as u32,
            gate_targets: Vec::new(),
            derivative_targets: Vec::new(),
            zero_derivatives: 0,
            frontier_sizes: BTreeMap::new(),
            gates_added: 0,
            depth: 0,
            depth_delta: 0,
        };
        rec.frontier_sizes.insert(half, frontiers[half].len());

        for v in (0..n).filter(|&v| deg[v] > half && deg[v] <= full) {
            let mut terms = Vec::new();
            for &t in frontiers[half].iter().filter(|&&t| below[v].contains(t)) {
                let Some(&dvt) = d_gate.get(&(v, t)) else {
                    continue;
                };
                let p = product_gate(&mut bld, &mut p_gate, &f_gate, gates, t);
                terms.push(bld.mul(p, dvt));
            }
            if terms.is_empty() {
                return Err(Error::RedundantGate { gate: v });
            }
            let g = bld.b.sum(terms.clone());
            f_terms[v] = terms;
            f_gate[v] = Some(g);
            rec.gate_targets.push(v);
            stage_gates[j].push(g);
        }

        for &(v, w) in &pairs_by_stage[j] {
            let m = half + deg[w];
            rec.frontier_sizes.entry(m).or_insert(frontiers[m].len());
            let mut terms = Vec::new();
            for &t in frontiers[m].iter().filter(|&&t| below[v].contains(t)) {
                let Gate::Mul([a, b]) = gates[t] else {
                    unreachable!()
                };
                let (t1, t2) = if deg[b] > deg[a] { (b, a) } else { (a, b) };
                if !below[t1].contains(w) {
                    continue;
                }
                let (Some(&d1), Some(&dv)) = (d_gate.get(&(t1, w)), d_gate.get(&(v, t))) else {
                    continue;
                };
                let tail = bld.mul(d1, dv);
                if deg[t2] > half {
                    for &s in &f_terms[t2] {
                        terms.push(bld.mul(s, tail));
                    }
                } else {
                    let f2 = f_gate[t2].expect("lower-degree gate already built");
                    terms.push(bld.mul(f2, tail));
                }
            }
            if terms.is_empty() {
                rec.zero_derivatives += 1;
            } else {
                let g = bld.b.sum(terms);
                d_gate.insert((v, w), g);
                rec.derivative_targets.push((v, w));
                stage_gates[j].push(g);
            }
        }
        rec.gates_added = bld.b.len() - start;
        ledger.stages.push(rec);
    }

    let out = f_gate[c.output()].expect("output gate built");
    let raw = bld.b.finish(partition, out)?;
    let depths = raw.depths();
    let mut prev = 0;
    for (rec, built) in ledger.stages.iter_mut().zip(&stage_gates) {
        rec.depth = built.iter().map(|&g| depths[g]).max().unwrap_or(prev);
        rec.depth_delta = rec.depth.saturating_sub(prev);
        prev = rec.depth;
    }
    let result = raw.prune();
    ledger.output_size = result.size();
    ledger.output_depth = result.depth();
    ledger.size_constant = size_constant(result.size(), circuit.size(), d);
    Ok((result, ledger))
}

fn product_gate<F: Scalar>(
    bld: &mut Builder<F>,
    cache: &mut HashMap<GateId, GateId>,
    f_gate: &[Option<GateId>],
    gates: &[Gate<F>],
    t: GateId,
) -> GateId {
    if let Some(&p) = cache.get(&t) {
        return p;
    }
    let Gate::Mul([a, b]) = gates[t] else {
        unreachable!("frontier gates are products")
    };
    let fa = f_gate[a].expect("frontier child already built");
    let fb = f_gate[b].expect("frontier child already built");
    let p = bld.mul(fa, fb);
    cache.insert(t, p);
    p
}

fn size_constant(output: usize, input: usize, d: usize) -> f64 {
    let s = input.max(1) as f64;
    output as f64 / (s * s * s * ceil_log2(d).max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random::random_corpus;
    use crate::{Fp31, Var, VariablePartition};

    fn right_comb(d: u32) -> Circuit<Fp31> {
        let mut b = CircuitBuilder::new();
        let mut acc = b.input(Var::new(d, 1));
        for i in (1..d).rev() {
            let x = b.input(Var::new(i, 1));
            acc = b.mul(x, acc);
        }
        b.finish(VariablePartition::uniform(d, 1), acc).unwrap()
    }

    #[test]
    fn log_values() {
        assert_eq!(
            [0, 1, 2, 3, 4, 5, 8, 9].map(ceil_log2),
            [0, 0, 1, 2, 2, 3, 3, 4]
        );
    }

    #[test]
    fn single_input_is_unchanged() {
        let c = right_comb(1);
        let (r, ledger) = depth_reduce(&c, &Limits::default()).unwrap();
        assert_eq!(r, c);
        assert_eq!(ledger.output_depth, 0);
    }

    #[test]
    fn comb_of_eight() {
        let c = right_comb(8);
        assert_eq!(c.depth(), 7);
        let lim = Limits::default();
        let (r, ledger) = depth_reduce(&c, &lim).unwrap();
        assert!(r.depth() <= 11, "depth {}", r.depth());
        assert_eq!(r.expand(&lim).unwrap(), c.expand(&lim).unwrap());
        assert_eq!(ledger.stages.len(), 4);
    }

    #[test]
    fn random_circuits_keep_their_polynomial() {
        let lim = Limits::default();
        for c in random_corpus::<Fp31>(11, 30) {
            let (r, ledger) = depth_reduce(&c, &lim).unwrap();
            assert!(r.depth() <= ledger.depth_bound);
            r.index_sets().unwrap();
            assert_eq!(r.expand(&lim).unwrap(), c.expand(&lim).unwrap());
            for rec in &ledger.stages[1..] {
                assert!(rec.depth_delta <= 3);
            }
        }
    }
}
