//! Set-multilinear circuits.
//!
//! A [`Circuit`] stores its gates in topological order: every child id is
//! smaller than the id of its parent, and ids are dense indices into the
//! gate vector.

mod analysis;
mod builder;
mod edit;
mod expand;
pub mod json;
pub mod random;

use std::collections::HashMap;

use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::{Var, VariablePartition};
use crate::error::{Error, Result};

pub use analysis::{check_permutation, IntervalReport};
pub use builder::CircuitBuilder;
pub use expand::Annotation;

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate<F> {
    Input(Var),
    Const(F),
    Add(Vec<GateId>),
    Mul([GateId; 2]),
}

impl<F> Gate<F> {
    pub fn children(&self) -> &[GateId] {
        match self {
            Gate::Input(_) | Gate::Const(_) => &[],
            Gate::Add(args) => args,
            Gate::Mul(args) => args,
        }
    }

    pub fn is_mul(&self) -> bool {
        matches!(self, Gate::Mul(_))
    }

    pub fn is_add(&self) -> bool {
        matches!(self, Gate::Add(_))
    }

    /// Same gate with children renamed through `f`.
    pub fn map_children(&self, mut f: impl FnMut(GateId) -> GateId) -> Gate<F>
    where
        F: Clone,
    {
        match self {
            Gate::Input(v) => Gate::Input(*v),
            Gate::Const(c) => Gate::Const(c.clone()),
            Gate::Add(args) => Gate::Add(args.iter().map(|&a| f(a)).collect()),
            Gate::Mul([a, b]) => Gate::Mul([f(*a), f(*b)]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit<F> {
    partition: VariablePartition,
    gates: Vec<Gate<F>>,
    output: GateId,
}

impl<F: Scalar> Circuit<F> {
    /// Builds a circuit from gates already in topological order.
    pub fn from_topological(
        partition: VariablePartition,
        gates: Vec<Gate<F>>,
        output: GateId,
    ) -> Result<Self> {
        for (id, g) in gates.iter().enumerate() {
            match g {
                Gate::Input(v) => partition.check_var(*v)?,
                Gate::Add(args) if args.is_empty() => return Err(Error::EmptyAdd { gate: id }),
                _ => {}
            }
            for &c in g.children() {
                if c >= gates.len() {
                    return Err(Error::GateNotFound(c));
                }
                if c >= id {
                    return Err(Error::CycleDetected { gate: id });
                }
            }
        }
        if output >= gates.len() {
            return Err(Error::GateNotFound(output));
        }
        Ok(Circuit {
            partition,
            gates,
            output,
        })
    }

    /// Builds a circuit from gates carrying arbitrary distinct ids, in any
    /// order. Gates are renumbered into a topological order that keeps the
    /// given order whenever it is already topological.
    pub fn from_records(
        partition: VariablePartition,
        records: Vec<(usize, Gate<F>)>,
        output: usize,
    ) -> Result<Self> {
        let mut pos = HashMap::with_capacity(records.len());
        for (k, (id, _)) in records.iter().enumerate() {
            if pos.insert(*id, k).is_some() {
                return Err(Error::DuplicateGate(*id));
            }
        }
        for (_, g) in &records {
            for c in g.children() {
                if !pos.contains_key(c) {
                    return Err(Error::GateNotFound(*c));
                }
            }
        }
        let out_pos = *pos.get(&output).ok_or(Error::GateNotFound(output))?;

        // Iterative depth-first post-order; state 1 = on stack, 2 = done.
        let n = records.len();
        let mut state = vec![0u8; n];
        let mut new_id = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let children = records[node].1.children();
                if *next < children.len() {
                    let c = pos[&children[*next]];
                    *next += 1;
                    match state[c] {
                        0 => {
                            state[c] = 1;
                            stack.push((c, 0));
                        }
                        1 => return Err(Error::CycleDetected { gate: records[c].0 }),
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                    new_id[node] = order.len();
                    order.push(node);
                    stack.pop();
                }
            }
        }
        let gates = order
            .iter()
            .map(|&k| records[k].1.map_children(|c| new_id[pos[&c]]))
            .collect();
        Self::from_topological(partition, gates, new_id[out_pos])
    }

    pub fn partition(&self) -> &VariablePartition {
        &self.partition
    }

    pub fn gates(&self) -> &[Gate<F>] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> Result<&Gate<F>> {
        self.gates.get(id).ok_or(Error::GateNotFound(id))
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    /// Number of gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Checks the set-multilinear typing rules and returns `I_v` for every gate.
    pub fn index_sets(&self) -> Result<Vec<IndexSet>> {
        let mut sets: Vec<IndexSet> = Vec::with_capacity(self.gates.len());
        for (id, g) in self.gates.iter().enumerate() {
            let set = match g {
                Gate::Input(v) => IndexSet::singleton(v.bucket),
                Gate::Const(_) => IndexSet::EMPTY,
                Gate::Add(args) => {
                    let first = sets[args[0]];
                    for &a in &args[1..] {
                        let s = sets[a];
                        if s != first {
                            if s.is_empty() || first.is_empty() {
                                return Err(Error::ConstInAddWithVariables { gate: id });
                            }
                            return Err(Error::AddChildMismatch { gate: id });
                        }
                    }
                    first
                }
                Gate::Mul([a, b]) => {
                    if !sets[*a].is_disjoint(sets[*b]) {
                        return Err(Error::MulChildOverlap { gate: id });
                    }
                    sets[*a].union(sets[*b])
                }
            };
            sets.push(set);
        }
        Ok(sets)
    }

    /// Index set of the output gate.
    pub fn output_index_set(&self) -> Result<IndexSet> {
        Ok(self.index_sets()?[self.output])
    }

    /// Length of the longest leaf-to-gate path, per gate.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let d = g
                .children()
                .iter()
                .map(|&c| depth[c] + 1)
                .max()
                .unwrap_or(0);
            depth.push(d);
        }
        depth
    }

    /// Depth of the output gate.
    pub fn depth(&self) -> usize {
        self.depths()[self.output]
    }

    /// Marks gates reachable from the output.
    pub fn reachable(&self) -> Vec<bool> {
        let mut mark = vec![false; self.gates.len()];
        mark[self.output] = true;
        for id in (0..self.gates.len()).rev() {
            if mark[id] {
                for &c in self.gates[id].children() {
                    mark[c] = true;
                }
            }
        }
        mark
    }

    /// Number of parents of every gate, counting only reachable parents.
    pub fn fanouts(&self) -> Vec<usize> {
        let reach = self.reachable();
        let mut fan = vec![0; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            if reach[id] {
                for &c in g.children() {
                    fan[c] += 1;
                }
            }
        }
        fan
    }

    /// True when every reachable gate is used at most once.
    pub fn is_formula(&self) -> bool {
        self.first_shared_gate().is_none()
    }

    pub fn first_shared_gate(&self) -> Option<GateId> {
        self.fanouts().iter().position(|&f| f > 1)
    }

    /// For every gate, the set of gates in its subcircuit (including itself),
    /// as a bit set over gate ids.
    pub fn subcircuits(&self) -> Vec<GateSet> {
        let n = self.gates.len();
        let mut out: Vec<GateSet> = Vec::with_capacity(n);
        for (id, g) in self.gates.iter().enumerate() {
            let mut s = GateSet::new(n);
            s.insert(id);
            for &c in g.children() {
                s.union_with(&out[c]);
            }
            out.push(s);
        }
        out
    }
}

/// A fixed-capacity bit set over gate ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateSet {
    words: Vec<u64>,
}

impl GateSet {
    pub fn new(capacity: usize) -> Self {
        GateSet {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, id: usize) {
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn contains(&self, id: usize) -> bool {
        self.words
            .get(id / 64)
            .is_some_and(|w| w & (1 << (id % 64)) != 0)
    }

    pub fn union_with(&mut self, other: &GateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Fp31;

    fn part() -> VariablePartition {
        VariablePartition::uniform(3, 2)
    }

    #[test]
    fn records_are_renumbered_topologically() {
        let recs = vec![
            (10, Gate::Mul([5, 7])),
            (5, Gate::Input(Var::new(1, 1))),
            (7, Gate::Input(Var::new(2, 1))),
        ];
        let c = Circuit::<Fp31>::from_records(part(), recs, 10).unwrap();
        assert_eq!(c.output(), 2);
        assert_eq!(c.gates()[2], Gate::Mul([0, 1]));
    }

    #[test]
    fn cycle_is_detected() {
        let recs = vec![(0, Gate::Add(vec![1])), (1, Gate::Add(vec![0]))];
        assert!(matches!(
            Circuit::<Fp31>::from_records(part(), recs, 0),
            Err(Error::CycleDetected { .. })
        ));
    }

    #[test]
    fn typing_errors() {
        let x = |b, c| Gate::Input(Var::new(b, c));
        let mism = Circuit::<Fp31>::from_topological(
            part(),
            vec![x(1, 1), x(2, 1), Gate::Add(vec![0, 1])],
            2,
        )
        .unwrap();
        assert_eq!(mism.index_sets(), Err(Error::AddChildMismatch { gate: 2 }));
        let overlap =
            Circuit::<Fp31>::from_topological(part(), vec![x(1, 1), x(1, 2), Gate::Mul([0, 1])], 2)
                .unwrap();
        assert_eq!(
            overlap.index_sets(),
            Err(Error::MulChildOverlap { gate: 2 })
        );
        let mixed = Circuit::<Fp31>::from_topological(
            part(),
            vec![x(1, 1), Gate::Const(Fp31::new(1)), Gate::Add(vec![0, 1])],
            2,
        )
        .unwrap();
        assert_eq!(
            mixed.index_sets(),
            Err(Error::ConstInAddWithVariables { gate: 2 })
        );
    }

    #[test]
    fn gate_set_iterates_in_order() {
        let mut s = GateSet::new(130);
        for i in [3, 64, 129] {
            s.insert(i);
        }
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert!(s.contains(64) && !s.contains(65));
    }
}
