use std::collections::HashMap;

use super::{Circuit, Gate, GateId};
use crate::algebra::field::Scalar;
use crate::algebra::poly::{Var, VariablePartition};
use crate::error::Result;

/// Incremental construction of a circuit in topological order.
///
/// In hash-consing mode structurally identical gates are shared.
#[derive(Clone, Debug)]
pub struct CircuitBuilder<F> {
    gates: Vec<Gate<F>>,
    memo: Option<HashMap<Gate<F>, GateId>>,
}

impl<F: Scalar> Default for CircuitBuilder<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Scalar> CircuitBuilder<F> {
    /// A builder that never shares gates.
    pub fn new() -> Self {
        CircuitBuilder {
            gates: Vec::new(),
            memo: None,
        }
    }

    /// A builder that shares structurally identical gates.
    pub fn hash_consing() -> Self {
        CircuitBuilder {
            gates: Vec::new(),
            memo: Some(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: GateId) -> &Gate<F> {
        &self.gates[id]
    }

    pub fn push(&mut self, gate: Gate<F>) -> GateId {
        debug_assert!(gate.children().iter().all(|&c| c < self.gates.len()));
        if let Some(memo) = &mut self.memo {
            if let Some(&id) = memo.get(&gate) {
                return id;
            }
            memo.insert(gate.clone(), self.gates.len());
        }
        self.gates.push(gate);
        self.gates.len() - 1
    }

    pub fn input(&mut self, v: Var) -> GateId {
        self.push(Gate::Input(v))
    }

    pub fn constant(&mut self, c: F) -> GateId {
        self.push(Gate::Const(c))
    }

    pub fn add(&mut self, args: Vec<GateId>) -> GateId {
        assert!(!args.is_empty(), "add gate needs a child");
        self.push(Gate::Add(args))
    }

    /// Sum of `args`; a single argument is returned unchanged.
    pub fn sum(&mut self, args: Vec<GateId>) -> GateId {
        if args.len() == 1 {
            args[0]
        } else {
            self.add(args)
        }
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Mul([a, b]))
    }

    /// Left-associated product of `args`.
    pub fn product(&mut self, args: &[GateId]) -> GateId {
        let mut acc = args[0];
        for &a in &args[1..] {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// Copies every gate of `c` and returns the new ids indexed by old id.
    pub fn embed(&mut self, c: &Circuit<F>) -> Vec<GateId> {
        let mut map = Vec::with_capacity(c.size());
        for g in c.gates() {
            let id = self.push(g.map_children(|x| map[x]));
            map.push(id);
        }
        map
    }

    pub fn finish(self, partition: VariablePartition, output: GateId) -> Result<Circuit<F>> {
        Circuit::from_topological(partition, self.gates, output)
    }
}
