use std::collections::BTreeMap;

use super::{Circuit, CircuitBuilder, Gate, GateId};
use crate::algebra::field::Scalar;
use crate::algebra::poly::{classify_substitution, Var};
use crate::error::{Error, Result};

impl<F: Scalar> Circuit<F> {
    /// Drops gates unreachable from the output and renumbers the rest.
    pub fn prune(&self) -> Circuit<F> {
        let reach = self.reachable();
        let mut map = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (id, g) in self.gates.iter().enumerate() {
            if reach[id] {
                map[id] = gates.len();
                gates.push(g.map_children(|c| map[c]));
            }
        }
        Circuit {
            partition: self.partition.clone(),
            gates,
            output: map[self.output],
        }
    }

    /// The subcircuit rooted at `gate`.
    pub fn subcircuit(&self, gate: GateId) -> Result<Circuit<F>> {
        self.gate(gate)?;
        let c = Circuit {
            partition: self.partition.clone(),
            gates: self.gates.clone(),
            output: gate,
        };
        Ok(c.prune())
    }

    /// Replaces the gates in `replace` by constants and folds the
    /// consequences upward: products with a replaced zero factor vanish,
    /// sums drop vanished children, and gates whose children are all
    /// constants (at least one of them replaced) become constants.
    ///
    /// Gate ids are preserved; folded gates become constants and may leave
    /// some gates unreachable.
    pub fn replace_with_constants(&self, replace: &BTreeMap<GateId, F>) -> Circuit<F> {
        let n = self.gates.len();
        // value of a gate when it is a known constant, and whether that
        // constant stems from a replacement
        let mut known: Vec<Option<F>> = Vec::with_capacity(n);
        let mut fresh = vec![false; n];
        let mut gates = Vec::with_capacity(n);
        for (id, g) in self.gates.iter().enumerate() {
            if let Some(c) = replace.get(&id) {
                known.push(Some(c.clone()));
                fresh[id] = true;
                gates.push(Gate::Const(c.clone()));
                continue;
            }
            let fresh_zero = |c: usize, known: &[Option<F>]| {
                fresh[c] && known[c].as_ref().is_some_and(|v| v.is_zero())
            };
            let folded: Option<F> = match g {
                Gate::Input(_) => None,
                Gate::Const(c) => {
                    known.push(Some(c.clone()));
                    gates.push(g.clone());
                    continue;
                }
                Gate::Mul([a, b]) => {
                    if fresh_zero(*a, &known) || fresh_zero(*b, &known) {
                        Some(F::zero())
                    } else if (fresh[*a] || fresh[*b]) && known[*a].is_some() && known[*b].is_some()
                    {
                        Some(known[*a].clone().unwrap() * known[*b].clone().unwrap())
                    } else {
                        None
                    }
                }
                Gate::Add(args) => {
                    let kept: Vec<GateId> = args
                        .iter()
                        .copied()
                        .filter(|&c| !fresh_zero(c, &known))
                        .collect();
                    if kept.is_empty() {
                        Some(F::zero())
                    } else if kept.iter().any(|&c| fresh[c])
                        && kept.iter().all(|&c| known[c].is_some())
                    {
                        Some(
                            kept.iter()
                                .fold(F::zero(), |acc, &c| acc + known[c].clone().unwrap()),
                        )
                    } else {
                        if kept.len() != args.len() {
                            gates.push(Gate::Add(kept));
                        } else {
                            gates.push(g.clone());
                        }
                        known.push(None);
                        continue;
                    }
                }
            };
            match folded {
                Some(v) => {
                    fresh[id] = true;
                    gates.push(Gate::Const(v.clone()));
                    known.push(Some(v));
                }
                None => {
                    gates.push(g.clone());
                    known.push(None);
                }
            }
        }
        Circuit {
            partition: self.partition.clone(),
            gates,
            output: self.output,
        }
    }

    /// Sets the outputs of the given gates to zero; see [`Self::replace_with_constants`].
    pub fn zero_out(&self, gates: impl IntoIterator<Item = GateId>) -> Circuit<F> {
        let map = gates.into_iter().map(|g| (g, F::zero())).collect();
        self.replace_with_constants(&map)
    }

    /// Substitutes field values for variables.
    ///
    /// Fully assigned buckets disappear from every index set; a partially
    /// assigned bucket may only receive zeros. The result is pruned.
    pub fn substitute(&self, assignment: &BTreeMap<Var, F>) -> Result<Circuit<F>> {
        classify_substitution(&self.partition, assignment)?;
        if assignment.is_empty() {
            return Ok(self.clone());
        }
        let mut replace = BTreeMap::new();
        for (id, g) in self.gates.iter().enumerate() {
            if let Gate::Input(v) = g {
                if let Some(c) = assignment.get(v) {
                    replace.insert(id, c.clone());
                }
            }
        }
        Ok(self.replace_with_constants(&replace).prune())
    }

    /// A circuit for the derivative of the output with respect to gate `w`:
    /// `w` is treated as a fresh variable and the coefficient of its linear
    /// part is computed symbolically. Returns `None` when `w` is not in the
    /// output's subcircuit.
    pub fn derivative_circuit(&self, w: GateId) -> Result<Option<Circuit<F>>> {
        self.gate(w)?;
        let n = self.gates.len();
        let mut contains = vec![false; n];
        contains[w] = true;
        for id in w + 1..n {
            contains[id] = self.gates[id].children().iter().any(|&c| contains[c]);
        }
        if !contains[self.output] {
            return Ok(None);
        }
        let mut b = CircuitBuilder::hash_consing();
        let f = b.embed(self);
        let mut d = vec![usize::MAX; n];
        d[w] = b.constant(F::one());
        for id in w + 1..=self.output {
            if !contains[id] {
                continue;
            }
            d[id] = match &self.gates[id] {
                Gate::Add(args) => {
                    let parts = args
                        .iter()
                        .filter(|&&c| contains[c])
                        .map(|&c| d[c])
                        .collect();
                    b.sum(parts)
                }
                Gate::Mul([x, y]) => match (contains[*x], contains[*y]) {
                    (true, true) => return Err(Error::NonLinearInGate { gate: w }),
                    (true, false) => b.mul(d[*x], f[*y]),
                    (false, true) => b.mul(f[*x], d[*y]),
                    (false, false) => unreachable!(),
                },
                _ => unreachable!(),
            };
        }
        Ok(Some(
            b.finish(self.partition.clone(), d[self.output])?.prune(),
        ))
    }
}
