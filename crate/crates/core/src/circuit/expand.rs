use std::collections::BTreeMap;

use serde::Serialize;

use super::{Circuit, Gate, GateId};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::{Polynomial, Var};
use crate::error::{Error, Result};
use crate::Limits;

/// Result of validating a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub index_sets: Vec<IndexSet>,
    pub output_index_set: IndexSet,
    pub degree: usize,
    pub depth: usize,
    pub size: usize,
    /// Reachable gates computing the zero polynomial; `None` when the
    /// expansion exceeded its ceiling.
    pub redundant_gates: Option<Vec<GateId>>,
}

impl<F: Scalar> Circuit<F> {
    /// Polynomial of every gate, by bottom-up expansion.
    pub fn expand_all(&self, limits: &Limits) -> Result<Vec<Polynomial<F>>> {
        self.index_sets()?;
        let mut polys: Vec<Polynomial<F>> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let p = self.expand_gate(g, |c| &polys[c], limits)?;
            polys.push(p);
        }
        Ok(polys)
    }

    /// Polynomial computed at the output gate.
    ///
    /// Intermediate polynomials are dropped as soon as their last parent has
    /// been expanded.
    pub fn expand(&self, limits: &Limits) -> Result<Polynomial<F>> {
        self.index_sets()?;
        let reach = self.reachable();
        let mut last_use = vec![0usize; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            for &c in g.children() {
                last_use[c] = id;
            }
        }
        let mut polys: Vec<Option<Polynomial<F>>> = vec![None; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            if !reach[id] {
                continue;
            }
            let p = self.expand_gate(g, |c| polys[c].as_ref().expect("child expanded"), limits)?;
            polys[id] = Some(p);
            for &c in g.children() {
                if last_use[c] == id && c != self.output {
                    polys[c] = None;
                }
            }
        }
        Ok(polys[self.output].take().expect("output expanded"))
    }

    fn expand_gate<'a>(
        &self,
        g: &Gate<F>,
        child: impl Fn(GateId) -> &'a Polynomial<F>,
        limits: &Limits,
    ) -> Result<Polynomial<F>>
    where
        F: 'a,
    {
        let p = match g {
            Gate::Input(v) => Polynomial::var(*v),
            Gate::Const(c) => Polynomial::constant(c.clone()),
            Gate::Add(args) => {
                let mut acc = child(args[0]).clone();
                for &a in &args[1..] {
                    acc.add_assign(child(a))?;
                }
                acc
            }
            Gate::Mul([a, b]) => child(*a).mul_limited(child(*b), limits)?,
        };
        if p.len() > limits.terms {
            return Err(Error::TermBlowup {
                terms: p.len(),
                ceiling: limits.terms,
            });
        }
        Ok(p)
    }

    /// Value of the output gate at a point. Only reachable inputs need values.
    pub fn evaluate(&self, assignment: &BTreeMap<Var, F>) -> Result<F> {
        Ok(self.evaluate_all(assignment)?[self.output].clone())
    }

    /// Values of all reachable gates; unreachable gates evaluate to zero.
    pub fn evaluate_all(&self, assignment: &BTreeMap<Var, F>) -> Result<Vec<F>> {
        let reach = self.reachable();
        let mut vals: Vec<F> = Vec::with_capacity(self.gates.len());
        for (id, g) in self.gates.iter().enumerate() {
            if !reach[id] {
                vals.push(F::zero());
                continue;
            }
            let v = match g {
                Gate::Input(v) => assignment
                    .get(v)
                    .cloned()
                    .ok_or(Error::MissingAssignment(*v))?,
                Gate::Const(c) => c.clone(),
                Gate::Add(args) => args.iter().fold(F::zero(), |acc, &a| acc + vals[a].clone()),
                Gate::Mul([a, b]) => vals[*a].clone() * vals[*b].clone(),
            };
            vals.push(v);
        }
        Ok(vals)
    }

    /// Reachable gates whose polynomial is zero.
    pub fn redundant_gates(&self, limits: &Limits) -> Result<Vec<GateId>> {
        let reach = self.reachable();
        let polys = self.expand_all(limits)?;
        Ok((0..self.gates.len())
            .filter(|&i| reach[i] && polys[i].is_zero())
            .collect())
    }

    /// Checks the typing rules and, at desk scale, non-redundancy.
    pub fn validate(&self, limits: &Limits) -> Result<Annotation> {
        let index_sets = self.index_sets()?;
        let redundant_gates = match self.redundant_gates(limits) {
            Ok(r) => Some(r),
            Err(Error::TermBlowup { .. }) => None,
            Err(e) => return Err(e),
        };
        let output_index_set = index_sets[self.output];
        Ok(Annotation {
            output_index_set,
            degree: output_index_set.len(),
            depth: self.depth(),
            size: self.size(),
            index_sets,
            redundant_gates,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::{Fp31, VariablePartition};

    #[test]
    fn diamond_expansion_and_evaluation() {
        let mut b = CircuitBuilder::<Fp31>::new();
        let x11 = b.input(Var::new(1, 1));
        let x12 = b.input(Var::new(1, 2));
        let s = b.add(vec![x11, x12]);
        let x21 = b.input(Var::new(2, 1));
        let m = b.mul(s, x21);
        let x31 = b.input(Var::new(3, 1));
        let left = b.mul(m, x31);
        let neg = b.constant(-Fp31::new(1));
        let right = b.mul(neg, left);
        let two = b.constant(Fp31::new(3));
        let right3 = b.mul(two, right);
        let top = b.add(vec![left, right3]);
        let c = b.finish(VariablePartition::uniform(3, 2), top).unwrap();
        let p = c.expand(&Limits::default()).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.terms().all(|(_, v)| *v == -Fp31::new(2)));
        let mut a = BTreeMap::new();
        for (v, val) in [((1, 1), 2), ((1, 2), 5), ((2, 1), 7), ((3, 1), 11)] {
            a.insert(Var::new(v.0, v.1), Fp31::new(val));
        }
        assert_eq!(c.evaluate(&a).unwrap(), p.eval(&a).unwrap());
        assert_eq!(
            c.validate(&Limits::default()).unwrap().redundant_gates,
            Some(vec![])
        );
    }

    #[test]
    fn cancelling_gate_is_redundant() {
        let mut b = CircuitBuilder::<Fp31>::new();
        let x = b.input(Var::new(1, 1));
        let neg = b.constant(-Fp31::new(1));
        let y = b.mul(neg, x);
        let z = b.add(vec![x, y]);
        let c = b.finish(VariablePartition::uniform(1, 1), z).unwrap();
        assert_eq!(c.redundant_gates(&Limits::default()).unwrap(), vec![3]);
    }
}
