use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::types::{deleted, enumerate_tree_types, TreeType};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::Polynomial;
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::error::{Error, Result};
use crate::Limits;

/// Splits the circuit into one component per proof-tree type.
///
/// Component `i` is the circuit with every gate zeroed whose nonempty
/// index set labels no node of type `i`. Components come in type order
/// and their expansions sum to the expansion of the input.
pub fn decompose_by_type<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<Vec<(TreeType, Circuit<F>)>> {
    let types = enumerate_tree_types(circuit, limits)?;
    let sets = circuit.index_sets()?;
    Ok(types
        .into_iter()
        .map(|t| {
            let family = t.node_sets();
            let off =
                (0..circuit.size()).filter(|&g| !sets[g].is_empty() && !family.contains(&sets[g]));
            let part = circuit.zero_out(off).prune();
            (t, part)
        })
        .collect())
}

/// Product gates above degree `d/3` whose children are both at most `d/3`.
fn third_frontier(sets: &[IndexSet], gates: &[Gate<impl Scalar>], d: usize) -> Vec<GateId> {
    (0..gates.len())
        .filter(|&g| match &gates[g] {
            Gate::Mul([a, b]) => {
                !deleted(sets[g], d) && deleted(sets[*a], d) && deleted(sets[*b], d)
            }
            _ => false,
        })
        .collect()
}

/// Distinct index sets on the degree-`d/3` frontier, sorted.
pub fn frontier_index_sets<F: Scalar>(circuit: &Circuit<F>) -> Result<Vec<IndexSet>> {
    let c = circuit.prune();
    let sets = c.index_sets()?;
    let d = sets[c.output()].len();
    let found: BTreeSet<IndexSet> = third_frontier(&sets, c.gates(), d)
        .into_iter()
        .map(|g| sets[g])
        .collect();
    Ok(found.into_iter().collect())
}

/// The circuit `Σ_g C_g · ∂_g C` over frontier gates `g` with index set `set`.
///
/// The derivative at `g` is taken after zeroing the other frontier gates
/// over `set` and every frontier gate whose index set is neither `set`
/// nor its complement.
pub fn slice_by_index_set<F: Scalar>(circuit: &Circuit<F>, set: IndexSet) -> Result<Circuit<F>> {
    let c = circuit.prune();
    let sets = c.index_sets()?;
    let top = sets[c.output()];
    let d = top.len();
    let frontier = third_frontier(&sets, c.gates(), d);
    let chosen: Vec<GateId> = frontier
        .iter()
        .copied()
        .filter(|&g| sets[g] == set)
        .collect();
    if chosen.is_empty() {
        return Err(Error::EmptyFrontier(set));
    }
    let complement = top.difference(set);
    let others: Vec<GateId> = frontier
        .iter()
        .copied()
        .filter(|&g| sets[g] != set && sets[g] != complement)
        .collect();
    let mut b = CircuitBuilder::hash_consing();
    let mut terms = Vec::new();
    for &g in &chosen {
        let zeroed = chosen
            .iter()
            .copied()
            .filter(|&h| h != g)
            .chain(others.iter().copied());
        let Some(deriv) = c.zero_out(zeroed).derivative_circuit(g)? else {
            continue;
        };
        let below = c.subcircuit(g)?;
        let x = b.embed(&below)[below.output()];
        let y = b.embed(&deriv)[deriv.output()];
        terms.push(b.mul(x, y));
    }
    if terms.is_empty() {
        let zero = b.constant(F::zero());
        return b.finish(c.partition().clone(), zero);
    }
    let out = b.sum(terms);
    Ok(b.finish(c.partition().clone(), out)?.prune())
}

/// Whether the slices over all frontier index sets split the polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceCheck {
    pub index_sets: Vec<IndexSet>,
    /// Number of monomials of each slice.
    pub slice_terms: Vec<usize>,
    /// No monomial occurs in two slices.
    pub disjoint: bool,
    /// The slices add up to the input polynomial.
    pub sums_to_input: bool,
}

impl SliceCheck {
    pub fn is_partition(&self) -> bool {
        self.disjoint && self.sums_to_input
    }
}

pub fn check_slice_partition<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<SliceCheck> {
    let index_sets = frontier_index_sets(circuit)?;
    let target = circuit.expand(limits)?;
    let mut total = Polynomial::zero(target.index_set());
    let mut seen = BTreeSet::new();
    let mut disjoint = true;
    let mut slice_terms = Vec::new();
    for &set in &index_sets {
        let p = slice_by_index_set(circuit, set)?.expand(limits)?;
        slice_terms.push(p.len());
        for (m, _) in p.terms() {
            disjoint &= seen.insert(m.clone());
        }
        if !p.is_zero() {
            total.add_assign(&p)?;
        }
    }
    Ok(SliceCheck {
        index_sets,
        slice_terms,
        disjoint,
        sums_to_input: total == target,
    })
}

/// Rewrites a circuit with a single proof-tree type as a formula.
///
/// At each level a node `u` of the type with `d/3 ≤ |I_u| ≤ 2d/3` is
/// chosen, and the polynomial is written as `Σ_v f_v · ∂_v f` over gates
/// `v` with index set `I_u`, where the derivative at `v` ignores paths
/// through other such gates above `v`. Both factors again have a single
/// type and are rewritten recursively. Factors that vanish are dropped.
pub fn unique_type_to_formula<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<Circuit<F>> {
    let types = enumerate_tree_types(circuit, limits)?;
    if types.len() != 1 {
        return Err(Error::NotUniqueType { count: types.len() });
    }
    let mut b = CircuitBuilder::new();
    let out = match rewrite(&circuit.prune(), &types[0], &mut b, limits)? {
        Some(g) => g,
        None => b.constant(F::zero()),
    };
    b.finish(circuit.partition().clone(), out)
}

fn rewrite<F: Scalar>(
    c: &Circuit<F>,
    t: &TreeType,
    b: &mut CircuitBuilder<F>,
    limits: &Limits,
) -> Result<Option<GateId>> {
    if b.len() > limits.size {
        return Err(Error::SizeCeilingExceeded {
            size: b.len(),
            ceiling: limits.size,
        });
    }
    let d = t.set().len();
    if d <= 1 {
        return Ok(small_formula(&c.expand(limits)?, b));
    }
    let mut u = t;
    while 3 * u.set().len() > 2 * d {
        u = u.larger_child().expect("a node above 2d/3 has children");
    }
    let rest = without(t, u.set());
    let sets = c.index_sets()?;
    let below = c.subcircuits();
    let level: Vec<GateId> = (0..c.size()).filter(|&g| sets[g] == u.set()).collect();
    let mut terms = Vec::new();
    for &v in &level {
        let above = level.iter().copied().filter(|&h| !below[v].contains(h));
        let Some(q) = c.zero_out(above).derivative_circuit(v)? else {
            continue;
        };
        let p = c.subcircuit(v)?;
        let Some(fp) = rewrite(&p, u, b, limits)? else {
            continue;
        };
        let Some(fq) = rewrite(&q, &rest, b, limits)? else {
            continue;
        };
        terms.push(b.mul(fp, fq));
    }
    Ok(if terms.is_empty() {
        None
    } else {
        Some(b.sum(terms))
    })
}

/// The type with the subtree over `set` removed and its parent contracted.
fn without(t: &TreeType, set: IndexSet) -> TreeType {
    let kids = t.children();
    if let Some(k) = kids.iter().position(|c| c.set() == set) {
        return kids[1 - k].clone();
    }
    let (a, b) = (&kids[0], &kids[1]);
    if set.is_subset(a.set()) {
        TreeType::join(without(a, set), b.clone())
    } else {
        TreeType::join(a.clone(), without(b, set))
    }
}

/// A formula for a nonzero polynomial of degree at most one.
fn small_formula<F: Scalar>(p: &Polynomial<F>, b: &mut CircuitBuilder<F>) -> Option<GateId> {
    if p.is_zero() {
        return None;
    }
    if let Some(c) = p.constant_value() {
        return Some(b.constant(c));
    }
    let parts: Vec<GateId> = p
        .terms()
        .map(|(m, c)| {
            let x = b.input(m.vars()[0]);
            if c.is_one() {
                x
            } else {
                let k = b.constant(c.clone());
                b.mul(k, x)
            }
        })
        .collect();
    Some(b.sum(parts))
}

/// Number of gates of each type component, for reports.
pub fn component_sizes<F: Scalar>(parts: &[(TreeType, Circuit<F>)]) -> BTreeMap<String, usize> {
    parts
        .iter()
        .map(|(t, c)| (t.to_string(), c.size()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prooftree::property_u::check_property_u;
    use crate::{Fp31, Var, VariablePartition};

    fn mixed_association() -> Circuit<Fp31> {
        let mut b = CircuitBuilder::<Fp31>::new();
        let x: Vec<_> = (1..=3).map(|i| b.input(Var::new(i, 1))).collect();
        let y: Vec<_> = (1..=3).map(|i| b.input(Var::new(i, 2))).collect();
        let r = b.mul(x[1], x[2]);
        let right = b.mul(x[0], r);
        let l = b.mul(y[0], y[1]);
        let left = b.mul(l, y[2]);
        let s = b.add(vec![right, left]);
        b.finish(VariablePartition::uniform(3, 2), s).unwrap()
    }

    #[test]
    fn decomposition_sums_back() {
        let c = mixed_association();
        let lim = Limits::default();
        let parts = decompose_by_type(&c, &lim).unwrap();
        assert_eq!(parts.len(), 2);
        let mut total = Polynomial::zero(IndexSet::full(3));
        for (t, p) in &parts {
            assert_eq!(enumerate_tree_types(p, &lim).unwrap(), vec![t.clone()]);
            total.add_assign(&p.expand(&lim).unwrap()).unwrap();
        }
        assert_eq!(total, c.expand(&lim).unwrap());
    }

    #[test]
    fn shared_gate_becomes_formula() {
        // (x1 x2 + y1 y2) * x3 + (x1 x2 + y1 y2) * y3, with the sum shared
        let mut b = CircuitBuilder::<Fp31>::new();
        let x: Vec<_> = (1..=4).map(|i| b.input(Var::new(i, 1))).collect();
        let y: Vec<_> = (1..=4).map(|i| b.input(Var::new(i, 2))).collect();
        let p1 = b.mul(x[0], x[1]);
        let p2 = b.mul(y[0], y[1]);
        let s = b.add(vec![p1, p2]);
        let a = b.mul(s, x[2]);
        let a = b.mul(a, x[3]);
        let c2 = b.mul(s, y[2]);
        let c2 = b.mul(c2, y[3]);
        let top = b.add(vec![a, c2]);
        let c = b.finish(VariablePartition::uniform(4, 2), top).unwrap();
        let lim = Limits::default();
        let f = unique_type_to_formula(&c, &lim).unwrap();
        assert!(f.is_formula());
        assert_eq!(f.expand(&lim).unwrap(), c.expand(&lim).unwrap());
        assert_eq!(enumerate_tree_types(&f, &lim).unwrap().len(), 1);
        assert!(check_property_u(&f, &lim).unwrap().holds);
        assert_eq!(
            unique_type_to_formula(&mixed_association(), &lim).unwrap_err(),
            Error::NotUniqueType { count: 2 }
        );
    }
}
