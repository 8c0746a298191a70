use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::types::{deleted, TreeType};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::Monomial;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::Limits;

/// Truncated shape of a partial proof tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    /// Contributed by constants; absorbed by products.
    Unit,
    /// Every node of the partial tree has been deleted.
    Gone,
    Tree(TreeType),
}

/// Outcome of the Property U check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyUReport {
    pub holds: bool,
    /// Number of monomials that have at least one proof tree.
    pub monomials: usize,
    /// First monomial, in monomial order, with two truncated types.
    pub counterexample: Option<Monomial>,
    /// The truncated types of the counterexample.
    pub counterexample_types: Vec<TreeType>,
}

/// Checks that every monomial's proof trees share one truncated type.
///
/// Proof trees are enumerated structurally, so monomials whose
/// coefficients cancel still count.
pub fn check_property_u<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<PropertyUReport> {
    let sets = circuit.index_sets()?;
    let d = sets[circuit.output()].len();
    let reach = circuit.reachable();
    let mut last_use = vec![0usize; circuit.size()];
    for (id, g) in circuit.gates().iter().enumerate() {
        for &c in g.children() {
            last_use[c] = id;
        }
    }
    type Table = BTreeMap<Monomial, BTreeSet<Shape>>;
    let mut tables: Vec<Option<Table>> = vec![None; circuit.size()];
    for (id, g) in circuit.gates().iter().enumerate() {
        if !reach[id] {
            continue;
        }
        let table: Table = match g {
            Gate::Input(v) => {
                let set = sets[id];
                let shape = if deleted(set, d) {
                    Shape::Gone
                } else {
                    Shape::Tree(TreeType::leaf(set))
                };
                BTreeMap::from([(Monomial::var(*v), BTreeSet::from([shape]))])
            }
            Gate::Const(_) => BTreeMap::from([(Monomial::one(), BTreeSet::from([Shape::Unit]))]),
            Gate::Add(args) => {
                let mut acc = Table::new();
                for &a in args {
                    for (m, s) in tables[a].as_ref().expect("child visited") {
                        acc.entry(m.clone()).or_default().extend(s.iter().cloned());
                    }
                }
                acc
            }
            Gate::Mul([a, b]) => {
                let (ta, tb) = (tables[*a].as_ref().unwrap(), tables[*b].as_ref().unwrap());
                let terms = ta.len().saturating_mul(tb.len());
                if terms > limits.terms {
                    return Err(Error::TermBlowup {
                        terms,
                        ceiling: limits.terms,
                    });
                }
                let mut acc = Table::new();
                for (ma, sa) in ta {
                    for (mb, sb) in tb {
                        let entry = acc.entry(ma.mul_disjoint(mb)).or_default();
                        for x in sa {
                            for y in sb {
                                entry.insert(combine(x, y, sets[id], d));
                            }
                        }
                        if entry.len() > limits.types {
                            return Err(Error::TypeCountCeiling {
                                ceiling: limits.types,
                            });
                        }
                    }
                }
                acc
            }
        };
        tables[id] = Some(table);
        for &c in g.children() {
            if last_use[c] == id && c != circuit.output() {
                tables[c] = None;
            }
        }
    }
    let table = tables[circuit.output()].take().expect("output visited");
    let mut report = PropertyUReport {
        holds: true,
        monomials: table.len(),
        counterexample: None,
        counterexample_types: vec![],
    };
    for (m, shapes) in table {
        if shapes.len() > 1 {
            report.holds = false;
            report.counterexample_types = shapes
                .into_iter()
                .filter_map(|s| match s {
                    Shape::Tree(t) => Some(t),
                    _ => None,
                })
                .collect();
            report.counterexample = Some(m);
            break;
        }
    }
    Ok(report)
}

fn combine(x: &Shape, y: &Shape, set: IndexSet, d: usize) -> Shape {
    match (x, y) {
        (Shape::Unit, s) | (s, Shape::Unit) => s.clone(),
        _ if deleted(set, d) => Shape::Gone,
        (Shape::Gone, Shape::Gone) => Shape::Tree(TreeType::leaf(set)),
        (Shape::Tree(t), Shape::Gone) | (Shape::Gone, Shape::Tree(t)) => {
            Shape::Tree(TreeType::chain(set, t.clone()))
        }
        (Shape::Tree(a), Shape::Tree(b)) => Shape::Tree(TreeType::join(a.clone(), b.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::{Fp31, Var, VariablePartition};

    #[test]
    fn same_monomial_two_shapes() {
        // x1 x2 x3 x4 x5 x6 as a left comb plus as two halves
        let mut b = CircuitBuilder::<Fp31>::new();
        let x: Vec<_> = (1..=6).map(|i| b.input(Var::new(i, 1))).collect();
        let comb = b.product(&x);
        let l = b.product(&x[..3]);
        let r = b.product(&x[3..]);
        let halves = b.mul(l, r);
        let s = b.add(vec![comb, halves]);
        let c = b.finish(VariablePartition::uniform(6, 1), s).unwrap();
        let rep = check_property_u(&c, &Limits::default()).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.counterexample_types.len(), 2);
        let only_comb = c.subcircuit(comb).unwrap();
        assert!(
            check_property_u(&only_comb, &Limits::default())
                .unwrap()
                .holds
        );
    }
}
