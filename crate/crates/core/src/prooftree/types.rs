use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::Limits;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct TreeNode {
    set: IndexSet,
    children: Vec<TreeType>,
}

/// A binary tree labelled by index sets, with children ordered by their
/// least bucket so that equal shapes compare equal.
///
/// Proof-tree types have two children at every inner node; truncated
/// types may also have nodes with a single child.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeType(Arc<TreeNode>);

impl TreeType {
    pub fn leaf(set: IndexSet) -> Self {
        TreeType(Arc::new(TreeNode {
            set,
            children: Vec::new(),
        }))
    }

    /// A node over the disjoint union of its children's sets.
    pub fn join(a: TreeType, b: TreeType) -> Self {
        let set = a.set().union(b.set());
        Self::node(set, vec![a, b])
    }

    /// A node with a single child, as occurs in truncated types.
    pub fn chain(set: IndexSet, child: TreeType) -> Self {
        Self::node(set, vec![child])
    }

    fn node(set: IndexSet, mut children: Vec<TreeType>) -> Self {
        children.sort_by_key(|c| c.set().min());
        TreeType(Arc::new(TreeNode { set, children }))
    }

    pub fn set(&self) -> IndexSet {
        self.0.set
    }

    pub fn children(&self) -> &[TreeType] {
        &self.0.children
    }

    pub fn is_leaf(&self) -> bool {
        self.0.children.is_empty()
    }

    pub fn leaves(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children().iter().map(TreeType::leaves).sum()
        }
    }

    /// Index sets of all nodes.
    pub fn node_sets(&self) -> BTreeSet<IndexSet> {
        let mut out = BTreeSet::new();
        self.collect_sets(&mut out);
        out
    }

    fn collect_sets(&self, out: &mut BTreeSet<IndexSet>) {
        out.insert(self.set());
        for c in self.children() {
            c.collect_sets(out);
        }
    }

    /// Leaves of the tree, left to right.
    pub fn leaf_sets(&self) -> Vec<IndexSet> {
        if self.is_leaf() {
            vec![self.set()]
        } else {
            self.children()
                .iter()
                .flat_map(TreeType::leaf_sets)
                .collect()
        }
    }

    /// Deletes every node whose index set has at most `d/3` buckets.
    /// Returns `None` when the root itself is deleted.
    pub fn truncate(&self, d: usize) -> Option<TreeType> {
        let t = self.truncate_inner(d)?;
        assert!(
            t.leaves() <= 2,
            "truncated type {t} has more than two leaves"
        );
        Some(t)
    }

    fn truncate_inner(&self, d: usize) -> Option<TreeType> {
        if deleted(self.set(), d) {
            return None;
        }
        let kids = self
            .children()
            .iter()
            .filter_map(|c| c.truncate_inner(d))
            .collect();
        Some(Self::node(self.set(), kids))
    }

    /// The child to follow when looking for a node of balanced size.
    pub fn larger_child(&self) -> Option<&TreeType> {
        self.children()
            .iter()
            .max_by_key(|c| (c.set().len(), std::cmp::Reverse(c.set().min())))
    }
}

/// Whether a node over `set` disappears when truncating at degree `d`.
pub fn deleted(set: IndexSet, d: usize) -> bool {
    3 * set.len() <= d
}

impl fmt::Display for TreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.set())?;
        if !self.is_leaf() {
            write!(f, "(")?;
            for (k, c) in self.children().iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Serialize for TreeType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TreeType", 2)?;
        st.serialize_field("I", &self.set())?;
        st.serialize_field("children", self.children())?;
        st.end()
    }
}

/// Shapes contributed by a gate: constants contribute the unit shape,
/// which is absorbed by products.
pub(crate) fn gate_types<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<Vec<Option<BTreeSet<TreeType>>>> {
    circuit.index_sets()?;
    let reach = circuit.reachable();
    let mut unit = vec![false; circuit.size()];
    let mut types: Vec<Option<BTreeSet<TreeType>>> = vec![None; circuit.size()];
    for (id, g) in circuit.gates().iter().enumerate() {
        if !reach[id] {
            continue;
        }
        let set = match g {
            Gate::Input(v) => BTreeSet::from([TreeType::leaf(IndexSet::singleton(v.bucket))]),
            Gate::Const(_) => {
                unit[id] = true;
                continue;
            }
            Gate::Add(args) => {
                if args.iter().all(|&a| unit[a]) {
                    unit[id] = true;
                    continue;
                }
                let mut acc = BTreeSet::new();
                for &a in args {
                    acc.extend(types[a].iter().flatten().cloned());
                }
                acc
            }
            Gate::Mul([a, b]) => match (unit[*a], unit[*b]) {
                (true, true) => {
                    unit[id] = true;
                    continue;
                }
                (true, false) => types[*b].clone().unwrap_or_default(),
                (false, true) => types[*a].clone().unwrap_or_default(),
                (false, false) => {
                    let (ta, tb) = (types[*a].as_ref().unwrap(), types[*b].as_ref().unwrap());
                    if ta.len().saturating_mul(tb.len()) > limits.types {
                        return Err(Error::TypeCountCeiling {
                            ceiling: limits.types,
                        });
                    }
                    let mut acc = BTreeSet::new();
                    for x in ta {
                        for y in tb {
                            acc.insert(TreeType::join(x.clone(), y.clone()));
                        }
                    }
                    acc
                }
            },
        };
        if set.len() > limits.types {
            return Err(Error::TypeCountCeiling {
                ceiling: limits.types,
            });
        }
        types[id] = Some(set);
    }
    Ok(types)
}

/// All proof-tree types of the circuit, sorted.
///
/// A circuit of degree zero has no proof-tree types.
pub fn enumerate_tree_types<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<Vec<TreeType>> {
    let mut types = gate_types(circuit, limits)?;
    Ok(types[circuit.output()]
        .take()
        .map(|s| s.into_iter().collect())
        .unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::{Fp31, Var, VariablePartition};

    fn leaf(i: u32) -> TreeType {
        TreeType::leaf(IndexSet::singleton(i))
    }

    fn left_comb(d: u32) -> TreeType {
        (2..=d).fold(leaf(1), |acc, i| TreeType::join(acc, leaf(i)))
    }

    #[test]
    fn truncation_rules() {
        let balanced = TreeType::join(
            TreeType::join(leaf(1), leaf(2)),
            TreeType::join(leaf(3), leaf(4)),
        );
        let t = balanced.truncate(4).unwrap();
        assert_eq!(
            t.leaf_sets().iter().map(|s| s.len()).collect::<Vec<_>>(),
            vec![2, 2]
        );
        let t = left_comb(6).truncate(6).unwrap();
        assert_eq!(t.leaves(), 1);
        assert_eq!(t.leaf_sets()[0], [1, 2, 3].into_iter().collect());
        let t = left_comb(3).truncate(3).unwrap();
        assert_eq!(t.children().len(), 1);
        assert_eq!(t.leaf_sets(), vec![[1, 2].into_iter().collect()]);
        assert!(left_comb(2).truncate(2).unwrap().children().len() == 2);
    }

    #[test]
    fn two_associations_give_two_types() {
        let mut b = CircuitBuilder::<Fp31>::new();
        let x: Vec<_> = (1..=3).map(|i| b.input(Var::new(i, 1))).collect();
        let r = b.mul(x[1], x[2]);
        let right = b.mul(x[0], r);
        let l = b.mul(x[0], x[1]);
        let left = b.mul(l, x[2]);
        let s = b.add(vec![right, left]);
        let c = b.finish(VariablePartition::uniform(3, 1), s).unwrap();
        let types = enumerate_tree_types(&c, &Limits::default()).unwrap();
        assert_eq!(types.len(), 2);
        assert!(types.contains(&left_comb(3)));
        let json = serde_json::to_string(&left_comb(2)).unwrap();
        assert_eq!(
            json,
            r#"{"I":[1,2],"children":[{"I":[1],"children":[]},{"I":[2],"children":[]}]}"#
        );
    }
}
