//! Layered set-multilinear algebraic branching programs.
//!
//! Every edge goes from layer `i` to layer `i + 1` and carries a homogeneous
//! linear form over one bucket `b`; the head's index set is the tail's plus
//! `b`. The source has the empty index set and the sink has the support of
//! the program.

mod compose;
mod eval;
pub mod json;
pub mod random;
mod substitute;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::{Monomial, Polynomial, Var, VariablePartition};
use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Node {
    pub layer: usize,
    pub index_set: IndexSet,
}

/// An edge labelled by `Σ_j form[j] · x_{bucket,j}`; `form` holds no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<F> {
    pub from: NodeId,
    pub to: NodeId,
    pub bucket: u32,
    pub form: BTreeMap<u32, F>,
}

impl<F: Scalar> Edge<F> {
    pub fn new(from: NodeId, to: NodeId, bucket: u32, form: BTreeMap<u32, F>) -> Self {
        let form = form.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Edge {
            from,
            to,
            bucket,
            form,
        }
    }

    /// A single variable with coefficient one.
    pub fn var(from: NodeId, to: NodeId, v: Var) -> Self {
        Edge {
            from,
            to,
            bucket: v.bucket,
            form: BTreeMap::from([(v.col, F::one())]),
        }
    }

    pub fn form_poly(&self) -> Polynomial<F> {
        let terms = self
            .form
            .iter()
            .map(|(&j, c)| (Monomial::var(Var::new(self.bucket, j)), c.clone()));
        Polynomial::from_terms(IndexSet::singleton(self.bucket), terms).expect("single bucket")
    }

    pub fn form_value(&self, assignment: &BTreeMap<Var, F>) -> Result<F> {
        let mut acc = F::zero();
        for (&j, c) in &self.form {
            let v = Var::new(self.bucket, j);
            let x = assignment.get(&v).ok_or(Error::MissingAssignment(v))?;
            acc = acc + c.clone() * x.clone();
        }
        Ok(acc)
    }
}

/// A validated branching program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp<F> {
    partition: VariablePartition,
    nodes: Vec<Node>,
    edges: Vec<Edge<F>>,
    layers: Vec<Vec<NodeId>>,
}

impl<F: Scalar> Abp<F> {
    /// Builds and validates a branching program.
    pub fn new(
        partition: VariablePartition,
        nodes: Vec<Node>,
        edges: Vec<Edge<F>>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::MultiSourceOrSink("no nodes".into()));
        }
        let depth = nodes.iter().map(|n| n.layer).max().unwrap();
        if depth == 0 {
            return Err(Error::DegreeZero);
        }
        let mut layers = vec![Vec::new(); depth + 1];
        for (id, n) in nodes.iter().enumerate() {
            layers[n.layer].push(id);
        }
        if layers[0].len() != 1 {
            return Err(Error::MultiSourceOrSink(format!(
                "{} nodes on layer 0",
                layers[0].len()
            )));
        }
        if layers[depth].len() != 1 {
            return Err(Error::MultiSourceOrSink(format!(
                "{} nodes on the last layer",
                layers[depth].len()
            )));
        }
        if !nodes[layers[0][0]].index_set.is_empty() {
            return Err(Error::MultiSourceOrSink(
                "source has a nonempty index set".into(),
            ));
        }
        let d = partition.degree();
        let mut indeg = vec![0usize; nodes.len()];
        let mut outdeg = vec![0usize; nodes.len()];
        for (k, e) in edges.iter().enumerate() {
            let (Some(from), Some(to)) = (nodes.get(e.from), nodes.get(e.to)) else {
                return Err(Error::Schema(format!("edge {k} refers to a missing node")));
            };
            if to.layer != from.layer + 1 {
                return Err(Error::LayerSkip {
                    edge: k,
                    from: from.layer,
                    to: to.layer,
                });
            }
            let size = partition.bucket_size(e.bucket);
            let bucket_ok = e.bucket >= 1 && e.bucket <= d && !from.index_set.contains(e.bucket);
            let cols_ok = e.form.keys().all(|&j| j >= 1 && Some(j) <= size);
            let step = to.index_set.difference(from.index_set);
            if !from.index_set.is_subset(to.index_set) || step.len() != 1 {
                return Err(Error::IndexSetStep { edge: k });
            }
            if !bucket_ok || !cols_ok || step.min() != Some(e.bucket) {
                return Err(Error::WrongBucketForm { edge: k });
            }
            indeg[e.to] += 1;
            outdeg[e.from] += 1;
        }
        if let Some(k) = layers.iter().position(Vec::is_empty) {
            return Err(Error::MultiSourceOrSink(format!("layer {k} is empty")));
        }
        for (id, n) in nodes.iter().enumerate() {
            if n.layer > 0 && indeg[id] == 0 {
                return Err(Error::MultiSourceOrSink(format!(
                    "node {id} has no incoming edge"
                )));
            }
            if n.layer < depth && outdeg[id] == 0 {
                return Err(Error::MultiSourceOrSink(format!(
                    "node {id} has no outgoing edge"
                )));
            }
        }
        Ok(Abp {
            partition,
            nodes,
            edges,
            layers,
        })
    }

    pub fn partition(&self) -> &VariablePartition {
        &self.partition
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<F>] {
        &self.edges
    }

    pub fn layers(&self) -> &[Vec<NodeId>] {
        &self.layers
    }

    pub fn source(&self) -> NodeId {
        self.layers[0][0]
    }

    pub fn sink(&self) -> NodeId {
        self.layers[self.degree()][0]
    }

    /// Number of layers minus one.
    pub fn degree(&self) -> usize {
        self.layers.len() - 1
    }

    /// Index set of the sink.
    pub fn support(&self) -> IndexSet {
        self.nodes[self.sink()].index_set
    }

    /// Node count.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in layer order, a topological order.
    pub fn topological(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.layers.iter().flatten().copied()
    }

    /// Distinct index sets on layer `k`, sorted.
    pub fn layer_types(&self, k: usize) -> Result<Vec<IndexSet>> {
        let layer = self.layers.get(k).ok_or(Error::LayerOutOfRange {
            layer: k,
            max: self.degree(),
        })?;
        let mut types: Vec<IndexSet> = layer.iter().map(|&v| self.nodes[v].index_set).collect();
        types.sort();
        types.dedup();
        Ok(types)
    }

    /// Number of distinct index sets on every layer.
    pub fn type_width_profile(&self) -> Vec<usize> {
        (0..=self.degree())
            .map(|k| self.layer_types(k).unwrap().len())
            .collect()
    }

    pub fn type_width(&self, k: usize) -> Result<usize> {
        Ok(self.layer_types(k)?.len())
    }

    /// Whether the type width at layer `degree - w` is at most `threshold`.
    pub fn is_w_narrow(&self, w: usize, threshold: usize) -> Result<bool> {
        let d = self.degree();
        let k = d
            .checked_sub(w)
            .ok_or(Error::LayerOutOfRange { layer: w, max: d })?;
        Ok(self.type_width(k)? <= threshold)
    }

    /// The bucket order read by the program when every layer carries a
    /// single index set.
    pub fn detect_roabp(&self) -> Option<Vec<u32>> {
        let mut order = Vec::with_capacity(self.degree());
        let mut prev = IndexSet::EMPTY;
        for k in 1..=self.degree() {
            let types = self.layer_types(k).unwrap();
            if types.len() != 1 {
                return None;
            }
            order.push(types[0].difference(prev).min().unwrap());
            prev = types[0];
        }
        Some(order)
    }

    /// Two-node program computing one linear form.
    pub fn linear_form(
        partition: VariablePartition,
        bucket: u32,
        form: BTreeMap<u32, F>,
    ) -> Result<Self> {
        let nodes = vec![
            Node {
                layer: 0,
                index_set: IndexSet::EMPTY,
            },
            Node {
                layer: 1,
                index_set: IndexSet::singleton(bucket),
            },
        ];
        let edge = Edge::new(0, 1, bucket, form);
        if edge.form.is_empty() {
            return Err(Error::ZeroProgram);
        }
        Abp::new(partition, nodes, vec![edge])
    }

    /// Renumbers nodes by (layer, old id) and drops nodes not on a
    /// source-to-sink path. Fails if no such path exists.
    pub(crate) fn normalized(
        partition: VariablePartition,
        nodes: Vec<Node>,
        edges: Vec<Edge<F>>,
        source: NodeId,
        sink: NodeId,
    ) -> Result<Self> {
        let n = nodes.len();
        let mut order: Vec<NodeId> = (0..n).collect();
        order.sort_by_key(|&v| (nodes[v].layer, v));
        let mut fwd = vec![false; n];
        fwd[source] = true;
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            out_edges[e.from].push(k);
        }
        for &v in &order {
            if fwd[v] {
                for &k in &out_edges[v] {
                    fwd[edges[k].to] = true;
                }
            }
        }
        let mut bwd = vec![false; n];
        bwd[sink] = true;
        for &v in order.iter().rev() {
            if out_edges[v].iter().any(|&k| bwd[edges[k].to]) {
                bwd[v] = true;
            }
        }
        if !fwd[sink] {
            return Err(Error::ZeroProgram);
        }
        let mut map = vec![usize::MAX; n];
        let mut new_nodes = Vec::new();
        for &v in &order {
            if fwd[v] && bwd[v] {
                map[v] = new_nodes.len();
                new_nodes.push(nodes[v]);
            }
        }
        // merge parallel edges with equal endpoints and bucket
        let mut merged: BTreeMap<(NodeId, NodeId, u32), BTreeMap<u32, F>> = BTreeMap::new();
        for e in edges {
            if map[e.from] == usize::MAX || map[e.to] == usize::MAX {
                continue;
            }
            let form = merged
                .entry((map[e.from], map[e.to], e.bucket))
                .or_default();
            for (j, c) in e.form {
                let s = form.remove(&j).map_or(c.clone(), |old| old + c);
                if !s.is_zero() {
                    form.insert(j, s);
                }
            }
        }
        let new_edges: Vec<Edge<F>> = merged
            .into_iter()
            .filter(|(_, form)| !form.is_empty())
            .map(|((from, to, bucket), form)| Edge {
                from,
                to,
                bucket,
                form,
            })
            .collect();
        // cancellation may have disconnected nodes; prune again if so
        let mut indeg = vec![0; new_nodes.len()];
        let mut outdeg = vec![0; new_nodes.len()];
        for e in &new_edges {
            indeg[e.to] += 1;
            outdeg[e.from] += 1;
        }
        let last = new_nodes.iter().map(|n| n.layer).max().unwrap_or(0);
        let dangling = new_nodes
            .iter()
            .enumerate()
            .any(|(v, n)| (n.layer > 0 && indeg[v] == 0) || (n.layer < last && outdeg[v] == 0));
        if dangling {
            let source = map[source];
            let sink = map[sink];
            return Self::normalized(partition, new_nodes, new_edges, source, sink);
        }
        Abp::new(partition, new_nodes, new_edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Fp31;

    fn node(layer: usize, set: &[u32]) -> Node {
        Node {
            layer,
            index_set: set.iter().copied().collect(),
        }
    }

    #[test]
    fn validation_errors() {
        let p = VariablePartition::uniform(3, 2);
        let skip = Abp::<Fp31>::new(
            p.clone(),
            vec![node(0, &[]), node(1, &[1]), node(3, &[1, 2, 3])],
            vec![
                Edge::var(0, 1, Var::new(1, 1)),
                Edge::var(1, 2, Var::new(2, 1)),
            ],
        );
        assert!(matches!(skip, Err(Error::LayerSkip { .. })));
        let wrong = Abp::<Fp31>::new(
            p.clone(),
            vec![node(0, &[]), node(1, &[1]), node(2, &[1, 2])],
            vec![
                Edge::var(0, 1, Var::new(1, 1)),
                Edge::var(1, 2, Var::new(3, 1)),
            ],
        );
        assert_eq!(wrong, Err(Error::WrongBucketForm { edge: 1 }));
        let two_sources = Abp::<Fp31>::new(
            p,
            vec![node(0, &[]), node(0, &[]), node(1, &[1])],
            vec![
                Edge::var(0, 2, Var::new(1, 1)),
                Edge::var(1, 2, Var::new(1, 2)),
            ],
        );
        assert!(matches!(two_sources, Err(Error::MultiSourceOrSink(_))));
    }
}
