use super::{Abp, Edge, Node};
use crate::algebra::field::Scalar;
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::error::{Error, Result};
use crate::Var;

impl<F: Scalar> Abp<F> {
    /// Program for the sum: sources and sinks are identified.
    pub fn compose_parallel(&self, other: &Abp<F>) -> Result<Abp<F>> {
        if self.partition != other.partition {
            return Err(Error::PartitionMismatch);
        }
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        if self.support() != other.support() {
            return Err(Error::SupportMismatch {
                left: self.support(),
                right: other.support(),
            });
        }
        let mut nodes = self.nodes.clone();
        let mut map = vec![usize::MAX; other.nodes.len()];
        map[other.source()] = self.source();
        map[other.sink()] = self.sink();
        for (v, n) in other.nodes.iter().enumerate() {
            if map[v] == usize::MAX {
                map[v] = nodes.len();
                nodes.push(*n);
            }
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            from: map[e.from],
            to: map[e.to],
            bucket: e.bucket,
            form: e.form.clone(),
        }));
        Abp::normalized(
            self.partition.clone(),
            nodes,
            edges,
            self.source(),
            self.sink(),
        )
    }

    /// Program for the product: `self`'s sink becomes `other`'s source.
    pub fn compose_series(&self, other: &Abp<F>) -> Result<Abp<F>> {
        if self.partition != other.partition {
            return Err(Error::PartitionMismatch);
        }
        if !self.support().is_disjoint(other.support()) {
            return Err(Error::SupportOverlap {
                left: self.support(),
                right: other.support(),
            });
        }
        let shift = self.degree();
        let base = self.support();
        let mut nodes = self.nodes.clone();
        let mut map = vec![usize::MAX; other.nodes.len()];
        map[other.source()] = self.sink();
        for (v, n) in other.nodes.iter().enumerate() {
            if v != other.source() {
                map[v] = nodes.len();
                nodes.push(Node {
                    layer: n.layer + shift,
                    index_set: n.index_set.union(base),
                });
            }
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            from: map[e.from],
            to: map[e.to],
            bucket: e.bucket,
            form: e.form.clone(),
        }));
        Abp::normalized(
            self.partition.clone(),
            nodes,
            edges,
            self.source(),
            map[other.sink()],
        )
    }

    /// Program for `c` times the polynomial; scales the edges leaving the source.
    pub fn scale(&self, c: &F) -> Result<Abp<F>> {
        if c.is_zero() {
            return Err(Error::ZeroProgram);
        }
        let mut out = self.clone();
        let s = self.source();
        for e in out.edges.iter_mut().filter(|e| e.from == s) {
            for v in e.form.values_mut() {
                *v = v.clone() * c.clone();
            }
        }
        Ok(out)
    }

    /// Equivalent circuit with one gate per node: a node is the sum over its
    /// incoming edges of the tail's gate times the edge's linear form.
    pub fn to_circuit(&self) -> Result<Circuit<F>> {
        let mut b = CircuitBuilder::hash_consing();
        let mut gate: Vec<Option<GateId>> = vec![None; self.nodes.len()];
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (k, e) in self.edges.iter().enumerate() {
            incoming[e.to].push(k);
        }
        for v in self.topological().collect::<Vec<_>>() {
            if v == self.source() {
                continue;
            }
            let mut terms = Vec::with_capacity(incoming[v].len());
            for &k in &incoming[v] {
                let e = &self.edges[k];
                let parts: Vec<GateId> = e
                    .form
                    .iter()
                    .map(|(&j, c)| {
                        let x = b.input(Var::new(e.bucket, j));
                        if c.is_one() {
                            x
                        } else {
                            let k = b.constant(c.clone());
                            b.mul(k, x)
                        }
                    })
                    .collect();
                let form = b.sum(parts);
                terms.push(match gate[e.from] {
                    None => form,
                    Some(g) => b.mul(g, form),
                });
            }
            gate[v] = Some(b.sum(terms));
        }
        b.finish(
            self.partition.clone(),
            gate[self.sink()].expect("sink has a gate"),
        )
    }
}
