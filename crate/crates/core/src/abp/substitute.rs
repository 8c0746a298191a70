use std::collections::BTreeMap;

use super::{Abp, Edge, Node, NodeId};
use crate::algebra::field::Scalar;
use crate::algebra::poly::{classify_substitution, Var};
use crate::error::{Error, Result};

impl<F: Scalar> Abp<F> {
    /// Substitutes field values for variables.
    ///
    /// Edges over fully assigned buckets become scalars and are contracted
    /// into the next variable edge, so the result is again layered over the
    /// surviving buckets. A partially assigned bucket may only receive zeros.
    pub fn substitute(&self, assignment: &BTreeMap<Var, F>) -> Result<Abp<F>> {
        let removed = classify_substitution(&self.partition, assignment)?;
        if assignment.is_empty() {
            return Ok(self.clone());
        }
        let support = self.support().difference(removed);
        if support.is_empty() {
            return Err(Error::DegreeZero);
        }
        let n = self.nodes.len();
        // scalar edges (over removed buckets) and variable edges
        let mut scalar_out: Vec<Vec<(NodeId, F)>> = vec![Vec::new(); n];
        let mut var_out: Vec<Vec<Edge<F>>> = vec![Vec::new(); n];
        for e in &self.edges {
            if removed.contains(e.bucket) {
                let c = e.form_value(assignment)?;
                if !c.is_zero() {
                    scalar_out[e.from].push((e.to, c));
                }
            } else {
                let form: BTreeMap<u32, F> = e
                    .form
                    .iter()
                    .filter(|(&j, _)| !assignment.contains_key(&Var::new(e.bucket, j)))
                    .map(|(&j, c)| (j, c.clone()))
                    .collect();
                if !form.is_empty() {
                    var_out[e.from].push(Edge {
                        from: e.from,
                        to: e.to,
                        bucket: e.bucket,
                        form,
                    });
                }
            }
        }
        let order: Vec<NodeId> = self.topological().collect();
        let rank: Vec<usize> = {
            let mut r = vec![0; n];
            for (k, &v) in order.iter().enumerate() {
                r[v] = k;
            }
            r
        };
        let live = |v: NodeId| self.nodes[v].index_set.difference(removed);
        let is_final = |v: NodeId| live(v) == support;

        let mut kept = vec![self.source()];
        let mut seen = vec![false; n];
        seen[self.source()] = true;
        for &v in &order {
            for e in &var_out[v] {
                if !seen[e.to] {
                    seen[e.to] = true;
                    kept.push(e.to);
                }
            }
        }
        kept.sort_by_key(|&v| rank[v]);

        // closure weights along scalar edges from each kept node
        let closure = |x: NodeId| -> BTreeMap<NodeId, F> {
            let mut w: BTreeMap<usize, (NodeId, F)> = BTreeMap::new();
            w.insert(rank[x], (x, F::one()));
            let mut out = BTreeMap::new();
            while let Some((_, (u, wu))) = w.pop_first() {
                for (t, c) in &scalar_out[u] {
                    let entry = w.entry(rank[*t]).or_insert((*t, F::zero()));
                    entry.1 = entry.1.clone() + wu.clone() * c.clone();
                }
                if !wu.is_zero() {
                    out.insert(u, wu);
                }
            }
            out
        };

        let new_sink = n;
        let mut nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|nd| {
                let set = nd.index_set.difference(removed);
                Node {
                    layer: set.len(),
                    index_set: set,
                }
            })
            .collect();
        nodes.push(Node {
            layer: support.len(),
            index_set: support,
        });

        let mut sink_weight: BTreeMap<NodeId, F> = BTreeMap::new();
        let mut closures = Vec::with_capacity(kept.len());
        for &x in &kept {
            let w = closure(x);
            if is_final(x) {
                if let Some(c) = w.get(&self.sink()) {
                    sink_weight.insert(x, c.clone());
                }
            }
            closures.push((x, w));
        }
        let mut edges = Vec::new();
        for (x, w) in &closures {
            if is_final(*x) {
                continue;
            }
            for (u, wu) in w {
                for e in &var_out[*u] {
                    let (to, scale) = if is_final(e.to) {
                        match sink_weight.get(&e.to) {
                            Some(c) => (new_sink, wu.clone() * c.clone()),
                            None => continue,
                        }
                    } else {
                        (e.to, wu.clone())
                    };
                    let form = e
                        .form
                        .iter()
                        .map(|(&j, c)| (j, c.clone() * scale.clone()))
                        .collect();
                    edges.push(Edge::new(*x, to, e.bucket, form));
                }
            }
        }
        Abp::normalized(
            self.partition.clone(),
            nodes,
            edges,
            self.source(),
            new_sink,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Fp31, Limits, VariablePartition};

    fn chain() -> Abp<Fp31> {
        let p = VariablePartition::uniform(3, 2);
        let mk = |b: u32| {
            Abp::linear_form(
                p.clone(),
                b,
                BTreeMap::from([(1, Fp31::new(1)), (2, Fp31::new(b as u64))]),
            )
            .unwrap()
        };
        mk(1)
            .compose_series(&mk(2))
            .unwrap()
            .compose_series(&mk(3))
            .unwrap()
    }

    #[test]
    fn contraction_commutes_with_expansion() {
        let a = chain();
        let lim = Limits::default();
        for bucket in 1..=3 {
            let asg = BTreeMap::from([
                (Var::new(bucket, 1), Fp31::new(5)),
                (Var::new(bucket, 2), Fp31::new(7)),
            ]);
            let s = a.substitute(&asg).unwrap();
            assert_eq!(s.degree(), 2);
            let expect = a
                .expand(&lim)
                .unwrap()
                .substitute(a.partition(), &asg)
                .unwrap();
            assert_eq!(s.expand(&lim).unwrap(), expect);
        }
        assert_eq!(a.substitute(&BTreeMap::new()).unwrap(), a);
    }

    #[test]
    fn zeroing_a_column_keeps_layers() {
        let a = chain();
        let asg = BTreeMap::from([(Var::new(2, 1), Fp31::new(0))]);
        let s = a.substitute(&asg).unwrap();
        assert_eq!(s.degree(), 3);
        assert_eq!(s.expand(&Limits::default()).unwrap().len(), 4);
    }
}
