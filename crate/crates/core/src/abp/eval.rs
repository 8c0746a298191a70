use std::collections::BTreeMap;

use super::Abp;
use crate::algebra::field::Scalar;
use crate::algebra::poly::{Polynomial, Var};
use crate::error::{Error, Result};
use crate::Limits;

impl<F: Scalar> Abp<F> {
    /// Polynomial computed between the source and every node.
    pub fn prefix_polys(&self, limits: &Limits) -> Result<Vec<Polynomial<F>>> {
        let mut polys: Vec<Polynomial<F>> = self
            .nodes
            .iter()
            .map(|n| Polynomial::zero(n.index_set))
            .collect();
        polys[self.source()] = Polynomial::constant(F::one());
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (k, e) in self.edges.iter().enumerate() {
            incoming[e.to].push(k);
        }
        for v in self.topological().collect::<Vec<_>>() {
            for &k in &incoming[v] {
                let e = &self.edges[k];
                let term = polys[e.from].mul_limited(&e.form_poly(), limits)?;
                polys[v].add_assign(&term)?;
            }
            if polys[v].len() > limits.terms {
                return Err(Error::TermBlowup {
                    terms: polys[v].len(),
                    ceiling: limits.terms,
                });
            }
        }
        Ok(polys)
    }

    /// Polynomial computed between every node and the sink.
    pub fn suffix_polys(&self, limits: &Limits) -> Result<Vec<Polynomial<F>>> {
        let support = self.support();
        let mut polys: Vec<Polynomial<F>> = self
            .nodes
            .iter()
            .map(|n| Polynomial::zero(support.difference(n.index_set)))
            .collect();
        polys[self.sink()] = Polynomial::constant(F::one());
        let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (k, e) in self.edges.iter().enumerate() {
            outgoing[e.from].push(k);
        }
        let order: Vec<_> = self.topological().collect();
        for &v in order.iter().rev() {
            for &k in &outgoing[v] {
                let e = &self.edges[k];
                let term = e.form_poly().mul_limited(&polys[e.to], limits)?;
                polys[v].add_assign(&term)?;
            }
            if polys[v].len() > limits.terms {
                return Err(Error::TermBlowup {
                    terms: polys[v].len(),
                    ceiling: limits.terms,
                });
            }
        }
        Ok(polys)
    }

    /// Polynomial computed by the program: the sum over source-to-sink paths
    /// of the product of edge labels.
    pub fn expand(&self, limits: &Limits) -> Result<Polynomial<F>> {
        let mut polys = self.prefix_polys(limits)?;
        Ok(polys.swap_remove(self.sink()))
    }

    pub fn evaluate(&self, assignment: &BTreeMap<Var, F>) -> Result<F> {
        let mut vals = vec![F::zero(); self.nodes.len()];
        vals[self.source()] = F::one();
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (k, e) in self.edges.iter().enumerate() {
            incoming[e.to].push(k);
        }
        for v in self.topological().collect::<Vec<_>>() {
            for &k in &incoming[v] {
                let e = &self.edges[k];
                let t = vals[e.from].clone() * e.form_value(assignment)?;
                vals[v] = vals[v].clone() + t;
            }
        }
        Ok(vals[self.sink()].clone())
    }
}
