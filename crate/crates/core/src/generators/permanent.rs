use std::collections::BTreeMap;

use crate::abp::{Abp, Edge, Node};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::{Var, VariablePartition};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};

/// Largest `n` for which the permanent and determinant are generated.
pub const MAX_MATRIX_DIM: u32 = 6;

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Number of inversions modulo two.
pub fn is_odd(p: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

fn check_dim(n: u32) -> Result<()> {
    if n == 0 || n > MAX_MATRIX_DIM {
        return Err(Error::ScaleExceeded(format!(
            "matrix dimension {n} is outside 1..={MAX_MATRIX_DIM}"
        )));
    }
    Ok(())
}

fn matrix_form<F: Scalar>(n: u32, signed: bool) -> Result<Circuit<F>> {
    check_dim(n)?;
    let mut b = CircuitBuilder::hash_consing();
    let minus = signed.then(|| b.constant(-F::one()));
    let mut terms = Vec::new();
    for p in permutations(n as usize) {
        let vars: Vec<_> = p
            .iter()
            .enumerate()
            .map(|(i, &j)| b.input(Var::new(i as u32 + 1, j as u32 + 1)))
            .collect();
        let comb = b.product(&vars);
        terms.push(match minus {
            Some(m) if is_odd(&p) => b.mul(m, comb),
            _ => comb,
        });
    }
    let out = b.sum(terms);
    b.finish(VariablePartition::uniform(n, n), out)
}

/// The `n×n` permanent over row buckets `X_i = {x_{i,1}..x_{i,n}}`, as a
/// sum of left-associated products.
pub fn permanent<F: Scalar>(n: u32) -> Result<Circuit<F>> {
    matrix_form(n, false)
}

/// The `n×n` determinant; odd permutations are scaled by `-1`.
pub fn determinant<F: Scalar>(n: u32) -> Result<Circuit<F>> {
    matrix_form(n, true)
}

/// Row-order read-once program for the permanent or determinant.
///
/// Nodes are the column subsets `S`, on layer `|S|`; the edge from `S` to
/// `S ∪ {j}` reads `x_{|S|+1, j}`. For the determinant it carries the sign
/// `(-1)^{#{s ∈ S : s > j}}`.
pub fn matrix_roabp<F: Scalar>(n: u32, signed: bool) -> Result<Abp<F>> {
    check_dim(n)?;
    let n = n as usize;
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    let mut id = vec![0usize; 1 << n];
    let mut nodes = Vec::with_capacity(masks.len());
    for (k, &m) in masks.iter().enumerate() {
        id[m as usize] = k;
        let layer = m.count_ones() as usize;
        nodes.push(Node {
            layer,
            index_set: IndexSet::full(layer as u32),
        });
    }
    let mut edges = Vec::new();
    for &m in &masks {
        let row = m.count_ones() + 1;
        for j in (0..n).filter(|&j| m & (1 << j) == 0) {
            let (from, to) = (id[m as usize], id[(m | 1 << j) as usize]);
            let sign = if signed && (m >> (j + 1)).count_ones() % 2 == 1 {
                -F::one()
            } else {
                F::one()
            };
            edges.push(Edge::new(
                from,
                to,
                row,
                BTreeMap::from([(j as u32 + 1, sign)]),
            ));
        }
    }
    Abp::new(VariablePartition::uniform(n as u32, n as u32), nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Fp31, Limits};

    #[test]
    fn permutation_order_and_parity() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![0, 2, 1]);
        assert_eq!(p.iter().filter(|q| is_odd(q)).count(), 3);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn small_cases() {
        let lim = Limits::default();
        let per2 = permanent::<Fp31>(2).unwrap().expand(&lim).unwrap();
        assert_eq!(per2.len(), 2);
        let det3 = determinant::<Fp31>(3).unwrap();
        let ones: BTreeMap<_, _> = (1..=3)
            .flat_map(|i| (1..=3).map(move |j| (Var::new(i, j), Fp31::new(1))))
            .collect();
        assert_eq!(det3.evaluate(&ones).unwrap(), Fp31::new(0));
        assert_eq!(permanent::<Fp31>(1).unwrap().size(), 1);
        assert!(matches!(permanent::<Fp31>(7), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn roabps_match_circuits() {
        let lim = Limits::default();
        for n in 1..=4 {
            for signed in [false, true] {
                let a = matrix_roabp::<Fp31>(n, signed).unwrap();
                assert_eq!(a.size(), 1 << n);
                let c = if signed { determinant(n) } else { permanent(n) }.unwrap();
                assert_eq!(a.expand(&lim).unwrap(), c.expand(&lim).unwrap());
                assert_eq!(a.detect_roabp(), Some((1..=n).collect()));
            }
        }
    }
}
