//! Coefficient matrices of branching programs and polynomials under
//! prefix/suffix splits, and the rank report built from them.
//!
//! For a program, layer `k` gives `L_k` (prefix coefficients, one column
//! per node) and `R_k` (suffix coefficients, one row per node). Their
//! ranks are witnesses: the sum over `k` of `min(rank L_k, rank R_k)` never
//! exceeds the node count. For a polynomial and a bucket order, the split
//! at `k` is unique and the matrix `M_k` is fully determined.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::abp::Abp;
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::matrix::{DenseMatrix, MAX_MATRIX_ENTRIES};
use crate::algebra::poly::{Monomial, Polynomial, VariablePartition};
use crate::circuit::check_permutation;
use crate::error::{Error, Result};
use crate::Limits;

/// `L_k` and `R_k` of a program with their row and column monomials.
#[derive(Clone, Debug)]
pub struct LayerMatrices<F> {
    pub k: usize,
    pub left: DenseMatrix<F>,
    pub right: DenseMatrix<F>,
    /// Rows of `left`, grouped by layer index set.
    pub prefixes: Vec<Monomial>,
    /// Columns of `right`.
    pub suffixes: Vec<Monomial>,
}

/// All monomials over each set in turn, refusing enumerations that could
/// not fit in a matrix.
fn monomials_over(partition: &VariablePartition, sets: &[IndexSet]) -> Result<Vec<Monomial>> {
    let total: u128 = sets.iter().map(|&s| partition.monomial_count(s)).sum();
    if total > MAX_MATRIX_ENTRIES as u128 {
        let rows = usize::try_from(total).unwrap_or(usize::MAX);
        return Err(Error::MatrixTooLarge {
            rows,
            cols: 1,
            ceiling: MAX_MATRIX_ENTRIES,
        });
    }
    Ok(sets.iter().flat_map(|&s| partition.monomials(s)).collect())
}

fn labels(ms: &[Monomial]) -> Vec<String> {
    ms.iter().map(Monomial::to_string).collect()
}

pub fn abp_layer_matrices<F: Scalar>(
    abp: &Abp<F>,
    k: usize,
    limits: &Limits,
) -> Result<LayerMatrices<F>> {
    let prefix = abp.prefix_polys(limits)?;
    let suffix = abp.suffix_polys(limits)?;
    layer_matrices(abp, k, &prefix, &suffix)
}

fn layer_matrices<F: Scalar>(
    abp: &Abp<F>,
    k: usize,
    prefix: &[Polynomial<F>],
    suffix: &[Polynomial<F>],
) -> Result<LayerMatrices<F>> {
    let types = abp.layer_types(k)?;
    let support = abp.support();
    let rest: Vec<IndexSet> = types.iter().map(|&t| support.difference(t)).collect();
    let prefixes = monomials_over(abp.partition(), &types)?;
    let suffixes = monomials_over(abp.partition(), &rest)?;
    let nodes = &abp.layers()[k];
    let mut left = DenseMatrix::zeros(prefixes.len(), nodes.len())?;
    let mut right = DenseMatrix::zeros(nodes.len(), suffixes.len())?;
    for (c, &v) in nodes.iter().enumerate() {
        for (r, m) in prefixes.iter().enumerate() {
            left.set(r, c, prefix[v].coeff(m));
        }
        for (r, m) in suffixes.iter().enumerate() {
            right.set(c, r, suffix[v].coeff(m));
        }
    }
    let node_labels: Vec<String> = nodes.iter().map(|v| format!("v{v}")).collect();
    let left = left.with_labels(labels(&prefixes), node_labels.clone())?;
    let right = right.with_labels(node_labels, labels(&suffixes))?;
    Ok(LayerMatrices {
        k,
        left,
        right,
        prefixes,
        suffixes,
    })
}

/// Checks that every coefficient of the program's polynomial is the sum,
/// over the index sets `I` on layer `k`, of `(L_k R_k)[m|I, m|rest]`.
///
/// Every monomial over the support is checked, including those with
/// coefficient zero. Returns the first failing `(k, monomial)`.
pub fn check_layer_factorization<F: Scalar>(
    abp: &Abp<F>,
    limits: &Limits,
) -> Result<Option<(usize, Monomial)>> {
    let prefix = abp.prefix_polys(limits)?;
    let suffix = abp.suffix_polys(limits)?;
    let f = &prefix[abp.sink()];
    let support = abp.support();
    let all = monomials_over(abp.partition(), &[support])?;
    for k in 0..=abp.degree() {
        let lm = layer_matrices(abp, k, &prefix, &suffix)?;
        let row_of: BTreeMap<&Monomial, usize> = lm
            .prefixes
            .iter()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let col_of: BTreeMap<&Monomial, usize> = lm
            .suffixes
            .iter()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let types = abp.layer_types(k)?;
        for m in &all {
            let mut acc = F::zero();
            for &t in &types {
                let (m1, m2) = (m.restrict(t), m.restrict(support.difference(t)));
                let (r, c) = (row_of[&m1], col_of[&m2]);
                for j in 0..lm.left.cols() {
                    acc = acc + lm.left.get(r, j).clone() * lm.right.get(j, c).clone();
                }
            }
            if acc != f.coeff(m) {
                return Ok(Some((k, m.clone())));
            }
        }
    }
    Ok(None)
}

/// The matrix `M_k` with rows indexed by monomials over the first `k`
/// buckets of `order` and columns by monomials over the rest; the entry at
/// `(m1, m2)` is the coefficient of `m1·m2`.
pub fn fixed_order_matrix<F: Scalar>(
    f: &Polynomial<F>,
    partition: &VariablePartition,
    order: &[u32],
    k: usize,
) -> Result<DenseMatrix<F>> {
    check_order(f.index_set(), order)?;
    if k > order.len() {
        return Err(Error::LayerOutOfRange {
            layer: k,
            max: order.len(),
        });
    }
    let first: IndexSet = order[..k].iter().copied().collect();
    let rest = f.index_set().difference(first);
    let rows = monomials_over(partition, &[first])?;
    let cols = monomials_over(partition, &[rest])?;
    let mut m = DenseMatrix::zeros(rows.len(), cols.len())?;
    let row_of: BTreeMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let col_of: BTreeMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    for (mono, c) in f.terms() {
        let (a, b) = (mono.restrict(first), mono.restrict(rest));
        m.set(row_of[&a], col_of[&b], c.clone());
    }
    m.with_labels(labels(&rows), labels(&cols))
}

/// `order` must list the buckets of `set` exactly once.
fn check_order(set: IndexSet, order: &[u32]) -> Result<()> {
    let listed: IndexSet = order.iter().copied().collect();
    if listed != set || order.len() != set.len() {
        return Err(Error::InvalidPermutation(set.len()));
    }
    if set == IndexSet::full(set.len() as u32) {
        check_permutation(order)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixRank {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

impl MatrixRank {
    fn of<F: Scalar>(m: &DenseMatrix<F>) -> Self {
        MatrixRank {
            rows: m.rows(),
            cols: m.cols(),
            rank: m.rank(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerRank {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<MatrixRank>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<MatrixRank>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed: Option<MatrixRank>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMode {
    AbpWitness,
    FixedOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub mode: RankMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<u32>>,
    pub layers: Vec<LayerRank>,
    /// Witness mode: `Σ_k min(rank L_k, rank R_k)`. Fixed-order mode:
    /// `Σ_k rank M_k`, a lower bound on any program reading that order.
    pub total: usize,
}

/// Ranks of `L_k` and `R_k` for every layer of the program.
pub fn witness_rank_report<F: Scalar>(abp: &Abp<F>, limits: &Limits) -> Result<RankReport> {
    let prefix = abp.prefix_polys(limits)?;
    let suffix = abp.suffix_polys(limits)?;
    let mut layers = Vec::new();
    let mut total = 0;
    for k in 0..=abp.degree() {
        let lm = layer_matrices(abp, k, &prefix, &suffix)?;
        let (l, r) = (MatrixRank::of(&lm.left), MatrixRank::of(&lm.right));
        total += l.rank.min(r.rank);
        layers.push(LayerRank {
            k,
            left: Some(l),
            right: Some(r),
            fixed: None,
        });
    }
    assert!(
        total <= abp.size(),
        "rank total {total} exceeds {} nodes",
        abp.size()
    );
    Ok(RankReport {
        mode: RankMode::AbpWitness,
        node_count: Some(abp.size()),
        order: None,
        layers,
        total,
    })
}

/// Ranks of `M_k` for every prefix length of `order`.
pub fn fixed_order_rank_report<F: Scalar>(
    f: &Polynomial<F>,
    partition: &VariablePartition,
    order: &[u32],
) -> Result<RankReport> {
    let mut layers = Vec::new();
    let mut total = 0;
    for k in 0..=order.len() {
        let m = MatrixRank::of(&fixed_order_matrix(f, partition, order, k)?);
        total += m.rank;
        layers.push(LayerRank {
            k,
            left: None,
            right: None,
            fixed: Some(m),
        });
    }
    Ok(RankReport {
        mode: RankMode::FixedOrder,
        node_count: None,
        order: Some(order.to_vec()),
        layers,
        total,
    })
}
