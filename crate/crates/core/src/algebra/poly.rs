//! Sparse set-multilinear polynomials.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::Scalar;
use super::index_set::{IndexSet, MAX_BUCKETS};
use crate::error::{Error, Result};
use crate::Limits;

/// The variable `x_{bucket,col}`; both coordinates are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Var {
    pub bucket: u32,
    pub col: u32,
}

impl Var {
    pub fn new(bucket: u32, col: u32) -> Self {
        Var { bucket, col }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}_{}", self.bucket, self.col)
    }
}

/// Bucket sizes `n_1..n_d` of the variable partition `X = X_1 ⊔ ... ⊔ X_d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VariablePartition {
    sizes: Vec<u32>,
}

impl VariablePartition {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.len() > MAX_BUCKETS as usize {
            return Err(Error::Schema(format!(
                "at most {MAX_BUCKETS} buckets are supported, got {}",
                sizes.len()
            )));
        }
        if let Some(pos) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::Schema(format!("bucket {} has size 0", pos + 1)));
        }
        Ok(VariablePartition { sizes })
    }

    /// `d` buckets of size `n` each.
    pub fn uniform(d: u32, n: u32) -> Self {
        Self::new(vec![n; d as usize]).expect("uniform partition is valid")
    }

    pub fn degree(&self) -> u32 {
        self.sizes.len() as u32
    }

    pub fn bucket_sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn bucket_size(&self, bucket: u32) -> Option<u32> {
        bucket
            .checked_sub(1)
            .and_then(|b| self.sizes.get(b as usize))
            .copied()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.bucket_size(v.bucket)
            .is_some_and(|n| (1..=n).contains(&v.col))
    }

    pub fn all_buckets(&self) -> IndexSet {
        IndexSet::full(self.degree())
    }

    pub fn check_var(&self, v: Var) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVariable(v))
        }
    }

    /// Number of monomials in `M_I`.
    pub fn monomial_count(&self, set: IndexSet) -> u128 {
        set.iter()
            .map(|b| u128::from(self.sizes[b as usize - 1]))
            .product()
    }

    /// All monomials over `set`, in lexicographic order of column choices.
    pub fn monomials(&self, set: IndexSet) -> Vec<Monomial> {
        let buckets = set.to_vec();
        let mut out = vec![Monomial::one()];
        for &b in &buckets {
            let n = self.sizes[b as usize - 1];
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for m in &out {
                for j in 1..=n {
                    let mut vars = m.0.clone();
                    vars.push(Var::new(b, j));
                    next.push(Monomial(vars));
                }
            }
            out = next;
        }
        out
    }
}

/// A set-multilinear monomial: at most one variable per bucket, sorted by bucket.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<Var>);

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|v| [v.bucket, v.col]))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![v])
    }

    /// Builds a monomial from variables in any order; `None` if two share a bucket.
    pub fn from_vars(mut vars: Vec<Var>) -> Option<Self> {
        vars.sort();
        if vars.windows(2).any(|w| w[0].bucket == w[1].bucket) {
            return None;
        }
        Some(Monomial(vars))
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn index_set(&self) -> IndexSet {
        self.0.iter().map(|v| v.bucket).collect()
    }

    pub fn column(&self, bucket: u32) -> Option<u32> {
        self.0.iter().find(|v| v.bucket == bucket).map(|v| v.col)
    }

    /// Product of monomials over disjoint buckets.
    pub fn mul_disjoint(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i].bucket < other.0[j].bucket {
                out.push(self.0[i]);
                i += 1;
            } else {
                debug_assert_ne!(self.0[i].bucket, other.0[j].bucket);
                out.push(other.0[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Restriction to the buckets in `set`.
    pub fn restrict(&self, set: IndexSet) -> Monomial {
        Monomial(
            self.0
                .iter()
                .copied()
                .filter(|v| set.contains(v.bucket))
                .collect(),
        )
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A homogeneous set-multilinear polynomial with an explicit index set.
///
/// Every stored monomial uses exactly the buckets of `index_set`, and no
/// stored coefficient is zero, so two polynomials are equal iff they are
/// structurally equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<F> {
    index_set: IndexSet,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Scalar> Polynomial<F> {
    pub fn zero(index_set: IndexSet) -> Self {
        Polynomial {
            index_set,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: F) -> Self {
        let mut p = Self::zero(IndexSet::EMPTY);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero(IndexSet::singleton(v.bucket));
        p.terms.insert(Monomial::var(v), F::one());
        p
    }

    /// Builds from explicit terms; every monomial must use exactly `index_set`.
    pub fn from_terms(
        index_set: IndexSet,
        terms: impl IntoIterator<Item = (Monomial, F)>,
    ) -> Result<Self> {
        let mut p = Self::zero(index_set);
        for (m, c) in terms {
            if m.index_set() != index_set {
                return Err(Error::IndexSetMismatch {
                    left: index_set,
                    right: m.index_set(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn index_set(&self) -> IndexSet {
        self.index_set
    }

    pub fn degree(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    /// Value of a degree-0 polynomial.
    pub fn constant_value(&self) -> Option<F> {
        self.index_set
            .is_empty()
            .then(|| self.coeff(&Monomial::one()))
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.index_set != other.index_set {
            return Err(Error::IndexSetMismatch {
                left: self.index_set,
                right: other.index_set,
            });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if self.index_set != other.index_set {
            return Err(Error::IndexSetMismatch {
                left: self.index_set,
                right: other.index_set,
            });
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_limited(other, &Limits::default())
    }

    pub fn mul_limited(&self, other: &Self, limits: &Limits) -> Result<Self> {
        if !self.index_set.is_disjoint(other.index_set) {
            return Err(Error::IndexSetOverlap {
                left: self.index_set,
                right: other.index_set,
            });
        }
        let bound = self.terms.len().saturating_mul(other.terms.len());
        if bound > limits.terms {
            return Err(Error::TermBlowup {
                terms: bound,
                ceiling: limits.terms,
            });
        }
        let mut out = Self::zero(self.index_set.union(other.index_set));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul_disjoint(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero(self.index_set);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-F::one()))
    }

    pub fn eval(&self, assignment: &BTreeMap<Var, F>) -> Result<F> {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m.vars() {
                let x = assignment.get(v).ok_or(Error::MissingAssignment(*v))?;
                t = t * x.clone();
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Substitutes field values for some variables.
    ///
    /// A bucket whose variables are all assigned disappears from the index
    /// set. In a partially assigned bucket every assigned value must be zero,
    /// which keeps the result homogeneous.
    pub fn substitute(
        &self,
        partition: &VariablePartition,
        assignment: &BTreeMap<Var, F>,
    ) -> Result<Self> {
        let removed = classify_substitution(partition, assignment)?;
        let mut out = Self::zero(self.index_set.difference(removed));
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut kept = Vec::with_capacity(m.degree());
            for v in m.vars() {
                match assignment.get(v) {
                    Some(x) => coeff = coeff * x.clone(),
                    None => kept.push(*v),
                }
            }
            out.add_term(Monomial(kept), coeff);
        }
        Ok(out)
    }

    /// Renames buckets by `map(old) = new`; the map must be injective on the index set.
    pub fn relabel_buckets(&self, map: impl Fn(u32) -> u32) -> Self {
        let index_set = self.index_set.iter().map(&map).collect();
        let mut out = Self::zero(index_set);
        for (m, c) in &self.terms {
            let vars = m
                .vars()
                .iter()
                .map(|v| Var::new(map(v.bucket), v.col))
                .collect();
            out.add_term(
                Monomial::from_vars(vars).expect("relabel is injective"),
                c.clone(),
            );
        }
        out
    }

    /// Converts coefficients into another field through their integer lifts.
    pub fn map_coeffs<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Polynomial<G> {
        let mut out = Polynomial::zero(self.index_set);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

/// Returns the buckets removed by `assignment`, checking that partially
/// assigned buckets only receive zeros.
pub fn classify_substitution<F: Scalar>(
    partition: &VariablePartition,
    assignment: &BTreeMap<Var, F>,
) -> Result<IndexSet> {
    let mut counts: BTreeMap<u32, (u32, bool)> = BTreeMap::new();
    for (v, x) in assignment {
        partition.check_var(*v)?;
        let e = counts.entry(v.bucket).or_insert((0, false));
        e.0 += 1;
        e.1 |= !x.is_zero();
    }
    let mut removed = IndexSet::EMPTY;
    for (b, (count, nonzero)) in counts {
        if count == partition.bucket_size(b).unwrap_or(0) {
            removed.insert(b);
        } else if nonzero {
            return Err(Error::PartialBucketAssignment(b));
        }
    }
    Ok(removed)
}

impl<F: Scalar> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Serialized form: `{"index_set":[..], "terms":[{"monomial":[[i,j],..], "coeff":"c"}]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub index_set: IndexSet,
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub monomial: Vec<[u32; 2]>,
    pub coeff: String,
}

impl<F: Scalar> Polynomial<F> {
    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            index_set: self.index_set,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    monomial: m.vars().iter().map(|v| [v.bucket, v.col]).collect(),
                    coeff: c.to_string(),
                })
                .collect(),
            meta: None,
        }
    }

    pub fn from_json(j: &PolynomialJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let vars = t.monomial.iter().map(|&[b, c]| Var::new(b, c)).collect();
            let m = Monomial::from_vars(vars)
                .ok_or_else(|| Error::Schema("monomial repeats a bucket".into()))?;
            let c = F::parse_literal(&t.coeff)
                .ok_or_else(|| Error::Schema(format!("bad coefficient {:?}", t.coeff)))?;
            terms.push((m, c));
        }
        Self::from_terms(j.index_set, terms)
    }
}

/// One entry of a serialized assignment: `{"var":[i,j], "value":"c"}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AssignmentEntry {
    pub var: [u32; 2],
    pub value: String,
}

pub fn assignment_to_json<F: Scalar>(assignment: &BTreeMap<Var, F>) -> Vec<AssignmentEntry> {
    assignment
        .iter()
        .map(|(v, c)| AssignmentEntry {
            var: [v.bucket, v.col],
            value: c.to_string(),
        })
        .collect()
}

pub fn assignment_from_json<F: Scalar>(entries: &[AssignmentEntry]) -> Result<BTreeMap<Var, F>> {
    let mut out = BTreeMap::new();
    for e in entries {
        let v = Var::new(e.var[0], e.var[1]);
        let c = F::parse_literal(&e.value)
            .ok_or_else(|| Error::Schema(format!("bad value {:?} for {v}", e.value)))?;
        if out.insert(v, c).is_some() {
            return Err(Error::Schema(format!("{v} is assigned twice")));
        }
    }
    Ok(out)
}
