//! Seeded random set-multilinear circuits for testing.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, CircuitBuilder, GateId};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::{Var, VariablePartition};
use crate::Limits;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomCircuitParams {
    pub d: u32,
    pub max_bucket_size: u32,
    pub max_gates: usize,
    /// Probability of building a sum instead of a product at a node.
    pub add_prob: f64,
    /// Probability of reusing an existing gate with the required index set.
    pub reuse_prob: f64,
    /// Probability of scaling a fresh gate by a small constant.
    pub const_prob: f64,
}

impl RandomCircuitParams {
    pub fn new(d: u32) -> Self {
        RandomCircuitParams {
            d,
            max_bucket_size: 3,
            max_gates: 60,
            add_prob: 0.3,
            reuse_prob: 0.35,
            const_prob: 0.1,
        }
    }
}

struct Gen<'a, F, R> {
    rng: &'a mut R,
    params: &'a RandomCircuitParams,
    partition: &'a VariablePartition,
    b: CircuitBuilder<F>,
    pool: HashMap<IndexSet, Vec<GateId>>,
}

impl<F: Scalar, R: Rng> Gen<'_, F, R> {
    fn build(&mut self, set: IndexSet) -> GateId {
        if let Some(existing) = self.pool.get(&set) {
            if self.rng.gen_bool(self.params.reuse_prob) {
                return *existing
                    .choose(self.rng)
                    .expect("pool entries are nonempty");
            }
        }
        let room = self.b.len() < self.params.max_gates;
        let gate = if set.len() == 1 {
            let bucket = set.min().unwrap();
            let n = self.partition.bucket_size(bucket).unwrap();
            let c1 = self.rng.gen_range(1..=n);
            let x = self.b.input(Var::new(bucket, c1));
            if n > 1 && room && self.rng.gen_bool(self.params.add_prob) {
                let c2 = (c1 % n) + 1;
                let y = self.b.input(Var::new(bucket, c2));
                self.b.add(vec![x, y])
            } else {
                x
            }
        } else if room && self.rng.gen_bool(self.params.add_prob) {
            let k = self.rng.gen_range(2..=3);
            let mut args: Vec<GateId> = (0..k).map(|_| self.build(set)).collect();
            args.sort_unstable();
            args.dedup();
            self.b.sum(args)
        } else {
            let buckets = set.to_vec();
            let (left, right) = loop {
                let mut l = IndexSet::EMPTY;
                for &x in &buckets {
                    if self.rng.gen_bool(0.5) {
                        l.insert(x);
                    }
                }
                if !l.is_empty() && l != set {
                    break (l, set.difference(l));
                }
            };
            let a = self.build(left);
            let b = self.build(right);
            self.b.mul(a, b)
        };
        let gate = if self.rng.gen_bool(self.params.const_prob) {
            let choices = [-2i64, -1, 2, 3];
            let c = self
                .b
                .constant(F::from_int(*choices.choose(self.rng).unwrap()));
            self.b.mul(c, gate)
        } else {
            gate
        };
        self.pool.entry(set).or_default().push(gate);
        gate
    }
}

/// A random circuit over `{1..d}` whose gates are all non-redundant and
/// whose size is at most `params.max_gates`.
pub fn random_circuit<F: Scalar, R: Rng>(rng: &mut R, params: &RandomCircuitParams) -> Circuit<F> {
    loop {
        let sizes = (0..params.d)
            .map(|_| rng.gen_range(1..=params.max_bucket_size))
            .collect();
        let partition = VariablePartition::new(sizes).expect("positive bucket sizes");
        let mut g = Gen {
            rng: &mut *rng,
            params,
            partition: &partition,
            b: CircuitBuilder::hash_consing(),
            pool: HashMap::new(),
        };
        let out = g.build(IndexSet::full(params.d));
        let c =
            g.b.finish(partition.clone(), out)
                .expect("generated circuit is well formed")
                .prune();
        if c.size() > params.max_gates {
            continue;
        }
        match c.redundant_gates(&Limits::default()) {
            Ok(r) if r.is_empty() => return c,
            _ => continue,
        }
    }
}

/// `count` circuits with degrees cycling through `2..=8`, from one seed.
pub fn random_corpus<F: Scalar>(seed: u64, count: usize) -> Vec<Circuit<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| random_circuit(&mut rng, &RandomCircuitParams::new(2 + (k % 7) as u32)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Fp31;

    #[test]
    fn corpus_is_reproducible_and_valid() {
        let a = random_corpus::<Fp31>(7, 14);
        let b = random_corpus::<Fp31>(7, 14);
        assert_eq!(a, b);
        for c in &a {
            assert!(c.size() <= 60);
            let sets = c.index_sets().unwrap();
            assert_eq!(sets[c.output()], IndexSet::full(c.partition().degree()));
        }
    }
}
