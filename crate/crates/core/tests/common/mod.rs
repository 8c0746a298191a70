#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smcirc::circuit::random::{random_circuit, RandomCircuitParams};
use smcirc::{Circuit, IndexSet, Monomial, Polynomial, Scalar, Var, VariablePartition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_int<F: Scalar>(rng: &mut impl Rng) -> F {
    F::from_int(rng.gen_range(-5..=5))
}

/// A random assignment to every variable of the partition.
pub fn full_assignment<F: Scalar>(rng: &mut impl Rng, p: &VariablePartition) -> BTreeMap<Var, F> {
    let mut out = BTreeMap::new();
    for (k, &n) in p.bucket_sizes().iter().enumerate() {
        for j in 1..=n {
            out.insert(
                Var::new(k as u32 + 1, j),
                F::from_int(rng.gen_range(-1000..=1000)),
            );
        }
    }
    out
}

/// Fixes some buckets completely and zeroes a few variables elsewhere.
pub fn partial_assignment<F: Scalar>(
    rng: &mut impl Rng,
    p: &VariablePartition,
) -> BTreeMap<Var, F> {
    let mut out = BTreeMap::new();
    for (k, &n) in p.bucket_sizes().iter().enumerate() {
        let b = k as u32 + 1;
        let r: f64 = rng.gen();
        if r < 0.3 {
            for j in 1..=n {
                out.insert(Var::new(b, j), small_int(rng));
            }
        } else if r < 0.5 && n > 1 {
            out.insert(Var::new(b, rng.gen_range(1..=n)), F::zero());
        }
    }
    out
}

pub fn random_poly<F: Scalar>(
    rng: &mut impl Rng,
    p: &VariablePartition,
    set: IndexSet,
    terms: usize,
) -> Polynomial<F> {
    let all = p.monomials(set);
    let picked: Vec<(Monomial, F)> = (0..terms)
        .map(|_| (all.choose(rng).unwrap().clone(), small_int(rng)))
        .collect();
    Polynomial::from_terms(set, picked).unwrap()
}

pub fn circuit<F: Scalar>(seed: u64, d: u32) -> Circuit<F> {
    random_circuit(&mut rng(seed), &RandomCircuitParams::new(d))
}
