//! Constructors for the standard polynomial families: permanent and
//! determinant, the matched-pair polynomial and its relabelings, the
//! interpolated family, block-diagonal restrictions of the permanent, and
//! good-pair sampling statistics.

mod goodpairs;
mod permanent;
mod restriction;
mod sigma;

pub use goodpairs::{exact_pair_probability, good_pair_stats, GoodPairStats};
pub use permanent::{determinant, is_odd, matrix_roabp, permanent, permutations, MAX_MATRIX_DIM};
pub use restriction::{block_diagonal_restriction, BlockDiagonalRestriction};
pub use sigma::{
    identity, interpolated_f, selector_assignment, sigma_p, sigma_p_abp, MAX_HALF_DEGREE,
    MAX_INTERPOLATED,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` permutations of `1..=n` drawn from a seeded generator.
pub fn random_permutations(n: u32, count: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut p = identity(n);
            p.shuffle(&mut rng);
            p
        })
        .collect()
}
