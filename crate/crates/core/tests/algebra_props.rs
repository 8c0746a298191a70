mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use smcirc::{DenseMatrix, Fp1e9, Fp31, IndexSet, VariablePartition};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_distributes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = VariablePartition::new((0..5).map(|_| r.gen_range(1..=3)).collect()).unwrap();
        let left: IndexSet = [1, 4].into_iter().collect();
        let right: IndexSet = [2, 3, 5].into_iter().collect();
        let a = random_poly::<Fp31>(&mut r, &p, left, 4);
        let b = random_poly::<Fp31>(&mut r, &p, right, 5);
        let c = random_poly::<Fp31>(&mut r, &p, right, 5);
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_multiplicative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = VariablePartition::uniform(4, 3);
        let a = random_poly::<Fp31>(&mut r, &p, [1, 2].into_iter().collect(), 5);
        let b = random_poly::<Fp31>(&mut r, &p, [3, 4].into_iter().collect(), 5);
        let ab = a.mul(&b).unwrap();
        for _ in 0..100 {
            let x = full_assignment(&mut r, &p);
            prop_assert_eq!(ab.eval(&x).unwrap(), a.eval(&x).unwrap() * b.eval(&x).unwrap());
        }
    }

    #[test]
    fn rank_ignores_row_and_column_order(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8) {
        let mut r = rng(seed);
        let entries: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| if r.gen_bool(0.4) { 0 } else { r.gen_range(-3..=3) }).collect())
            .collect();
        let m = DenseMatrix::from_rows(entries.iter().map(|row| row.iter().map(|&x| Fp31::from_signed(x)).collect()).collect()).unwrap();
        let mut rp: Vec<usize> = (0..rows).collect();
        let mut cp: Vec<usize> = (0..cols).collect();
        rp.shuffle(&mut r);
        cp.shuffle(&mut r);
        prop_assert_eq!(m.permuted(&rp, &cp).rank(), m.rank());
        let other = DenseMatrix::from_rows(entries.iter().map(|row| row.iter().map(|&x| Fp1e9::from_signed(x)).collect()).collect()).unwrap();
        prop_assert_eq!(other.rank(), m.rank());
    }
}
