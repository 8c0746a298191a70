mod common;

use proptest::prelude::*;
use rand::Rng;
use smcirc::abp::random::random_abp;
use smcirc::rank::{check_layer_factorization, fixed_order_matrix, witness_rank_report};
use smcirc::{Abp, Fp31, IndexSet, Limits, VariablePartition};

use common::*;

fn program(seed: u64, d: u32, single: bool) -> Abp<Fp31> {
    let mut r = rng(seed);
    let p = VariablePartition::new((0..d).map(|_| r.gen_range(1..=3)).collect()).unwrap();
    loop {
        if let Ok(a) = random_abp(&mut r, &p, IndexSet::full(d), 3, single) {
            return a;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn layer_matrices_factor_the_coefficients(seed in any::<u64>(), d in 1u32..=5, single in any::<bool>()) {
        let a = program(seed, d, single);
        let lim = Limits::default();
        prop_assert_eq!(check_layer_factorization(&a, &lim).unwrap(), None);
        let report = witness_rank_report(&a, &lim).unwrap();
        prop_assert!(report.total <= a.size());
    }

    #[test]
    fn scaling_keeps_fixed_order_ranks(seed in any::<u64>(), d in 1u32..=5, c in 1i64..1000) {
        let a = program(seed, d, false);
        let f = a.expand(&Limits::default()).unwrap();
        let g = f.scale(&Fp31::from_signed(-c));
        let order: Vec<u32> = (1..=d).collect();
        for k in 0..=d as usize {
            let r1 = fixed_order_matrix(&f, a.partition(), &order, k).unwrap().rank();
            let r2 = fixed_order_matrix(&g, a.partition(), &order, k).unwrap().rank();
            prop_assert_eq!(r1, r2);
        }
    }

    #[test]
    fn read_once_layers_bound_fixed_order_rank(seed in any::<u64>(), d in 1u32..=5) {
        let a = program(seed, d, true);
        let order = a.detect_roabp().unwrap();
        let f = a.expand(&Limits::default()).unwrap();
        for k in 0..=d as usize {
            let rank = fixed_order_matrix(&f, a.partition(), &order, k).unwrap().rank();
            prop_assert!(rank <= a.layers()[k].len());
        }
    }
}
