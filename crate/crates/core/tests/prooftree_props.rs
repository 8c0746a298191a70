mod common;

use proptest::prelude::*;
use smcirc::circuit::CircuitBuilder;
use smcirc::generators::permanent;
use smcirc::prooftree::{
    check_property_u, check_slice_partition, decompose_by_type, enumerate_tree_types,
    unique_type_to_formula, TreeType,
};
use smcirc::{Circuit, Fp31, GateId, IndexSet, Limits, Polynomial, Var};

use common::*;

/// The product of `x_{i,1}` over the leaves of `t`, multiplied in the shape of `t`.
fn shaped_monomial(t: &TreeType, b: &mut CircuitBuilder<Fp31>) -> GateId {
    match t.children() {
        [] => b.input(Var::new(t.set().min().unwrap(), 1)),
        [l, r] => {
            let x = shaped_monomial(l, b);
            let y = shaped_monomial(r, b);
            b.mul(x, y)
        }
        _ => unreachable!("proof-tree types are binary"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decomposition_by_type(seed in any::<u64>(), d in 2u32..=7) {
        let c = circuit::<Fp31>(seed, d);
        let lim = Limits::default();
        let parts = decompose_by_type(&c, &lim).unwrap();
        let mut total = Polynomial::zero(IndexSet::full(d));
        for (t, part) in &parts {
            let types = enumerate_tree_types(part, &lim).unwrap();
            prop_assert_eq!(types, vec![t.clone()]);
            total.add_assign(&part.expand(&lim).unwrap()).unwrap();
            let cut = t.truncate(d as usize).unwrap();
            prop_assert!(cut.leaves() <= 2);
        }
        prop_assert_eq!(total, c.expand(&lim).unwrap());
    }

    #[test]
    fn slices_partition_property_u_circuits(seed in any::<u64>(), d in 3u32..=7) {
        let c = circuit::<Fp31>(seed, d);
        let lim = Limits::default();
        // the slice zeroes every other frontier set except the complement, so
        // the partition is only expected when each truncated type has one leaf
        let one_leaf = enumerate_tree_types(&c, &lim)
            .unwrap()
            .iter()
            .all(|t| t.truncate(d as usize).unwrap().leaves() == 1);
        if one_leaf && check_property_u(&c, &lim).unwrap().holds {
            let s = check_slice_partition(&c, &lim).unwrap();
            prop_assert!(s.is_partition(), "{:?}", s);
        }
    }

    #[test]
    fn single_type_rewrite(seed in any::<u64>(), d in 2u32..=7) {
        let c = circuit::<Fp31>(seed, d);
        let lim = Limits::default();
        for (t, part) in decompose_by_type(&c, &lim).unwrap() {
            let f = unique_type_to_formula(&part, &lim).unwrap();
            prop_assert!(f.is_formula());
            prop_assert_eq!(f.expand(&lim).unwrap(), part.expand(&lim).unwrap());
            let mut b = CircuitBuilder::new();
            let out = shaped_monomial(&t, &mut b);
            let reference = b.finish(c.partition().clone(), out).unwrap();
            let g = unique_type_to_formula(&reference, &lim).unwrap();
            let (tf, tg) = (enumerate_tree_types(&f, &lim).unwrap(), enumerate_tree_types(&g, &lim).unwrap());
            if !part.expand(&lim).unwrap().is_zero() {
                prop_assert_eq!(tf.len(), 1);
                prop_assert_eq!(tf, tg);
            }
        }
    }
}

#[test]
fn permanent_slices_partition() {
    let lim = Limits::default();
    for n in 3..=5 {
        let c: Circuit<Fp31> = permanent(n).unwrap();
        assert!(check_property_u(&c, &lim).unwrap().holds);
        assert!(
            check_slice_partition(&c, &lim).unwrap().is_partition(),
            "n={n}"
        );
    }
}
