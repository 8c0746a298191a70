mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use smcirc::{Circuit, Fp31, Limits};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn validation_is_idempotent(seed in any::<u64>(), d in 2u32..=8) {
        let c = circuit::<Fp31>(seed, d);
        let lim = Limits::default();
        let a = c.validate(&lim).unwrap();
        prop_assert_eq!(&a, &c.validate(&lim).unwrap());
        let again = Circuit::<Fp31>::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(a, again.validate(&lim).unwrap());
    }

    #[test]
    fn evaluation_matches_expansion(seed in any::<u64>(), d in 2u32..=8) {
        let c = circuit::<Fp31>(seed, d);
        let f = c.expand(&Limits::default()).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        for _ in 0..20 {
            let x = full_assignment(&mut r, c.partition());
            prop_assert_eq!(c.evaluate(&x).unwrap(), f.eval(&x).unwrap());
        }
    }

    #[test]
    fn substitution_commutes_with_expansion(seed in any::<u64>(), d in 2u32..=7) {
        let c = circuit::<Fp31>(seed, d);
        let lim = Limits::default();
        let x = partial_assignment::<Fp31>(&mut rng(seed.wrapping_add(1)), c.partition());
        let via_circuit = c.substitute(&x).unwrap().expand(&lim).unwrap();
        let via_poly = c.expand(&lim).unwrap().substitute(c.partition(), &x).unwrap();
        // a substitution that kills every term leaves a constant zero circuit
        if via_poly.is_zero() {
            prop_assert!(via_circuit.is_zero());
        } else {
            prop_assert_eq!(via_circuit, via_poly);
        }
    }

    #[test]
    fn interval_check_ignores_gate_numbering(seed in any::<u64>(), d in 2u32..=8) {
        let c = circuit::<Fp31>(seed, d);
        let mut r = rng(seed);
        let mut j = c.to_json();
        j.gates.shuffle(&mut r);
        let relabelled = Circuit::<Fp31>::from_json(&j).unwrap();
        let mut order: Vec<u32> = (1..=d).collect();
        order.shuffle(&mut r);
        let a = c.is_interval_multilinear(&order).unwrap().interval;
        let b = relabelled.is_interval_multilinear(&order).unwrap().interval;
        prop_assert_eq!(a, b);
        let identity: Vec<u32> = (1..=d).collect();
        prop_assert_eq!(
            c.is_interval_multilinear(&identity).unwrap().interval,
            relabelled.is_interval_multilinear(&identity).unwrap().interval
        );
    }
}
