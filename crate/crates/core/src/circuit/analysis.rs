use serde::Serialize;

use super::{Circuit, Gate, GateId};
use crate::algebra::field::{Scalar, SignClass};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalReport {
    pub interval: bool,
    pub violator: Option<GateId>,
}

/// Checks that `order` lists each of `1..=n` exactly once.
pub fn check_permutation(order: &[u32]) -> Result<()> {
    let n = order.len();
    let mut seen = vec![false; n + 1];
    for &x in order {
        let x = x as usize;
        if x == 0 || x > n || seen[x] {
            return Err(Error::InvalidPermutation(n));
        }
        seen[x] = true;
    }
    Ok(())
}

impl<F: Scalar> Circuit<F> {
    /// Whether every gate's index set is a contiguous window of `order`.
    ///
    /// `order` must be a permutation of `1..=d`. Constant gates always pass.
    pub fn is_interval_multilinear(&self, order: &[u32]) -> Result<IntervalReport> {
        check_permutation(order)?;
        if order.len() != self.partition.degree() as usize {
            return Err(Error::InvalidPermutation(self.partition.degree() as usize));
        }
        let mut pos = vec![0usize; order.len() + 1];
        for (k, &b) in order.iter().enumerate() {
            pos[b as usize] = k;
        }
        let sets = self.index_sets()?;
        for (id, set) in sets.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            let positions: Vec<usize> = set.iter().map(|b| pos[b as usize]).collect();
            let lo = *positions.iter().min().unwrap();
            let hi = *positions.iter().max().unwrap();
            if hi - lo + 1 != positions.len() {
                return Ok(IntervalReport {
                    interval: false,
                    violator: Some(id),
                });
            }
        }
        Ok(IntervalReport {
            interval: true,
            violator: None,
        })
    }

    /// Whether all constants are non-negative small integers.
    ///
    /// Constants whose canonical lift is neither within the sign window of
    /// zero nor of the modulus are reported as ambiguous.
    pub fn is_monotone(&self) -> Result<bool> {
        let mut monotone = true;
        for (id, g) in self.gates.iter().enumerate() {
            if let Gate::Const(c) = g {
                match c.sign_class() {
                    SignClass::NonNegative => {}
                    SignClass::Negative => monotone = false,
                    SignClass::Ambiguous => {
                        return Err(Error::AmbiguousSign {
                            gate: id,
                            value: c.to_string(),
                        })
                    }
                }
            }
        }
        Ok(monotone)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::{Fp31, Var, VariablePartition};

    #[test]
    fn comb_is_interval_and_gap_is_not() {
        let mut b = CircuitBuilder::<Fp31>::new();
        let x1 = b.input(Var::new(1, 1));
        let x2 = b.input(Var::new(2, 1));
        let x3 = b.input(Var::new(3, 1));
        let inner = b.mul(x2, x3);
        let top = b.mul(x1, inner);
        let c = b
            .clone()
            .finish(VariablePartition::uniform(3, 1), top)
            .unwrap();
        assert!(c.is_interval_multilinear(&[1, 2, 3]).unwrap().interval);
        let gap = b.mul(x1, x3);
        let top2 = b.mul(gap, x2);
        let c2 = b.finish(VariablePartition::uniform(3, 1), top2).unwrap();
        let r = c2.is_interval_multilinear(&[1, 2, 3]).unwrap();
        assert_eq!(
            r,
            IntervalReport {
                interval: false,
                violator: Some(gap)
            }
        );
        assert!(c2.is_interval_multilinear(&[1, 3, 2]).unwrap().interval);
    }

    #[test]
    fn monotonicity_and_ambiguous_constants() {
        let mut b = CircuitBuilder::<Fp31>::new();
        let x = b.input(Var::new(1, 1));
        let k = b.constant(Fp31::new(1 << 29));
        let m = b.mul(k, x);
        let c = b.finish(VariablePartition::uniform(1, 1), m).unwrap();
        assert!(matches!(
            c.is_monotone(),
            Err(Error::AmbiguousSign { gate: 1, .. })
        ));
    }
}
