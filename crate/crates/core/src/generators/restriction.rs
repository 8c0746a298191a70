use std::collections::BTreeMap;

use serde::Serialize;

use super::permanent::MAX_MATRIX_DIM;
use crate::algebra::field::Scalar;
use crate::algebra::poly::{assignment_to_json, AssignmentEntry, Var};
use crate::error::{Error, Result};

/// A partial assignment to the `n×n` matrix variables that turns the
/// rows `Y ∪ Z` into `ν` diagonal blocks of size two and fixes every
/// other row to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDiagonalRestriction<F> {
    pub n: u32,
    pub nu: u32,
    /// `Y = {1..ν}`.
    pub y: Vec<u32>,
    /// `Z = {ν+1..2ν}`; block `s` pairs row `s` with row `ν+s`.
    pub z: Vec<u32>,
    /// Values of the fixed variables; the variables left free are the
    /// entries of the blocks.
    pub assignment: BTreeMap<Var, F>,
}

#[derive(Serialize)]
struct RestrictionJson<'a> {
    n: u32,
    nu: u32,
    y: &'a [u32],
    z: &'a [u32],
    assignment: Vec<AssignmentEntry>,
}

impl<F: Scalar> Serialize for BlockDiagonalRestriction<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RestrictionJson {
            n: self.n,
            nu: self.nu,
            y: &self.y,
            z: &self.z,
            assignment: assignment_to_json(&self.assignment),
        }
        .serialize(s)
    }
}

impl<F: Scalar> BlockDiagonalRestriction<F> {
    /// Entries of the matrix that stay variables.
    pub fn free_vars(&self) -> Vec<Var> {
        (1..=self.n)
            .flat_map(|i| (1..=self.n).map(move |j| Var::new(i, j)))
            .filter(|v| !self.assignment.contains_key(v))
            .collect()
    }
}

pub fn block_diagonal_restriction<F: Scalar>(
    n: u32,
    nu: u32,
) -> Result<BlockDiagonalRestriction<F>> {
    if n == 0 || n > MAX_MATRIX_DIM || 2 * nu > n {
        return Err(Error::ScaleExceeded(format!(
            "need 2ν ≤ n ≤ {MAX_MATRIX_DIM}, got n={n}, ν={nu}"
        )));
    }
    let y: Vec<u32> = (1..=nu).collect();
    let z: Vec<u32> = (nu + 1..=2 * nu).collect();
    let partner = |i: u32| if i <= nu { i + nu } else { i - nu };
    let mut assignment = BTreeMap::new();
    for i in 1..=n {
        let inside = i <= 2 * nu;
        for j in 1..=n {
            let keep = inside && (j == i || j == partner(i));
            if keep {
                continue;
            }
            let value = if !inside && i == j {
                F::one()
            } else {
                F::zero()
            };
            assignment.insert(Var::new(i, j), value);
        }
    }
    Ok(BlockDiagonalRestriction {
        n,
        nu,
        y,
        z,
        assignment,
    })
}
