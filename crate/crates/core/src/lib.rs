//! Set-multilinear arithmetic circuits and algebraic branching programs.
//!
//! The crate provides two intermediate representations ([`Circuit`] and
//! [`Abp`]) over an exact scalar field, a brute-force expansion oracle into
//! sparse [`Polynomial`]s, and passes over them: depth reduction, lowering to
//! formulas and branching programs, coefficient-matrix rank reports, and
//! proof-tree type analysis. Generators build the standard hard families.
//!
//! All algorithms are generic over [`Scalar`]; [`Fp31`] is the default field.

pub mod abp;
pub mod algebra;
pub mod circuit;
pub mod error;
pub mod generators;
pub mod prooftree;
pub mod rank;
pub mod transforms;

pub use abp::Abp;
pub use algebra::field::{is_prime, Fp, Scalar, SignClass};
pub use algebra::index_set::IndexSet;
pub use algebra::matrix::DenseMatrix;
pub use algebra::poly::{Monomial, Polynomial, Var, VariablePartition};
pub use circuit::{Circuit, Gate, GateId};
pub use error::{Error, ErrorClass, Result};

/// The Mersenne prime field 2^31 - 1.
pub type Fp31 = Fp<2_147_483_647>;
/// The prime field 10^9 + 7.
pub type Fp1e9 = Fp<1_000_000_007>;
/// Exact rational scalars.
pub type Rational = num_rational::BigRational;

pub type Poly = Polynomial<Fp31>;
pub type Circ = Circuit<Fp31>;
pub type Program = Abp<Fp31>;

/// Resource ceilings for operations that can blow up exponentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of terms in any intermediate polynomial.
    pub terms: usize,
    /// Maximum number of proof-tree types tracked at once.
    pub types: usize,
    /// Maximum number of gates produced by duplication.
    pub size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            terms: 1_000_000,
            types: 10_000,
            size: 1_000_000,
        }
    }
}
