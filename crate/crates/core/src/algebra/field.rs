//! Scalar fields used for coefficients.
//!
//! Everything in the crate is generic over [`Scalar`]. Two families are
//! provided: the prime fields [`Fp`] (modulus fixed at compile time, below
//! 2^32) and the rationals [`num_rational::BigRational`].

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Largest absolute integer lift accepted when judging the sign of a constant.
pub const SIGN_WINDOW: u64 = 1_000_000;

/// Sign of a constant as judged on its canonical integer lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignClass {
    NonNegative,
    Negative,
    Ambiguous,
}

/// An exact field of coefficients.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + Eq
    + Hash
    + Send
    + Sync
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Multiplicative inverse, `None` for zero.
    fn try_inv(&self) -> Option<Self>;

    /// Parses a decimal literal (an optional sign and digits; rationals also
    /// accept `a/b`).
    fn parse_literal(s: &str) -> Option<Self>;

    fn sign_class(&self) -> SignClass;

    /// Characteristic of the field, `0` for the rationals.
    fn characteristic() -> u64;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every i64 embeds into the field")
    }
}

/// Trial-division primality test.
pub const fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Element of the prime field Z/PZ, stored as its canonical residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    const CHECK: () = assert!(
        P < (1 << 32) && is_prime(P),
        "modulus must be a prime below 2^32"
    );

    pub const MODULUS: u64 = P;

    pub fn new(v: u64) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::CHECK;
        Fp(v % P)
    }

    pub fn from_signed(v: i64) -> Self {
        let r = v.rem_euclid(P as i64);
        Self::new(r as u64)
    }

    /// Canonical residue in `[0, P)`.
    pub fn residue(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::new(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 + rhs.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + P - rhs.0
        })
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(self.0 * rhs.0 % P)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp::new(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp::new(1)
    }
}

impl<const P: u64> FromPrimitive for Fp<P> {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_signed(n))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::new(n))
    }
}

impl<const P: u64> FromStr for Fp<P> {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Self::parse_literal(s).ok_or(())
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn try_inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (neg, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut acc = 0u64;
        for b in digits.bytes() {
            acc = (acc * 10 + u64::from(b - b'0')) % P;
        }
        let v = Self::new(acc);
        Some(if neg { -v } else { v })
    }

    fn sign_class(&self) -> SignClass {
        if self.0 <= SIGN_WINDOW {
            SignClass::NonNegative
        } else if P - self.0 <= SIGN_WINDOW {
            SignClass::Negative
        } else {
            SignClass::Ambiguous
        }
    }

    fn characteristic() -> u64 {
        P
    }
}

impl Scalar for BigRational {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).ok()?;
                let d = BigInt::from_str(d.trim()).ok()?;
                if d.is_zero() {
                    None
                } else {
                    Some(BigRational::new(n, d))
                }
            }
            None => BigInt::from_str(s).ok().map(BigRational::from_integer),
        }
    }

    fn sign_class(&self) -> SignClass {
        if self.is_negative() {
            SignClass::Negative
        } else {
            SignClass::NonNegative
        }
    }

    fn characteristic() -> u64 {
        0
    }
}

/// Lossy view of a small scalar as an `i64`, used only for reporting.
pub fn small_integer<F: Scalar>(x: &F) -> Option<i64> {
    let s = x.to_string();
    let v: i64 = s.parse().ok()?;
    match x.sign_class() {
        SignClass::Negative if F::characteristic() != 0 => Some(v - F::characteristic().to_i64()?),
        _ => Some(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F7 = Fp<7>;
    type M31 = Fp<2_147_483_647>;

    #[test]
    fn field_axioms_small_prime() {
        for a in 0..7 {
            for b in 0..7 {
                let (x, y) = (F7::new(a), F7::new(b));
                assert_eq!(x + y, F7::new((a + b) % 7));
                assert_eq!(x * y, F7::new(a * b % 7));
                assert_eq!(x - y + y, x);
            }
            if a != 0 {
                let x = F7::new(a);
                assert_eq!(x * x.try_inv().unwrap(), F7::one());
            }
        }
        assert!(F7::zero().try_inv().is_none());
    }

    #[test]
    fn primality() {
        assert!(is_prime(2_147_483_647));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1));
        assert!(!is_prime(1_000_000_008));
    }

    #[test]
    fn literal_parsing_and_signs() {
        assert_eq!(M31::parse_literal("-1"), Some(-M31::one()));
        assert_eq!(M31::parse_literal("2147483648"), Some(M31::one()));
        assert_eq!(M31::parse_literal("1x"), None);
        assert_eq!((-M31::one()).sign_class(), SignClass::Negative);
        assert_eq!(M31::new(5).sign_class(), SignClass::NonNegative);
        assert_eq!(M31::new(1 << 30).sign_class(), SignClass::Ambiguous);
        let r = BigRational::parse_literal("-3/6").unwrap();
        assert_eq!(r.to_string(), "-1/2");
        assert_eq!(small_integer(&(-M31::one())), Some(-1));
    }
}
