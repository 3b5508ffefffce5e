//! Numeric backends for payoffs and probabilities.
//!
//! Every solver and evaluator in this crate is written once against [`Scalar`].
//! Two backends ship: [`Rational`] (arbitrary precision, exact comparisons) and
//! `f64` (fast, comparisons against a small absolute tolerance).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Rational = BigRational;

/// Absolute tolerance under which an `f64` probability is treated as zero.
pub const FLOAT_PROB_CUTOFF: f64 = 1e-12;

/// Absolute tolerance used by the float simplex and linear solves.
pub const FLOAT_LP_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_count(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize fits scalar")
    }

    /// Parses `"p/q"`, integers and (float backend only, or exact-decimal for rationals) decimals.
    fn parse_scalar(text: &str) -> Result<Self>;

    /// Canonical text form; rationals print as `p/q` (or `p` when integral).
    fn format_scalar(&self) -> String;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Probability-level zero test: exact zero, or |x| <= 1e-12 for floats.
    fn is_negligible(&self) -> bool;

    /// Zero test used inside pivoting and elimination.
    fn lp_zero(&self) -> bool;

    fn lp_positive(&self) -> bool {
        !self.lp_zero() && self.is_positive()
    }

    fn lp_negative(&self) -> bool {
        !self.lp_zero() && self.is_negative()
    }

    /// Equality under the backend's comparison rule.
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).lp_zero()
    }

    /// Stable hashable key for memo tables.
    fn key(&self) -> ScalarKey;
}

/// Hashable image of a scalar, used where values take part in memo keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarKey {
    Exact(BigInt, BigInt),
    Bits(u64),
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn parse_scalar(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::parse(format!("bad numerator in {t:?}")))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::parse(format!("bad denominator in {t:?}")))?;
            if d == 0.0 {
                return Err(Error::parse(format!("zero denominator in {t:?}")));
            }
            return Ok(n / d);
        }
        t.parse().map_err(|_| Error::parse(format!("not a number: {t:?}")))
    }

    fn format_scalar(&self) -> String {
        format!("{self:?}")
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= FLOAT_PROB_CUTOFF
    }

    fn lp_zero(&self) -> bool {
        self.abs() <= FLOAT_LP_TOL
    }

    fn key(&self) -> ScalarKey {
        // -0.0 and 0.0 must collide
        let v = if *self == 0.0 { 0.0 } else { *self };
        ScalarKey::Bits(v.to_bits())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn parse_scalar(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| Error::parse(format!("bad numerator in {t:?}")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::parse(format!("bad denominator in {t:?}")))?;
            if d.is_zero() {
                return Err(Error::parse(format!("zero denominator in {t:?}")));
            }
            return Ok(BigRational::new(n, d));
        }
        if let Some((int, frac)) = t.split_once('.') {
            // exact decimal expansion
            let negative = int.trim_start().starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let n: BigInt = digits.parse().map_err(|_| Error::parse(format!("not a number: {t:?}")))?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            let r = BigRational::new(n, d);
            return Ok(if negative { -r } else { r });
        }
        let n: BigInt = t.parse().map_err(|_| Error::parse(format!("not a number: {t:?}")))?;
        Ok(BigRational::from_integer(n))
    }

    fn format_scalar(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn lp_zero(&self) -> bool {
        self.is_zero()
    }

    fn key(&self) -> ScalarKey {
        ScalarKey::Exact(self.numer().clone(), self.denom().clone())
    }
}

/// Converts between backends. Float to rational is exact on the binary value.
pub fn convert<A: Scalar, B: Scalar>(x: &A) -> B {
    if A::EXACT && B::EXACT {
        // same backend in practice; go through text to stay generic
        return B::parse_scalar(&x.format_scalar()).expect("exact round trip");
    }
    if B::EXACT {
        return B::from_f64(x.to_f64_lossy()).expect("finite value");
    }
    B::from_f64(x.to_f64_lossy()).expect("finite value")
}

/// Integer helper for hashing keys of arbitrary vectors of scalars.
pub fn keys<T: Scalar>(xs: &[T]) -> Vec<ScalarKey> {
    xs.iter().map(Scalar::key).collect()
}

/// `sum` that works for any scalar, starting from zero.
pub fn sum<'a, T: Scalar, I: IntoIterator<Item = &'a T>>(xs: I) -> T {
    xs.into_iter().fold(T::zero(), |acc, x| acc + x.clone())
}

/// Marker bound for values that can be used as hash keys.
pub trait KeyLike: Clone + Eq + Hash + Debug {}
impl<K: Clone + Eq + Hash + Debug> KeyLike for K {}
