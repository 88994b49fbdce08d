//! Exact arithmetic substrate.
//!
//! Spin labels are half-integers stored as doubled plain integers, so all
//! quantum-number arithmetic stays exact. Coefficient values are signed
//! square roots of nonnegative rationals ([`SignedSqrtRational`]); square
//! roots are never evaluated numerically until a final float conversion.
//! [`SqrtSum`] accumulates sums of such terms exactly, which is what makes
//! zero-residual orthogonality checks possible.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Half-integer quantum number (j or m), stored as its doubled value.
///
/// `HalfInt::from_twice(5)` is 5/2; `HalfInt::from_int(3)` is 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInt { twice: 2 * value }
    }

    /// The doubled value (2j or 2m).
    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    /// True for a value usable as a spin magnitude j.
    pub const fn is_spin_magnitude(self) -> bool {
        self.twice >= 0
    }

    /// The value as a plain integer, if it is one.
    pub fn as_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.twice / 2)
    }

    /// The value as a nonnegative plain integer, if it is one.
    pub fn as_nonneg_integer(self) -> Option<u64> {
        match self.as_integer() {
            Some(n) if n >= 0 => Some(n as u64),
            _ => None,
        }
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.twice), BigInt::from(2))
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

/// Checks the (j, m) pair invariants: |m| <= j and j - m an integer.
pub fn valid_pair(j: HalfInt, m: HalfInt) -> bool {
    j.is_spin_magnitude() && m.abs() <= j && (j.twice() - m.twice()) % 2 == 0
}

pub(crate) fn check_pair(j: HalfInt, m: HalfInt) -> Result<()> {
    if valid_pair(j, m) {
        Ok(())
    } else {
        Err(Error::InvalidPair { j, m })
    }
}

pub(crate) fn check_spin(j: HalfInt) -> Result<()> {
    if j.is_spin_magnitude() {
        Ok(())
    } else {
        Err(Error::InvalidSpin { j })
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice + rhs.twice,
        }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice - rhs.twice,
        }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"5/2"`, `"-5/2"`, `"2.5"`, `"-2.5"`, `"4.0"`.
    fn from_str(s: &str) -> Result<HalfInt> {
        let err = || Error::ParseHalfInt {
            input: s.to_string(),
        };
        let t = s.trim();
        if let Some((num, den)) = t.split_once('/') {
            let n: i64 = num.trim().parse().map_err(|_| err())?;
            match den.trim() {
                "1" => Ok(HalfInt::from_int(n)),
                "2" => Ok(HalfInt::from_twice(n)),
                _ => Err(err()),
            }
        } else if let Some((int, frac)) = t.split_once('.') {
            let negative = int.trim_start().starts_with('-');
            let n: i64 = if int == "-" {
                0
            } else {
                int.trim().parse().map_err(|_| err())?
            };
            match frac {
                "0" | "00" => Ok(HalfInt::from_int(n)),
                "5" | "50" => {
                    let half = if negative { -1 } else { 1 };
                    Ok(HalfInt::from_twice(2 * n + half))
                }
                _ => Err(err()),
            }
        } else {
            let n: i64 = t.parse().map_err(|_| err())?;
            Ok(HalfInt::from_int(n))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// (-1)^exponent for an integer exponent of either sign.
pub(crate) fn phase(exponent: i64) -> i8 {
    if exponent.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// n! as an exact integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Rising factorial (x)_k = x (x+1) ... (x+k-1), as a plain product.
///
/// Defined for every rational x, including the nonpositive integers the
/// terminating hypergeometric series relies on; k = 0 gives 1.
pub fn pochhammer(x: &BigRational, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut factor = x.clone();
    for _ in 0..k {
        acc *= &factor;
        factor += BigRational::one();
    }
    acc
}

/// Exact value of the form sign * sqrt(radicand), with radicand >= 0.
///
/// Stored in canonical form (sign zero iff radicand zero, radicand always
/// reduced), so structural equality is exact value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSqrtRational {
    sign: i8,
    radicand: BigRational,
}

impl SignedSqrtRational {
    pub fn zero() -> Self {
        SignedSqrtRational {
            sign: 0,
            radicand: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        SignedSqrtRational {
            sign: 1,
            radicand: BigRational::one(),
        }
    }

    /// Builds sign * sqrt(radicand). Panics on a negative radicand, which
    /// cannot arise from any formula in this crate.
    pub fn new(sign: i8, radicand: BigRational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        assert!((-1..=1).contains(&sign), "sign must be -1, 0, or +1");
        if radicand.is_zero() || sign == 0 {
            SignedSqrtRational::zero()
        } else {
            SignedSqrtRational { sign, radicand }
        }
    }

    /// Builds the value coeff * sqrt(radicand) in canonical form.
    pub fn from_scaled_sqrt(coeff: BigRational, radicand: BigRational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        if coeff.is_zero() || radicand.is_zero() {
            return SignedSqrtRational::zero();
        }
        let sign = if coeff.is_negative() { -1 } else { 1 };
        SignedSqrtRational {
            sign,
            radicand: &coeff * &coeff * radicand,
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The square of the value; the sign is discarded.
    pub fn squared(&self) -> BigRational {
        self.radicand.clone()
    }

    /// sign * sqrt(radicand) as a float: numerator and denominator are
    /// converted separately after reduction, divided, then rooted, keeping
    /// the relative error within a few machine epsilons.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let num = self.radicand.numer().to_f64().unwrap_or(f64::INFINITY);
        let den = self.radicand.denom().to_f64().unwrap_or(f64::INFINITY);
        f64::from(self.sign) * (num / den).sqrt()
    }
}

impl Mul for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: SignedSqrtRational) -> SignedSqrtRational {
        SignedSqrtRational::new(self.sign * rhs.sign, self.radicand * rhs.radicand)
    }
}

impl Neg for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn neg(self) -> SignedSqrtRational {
        SignedSqrtRational {
            sign: -self.sign,
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for SignedSqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            -1 => write!(f, "-sqrt({})", self.radicand),
            _ => write!(f, "sqrt({})", self.radicand),
        }
    }
}

/// Exact accumulator for sums of terms coeff * sqrt(radicand).
///
/// Each term is normalised to coeff' * sqrt(kernel) with a squarefree
/// integer kernel, and coefficients are merged per kernel. The represented
/// value is zero iff every merged coefficient is zero, so orthogonality
/// residuals can be decided exactly.
#[derive(Clone, Debug, Default)]
pub struct SqrtSum {
    terms: BTreeMap<BigInt, BigRational>,
}

impl SqrtSum {
    pub fn new() -> Self {
        SqrtSum::default()
    }

    /// Adds coeff * sqrt(radicand); radicand must be nonnegative.
    pub fn add_sqrt(&mut self, coeff: &BigRational, radicand: &BigRational) {
        assert!(!radicand.is_negative(), "negative radicand");
        if coeff.is_zero() || radicand.is_zero() {
            return;
        }
        // sqrt(p/q) = sqrt(p q) / q
        let n = radicand.numer() * radicand.denom();
        let (root, kernel) = squarefree_split(n);
        let scaled = coeff * BigRational::new(root, radicand.denom().clone());
        let entry = self.terms.entry(kernel).or_insert_with(BigRational::zero);
        *entry += scaled;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add(&mut self, value: &SignedSqrtRational) {
        let coeff = BigRational::from_integer(BigInt::from(value.sign()));
        self.add_sqrt(&coeff, value.radicand());
    }

    /// Subtracts an exact rational (kernel 1) from the sum.
    pub fn sub_rational(&mut self, value: &BigRational) {
        if value.is_zero() {
            return;
        }
        let entry = self.terms.entry(BigInt::one()).or_insert_with(BigRational::zero);
        *entry -= value;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of the absolute rational coefficients: an exact residual measure
    /// that vanishes iff the represented value is zero.
    pub fn magnitude(&self) -> BigRational {
        self.terms
            .values()
            .fold(BigRational::zero(), |acc, c| acc + c.abs())
    }
}

/// Splits n >= 1 as root^2 * kernel with kernel squarefree.
fn squarefree_split(n: BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "squarefree_split needs n >= 1");
    let mut n = n;
    let mut root = BigInt::one();
    let mut kernel = BigInt::one();
    let mut d: u64 = 2;
    while !n.is_one() {
        // Everything reaching this from coupling formulas is smooth, so the
        // remaining cofactor collapses fast; the square test catches the
        // rational-square parts without trial-dividing them.
        let s = n.sqrt();
        if &s * &s == n {
            root *= s;
            break;
        }
        let db = BigInt::from(d);
        if &db * &db > n {
            kernel *= n;
            break;
        }
        let mut exponent = 0u32;
        while (&n % &db).is_zero() {
            n /= &db;
            exponent += 1;
        }
        if exponent > 0 {
            root *= db.pow(exponent / 2);
            if exponent % 2 == 1 {
                kernel *= db;
            }
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    (root, kernel)
}
