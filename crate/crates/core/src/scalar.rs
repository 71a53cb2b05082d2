//! Scalar arithmetic shared by every other module.
//!
//! Two scalar types implement the [`Scalar`] trait: [`Exact`], the ring of
//! finite rational combinations of square roots of squarefree integers
//! (closed under `+ - *` because `sqrt(d1)*sqrt(d2) = g*sqrt(d1*d2/g^2)`
//! with `g = gcd(d1, d2)`), and plain `f64` for the dynamics loops.
//! Mode mismatches are unrepresentable: the matrix and group types are
//! generic over the scalar.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Operations every matrix entry type must support.
///
/// `is_zero_entry` / `is_integer` carry the mode-specific semantics: exact
/// tests for [`Exact`], a 1e-9 tolerance for `f64` (the orbit loops keep
/// coordinates inside `[0,1)`, so accumulated float error stays far below
/// that).
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn is_zero_entry(&self) -> bool;
    fn is_integer(&self) -> bool;
    /// Largest integer `<=` the value.
    fn floor_int(&self) -> i64;
    /// Exact division by a nonzero integer.
    fn div_int(self, n: i64) -> Self;
    fn to_f64(&self) -> f64;
}

pub const FLOAT_INT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn is_zero_entry(&self) -> bool {
        self.abs() <= FLOAT_INT_TOL
    }
    fn is_integer(&self) -> bool {
        (self - self.round()).abs() <= FLOAT_INT_TOL
    }
    fn floor_int(&self) -> i64 {
        self.floor() as i64
    }
    fn div_int(self, n: i64) -> Self {
        self / n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Element of the ring `Q[sqrt(d) : d squarefree]`.
///
/// Stored as a map from squarefree `d >= 1` to a nonzero rational
/// coefficient; `d = 1` is the rational part. The representation is
/// canonical, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Exact {
    terms: BTreeMap<u64, BigRational>,
}

impl Exact {
    pub fn from_rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Exact { terms }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Exact::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(v: i64) -> Self {
        Exact::from_ratio(v, 1)
    }

    /// `sqrt(d)` for any `d >= 1`; the square part is factored out, so
    /// `sqrt(8)` becomes `2*sqrt(2)`.
    pub fn sqrt(d: u64) -> Self {
        assert!(d >= 1, "sqrt argument must be >= 1");
        let (square, free) = split_square(d);
        let mut terms = BTreeMap::new();
        terms.insert(free, BigRational::from(BigInt::from(square)));
        Exact { terms }
    }

    /// `q * sqrt(d)` with normalization.
    pub fn radical(q: BigRational, d: u64) -> Self {
        Exact::from_rational(q) * Exact::sqrt(d)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&d| d == 1)
    }

    pub fn rational_part(&self) -> BigRational {
        self.terms.get(&1).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of `sqrt(d)` (0 when absent).
    pub fn coefficient(&self, d: u64) -> BigRational {
        self.terms.get(&d).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Squarefree integers `d > 1` appearing with nonzero coefficient.
    pub fn radical_support(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied().filter(|&d| d > 1)
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        if self.terms.is_empty() {
            return Some(BigInt::zero());
        }
        if !self.is_rational() {
            return None;
        }
        let q = self.rational_part();
        q.is_integer().then(|| q.to_integer())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Exact::default();
        }
        let terms = self
            .terms
            .iter()
            .map(|(&d, c)| (d, c * q))
            .collect();
        Exact { terms }
    }

    fn insert_term(terms: &mut BTreeMap<u64, BigRational>, d: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(d) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Rational enclosure `[lo, hi]` with `2^-bits` radical precision.
    fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (&d, c) in &self.terms {
            if d == 1 {
                lo += c;
                hi += c;
                continue;
            }
            let scaled = BigInt::from(d) << (2 * bits as usize);
            let root = scaled.sqrt();
            let denom = BigInt::one() << (bits as usize);
            let r_lo = BigRational::new(root.clone(), denom.clone());
            let r_hi = BigRational::new(root + 1, denom);
            if c.is_positive() {
                lo += c * &r_lo;
                hi += c * &r_hi;
            } else {
                lo += c * &r_hi;
                hi += c * &r_lo;
            }
        }
        (lo, hi)
    }

    /// Exact floor. Integrality is decided exactly first; otherwise a
    /// rational interval is refined (doubling precision) until it pins the
    /// floor. Distinct square roots are linearly independent over Q, so a
    /// value with radical terms is irrational and the refinement terminates.
    pub fn floor(&self) -> BigInt {
        if let Some(z) = self.as_integer() {
            return z;
        }
        if self.is_rational() {
            return self.rational_part().floor().to_integer();
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = self.enclosure(bits);
            let fl = lo.floor().to_integer();
            let fh = hi.floor().to_integer();
            if fl == fh && !hi.is_integer() {
                return fl;
            }
            bits *= 2;
            assert!(bits <= 1 << 20, "floor refinement runaway");
        }
    }
}

/// `d = square^2 * free` with `free` squarefree, by trial division.
fn split_square(d: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut rest = d;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                free *= p;
            }
        }
        p += 1;
    }
    free *= rest;
    (square, free)
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        let mut terms = self.terms;
        for (d, c) in rhs.terms {
            Exact::insert_term(&mut terms, d, c);
        }
        Exact { terms }
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        self + (-rhs)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        let terms = self.terms.into_iter().map(|(d, c)| (d, -c)).collect();
        Exact { terms }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        let mut terms = BTreeMap::new();
        for (&d1, c1) in &self.terms {
            for (&d2, c2) in &rhs.terms {
                let g = d1.gcd(&d2);
                let d = (d1 / g) * (d2 / g);
                let c = c1 * c2 * BigRational::from(BigInt::from(g));
                Exact::insert_term(&mut terms, d, c);
            }
        }
        Exact { terms }
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Exact::default()
    }
    fn one() -> Self {
        Exact::from_int(1)
    }
    fn from_int(v: i64) -> Self {
        Exact::from_int(v)
    }
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
    fn is_integer(&self) -> bool {
        self.as_integer().is_some()
    }
    fn floor_int(&self) -> i64 {
        self.floor().to_i64().expect("floor exceeds i64 range")
    }
    fn div_int(self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        self.scale(&BigRational::new(BigInt::one(), BigInt::from(n)))
    }
    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&d, c)| c.to_f64().unwrap_or(f64::NAN) * (d as f64).sqrt())
            .sum()
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exact({self})")
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&d, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if d == 1 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "sqrt({d})")?;
            } else {
                write!(f, "{mag}*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

/// Text syntax: a sum of terms, each `q` or `q*sqrt(d)` or `sqrt(d)`,
/// where `q` is an integer, a fraction `p/q`, or a decimal literal.
/// Example: `1/2 + 3/4*sqrt(2) - sqrt(3)`.
impl FromStr for Exact {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |msg: &str| Error::ScalarParse {
            input: s.to_string(),
            reason: msg.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty scalar"));
        }
        let mut out = Exact::default();
        let bytes = compact.as_bytes();
        let mut i = 0usize;
        let mut sign = 1i64;
        // leading sign
        if bytes[i] == b'+' {
            i += 1;
        } else if bytes[i] == b'-' {
            sign = -1;
            i += 1;
        }
        while i < bytes.len() {
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let term = &compact[start..i];
            out = out + parse_term(term, sign).ok_or_else(|| bad("malformed term"))?;
            if i < bytes.len() {
                sign = if bytes[i] == b'-' { -1 } else { 1 };
                i += 1;
                if i == bytes.len() {
                    return Err(bad("trailing sign"));
                }
            }
        }
        Ok(out)
    }
}

fn parse_term(term: &str, sign: i64) -> Option<Exact> {
    if term.is_empty() {
        return None;
    }
    let (coef_str, rad_str) = match term.split_once('*') {
        Some((c, r)) => (c, Some(r)),
        None => {
            if term.starts_with("sqrt(") {
                ("1", Some(term))
            } else {
                (term, None)
            }
        }
    };
    let q = parse_rational(coef_str)? * BigRational::from(BigInt::from(sign));
    let value = match rad_str {
        None => Exact::from_rational(q),
        Some(r) => {
            let inner = r.strip_prefix("sqrt(")?.strip_suffix(')')?;
            let d: u64 = inner.parse().ok()?;
            if d == 0 {
                return None;
            }
            Exact::radical(q, d)
        }
    };
    Some(value)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.parse().ok()?;
        let d: BigInt = den.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int_part = if int_part.is_empty() { "0" } else { int_part };
        let n: BigInt = int_part.parse().ok()?;
        let frac: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Some(BigRational::from(n) + BigRational::new(frac, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from(n))
}

impl serde::Serialize for Exact {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Exact {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
