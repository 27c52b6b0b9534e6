//! Certified real enclosures.
//!
//! Endpoints are exact rationals. Arithmetic is exact on the endpoints and
//! then rounded outward to the dyadic grid `2^-bits` whenever an endpoint's
//! denominator grows past the working precision, so a value like `k/3`
//! stays exact while long products stay bounded in size. Irrational inputs
//! enter only through [`CertInterval::root`].

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::int::iroot;
use super::rational::Round;
use super::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_BITS: u32 = 256;
pub const MAX_BITS: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertInterval {
    lo: Rational,
    hi: Rational,
    bits: u32,
}

/// Outcome of comparing two enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Cmp {
    Less,
    Equal,
    Greater,
    Indeterminate,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn round_to_grid(x: &Rational, bits: u32, up: bool) -> Rational {
    let scale = pow2(bits);
    let scaled = x * Rational::integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() };
    Rational::new(n, scale).expect("nonzero scale")
}

impl CertInterval {
    pub fn point(x: Rational, bits: u32) -> Self {
        CertInterval { lo: x.clone(), hi: x, bits }.normalized()
    }

    pub fn new(lo: Rational, hi: Rational, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Precondition(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(CertInterval { lo, hi, bits }.normalized())
    }

    /// Enclosure of `x^(1/n)` for `x >= 0`, width at most `2^-bits`.
    ///
    /// Exact n-th powers of dyadic rationals come back as points.
    pub fn root(x: &Rational, n: u32, bits: u32) -> Self {
        assert!(!x.is_negative(), "root of a negative number");
        assert!(n >= 1);
        let scale = pow2(bits * n);
        let scaled = x * Rational::integer(scale);
        let floor = scaled.floor();
        let m = iroot(&floor, n);
        let den = pow2(bits);
        let lo = Rational::new(m.clone(), den.clone()).unwrap();
        let exact = scaled.is_integer() && num_traits::pow(m.clone(), n as usize) == floor;
        let hi = if exact { lo.clone() } else { Rational::new(m + 1u32, den).unwrap() };
        CertInterval { lo, hi, bits }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) * Rational::frac(1, 2)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    fn normalized(mut self) -> Self {
        let limit = self.bits as u64 + 32;
        if self.lo.denom().bits() > limit {
            self.lo = round_to_grid(&self.lo, self.bits, false);
        }
        if self.hi.denom().bits() > limit {
            self.hi = round_to_grid(&self.hi, self.bits, true);
        }
        self
    }

    fn with(lo: Rational, hi: Rational, bits: u32) -> Self {
        CertInterval { lo, hi, bits }.normalized()
    }

    pub fn add(&self, o: &CertInterval) -> Self {
        Self::with(&self.lo + &o.lo, &self.hi + &o.hi, self.bits.max(o.bits))
    }

    pub fn sub(&self, o: &CertInterval) -> Self {
        Self::with(&self.lo - &o.hi, &self.hi - &o.lo, self.bits.max(o.bits))
    }

    pub fn neg(&self) -> Self {
        CertInterval { lo: -&self.hi, hi: -&self.lo, bits: self.bits }
    }

    pub fn add_rat(&self, c: &Rational) -> Self {
        Self::with(&self.lo + c, &self.hi + c, self.bits)
    }

    pub fn mul_rat(&self, c: &Rational) -> Self {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            Self::with(b, a, self.bits)
        } else {
            Self::with(a, b, self.bits)
        }
    }

    pub fn mul(&self, o: &CertInterval) -> Self {
        let ps = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = ps.iter().min().unwrap().clone();
        let hi = ps.iter().max().unwrap().clone();
        Self::with(lo, hi, self.bits.max(o.bits))
    }

    pub fn square(&self) -> Self {
        if self.contains_zero() {
            let m = self.lo.square().max(self.hi.square());
            return Self::with(Rational::zero(), m, self.bits);
        }
        let a = self.lo.square();
        let b = self.hi.square();
        Self::with(a.clone().min(b.clone()), a.max(b), self.bits)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = CertInterval::point(Rational::one(), self.bits);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::with(self.hi.recip()?, self.lo.recip()?, self.bits))
    }

    pub fn div(&self, o: &CertInterval) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    /// Square root; fails if the enclosure reaches below zero.
    pub fn sqrt(&self) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::Precondition("sqrt of an interval reaching below zero".into()));
        }
        let lo = CertInterval::root(&self.lo, 2, self.bits).lo;
        let hi = CertInterval::root(&self.hi, 2, self.bits).hi;
        Ok(CertInterval { lo, hi, bits: self.bits })
    }

    pub fn cmp(&self, o: &CertInterval) -> Cmp {
        if self.hi < o.lo {
            Cmp::Less
        } else if self.lo > o.hi {
            Cmp::Greater
        } else if self.is_point() && o.is_point() && self.lo == o.lo {
            Cmp::Equal
        } else {
            Cmp::Indeterminate
        }
    }

    pub fn cmp_rat(&self, c: &Rational) -> Cmp {
        self.cmp(&CertInterval::point(c.clone(), self.bits))
    }

    /// The floor of every point in the enclosure, if they agree.
    pub fn floor(&self) -> Option<BigInt> {
        let a = self.lo.floor();
        (a == self.hi.floor()).then_some(a)
    }

    pub fn intersect(&self, o: &CertInterval) -> Option<Self> {
        let lo = self.lo.clone().max(o.lo.clone());
        let hi = self.hi.clone().min(o.hi.clone());
        (lo <= hi).then(|| CertInterval { lo, hi, bits: self.bits.max(o.bits) })
    }

    pub fn lo_decimal(&self, digits: usize) -> String {
        self.lo.to_decimal(digits, Round::Down)
    }

    pub fn hi_decimal(&self, digits: usize) -> String {
        self.hi.to_decimal(digits, Round::Up)
    }
}

impl fmt::Display for CertInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_decimal(20), self.hi_decimal(20))
    }
}

impl Serialize for CertInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CertInterval", 3)?;
        st.serialize_field("lo", &self.lo_decimal(30))?;
        st.serialize_field("hi", &self.hi_decimal(30))?;
        st.serialize_field("bits", &self.bits)?;
        st.end()
    }
}

/// Re-run `f` at doubling precision until it returns a decision.
///
/// Returns `Err(bits)` with the last precision tried if nothing was decided
/// at [`MAX_BITS`].
pub fn refine<T>(start_bits: u32, mut f: impl FnMut(u32) -> Option<T>) -> std::result::Result<T, u32> {
    let mut bits = start_bits.clamp(16, MAX_BITS);
    loop {
        if let Some(t) = f(bits) {
            return Ok(t);
        }
        if bits >= MAX_BITS {
            return Err(bits);
        }
        bits = (bits * 2).min(MAX_BITS);
    }
}

/// `k^(num/den)` for a positive integer `k`, enclosed.
pub fn int_power_root(k: u64, num: u32, den: u32, bits: u32) -> CertInterval {
    let base = Rational::integer(num_traits::pow(BigInt::from(k), num as usize));
    CertInterval::root(&base, den, bits)
}
