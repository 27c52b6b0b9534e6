//! Elements of a real quadratic field `Q(sqrt(D))`.
//!
//! A value is `rat + surd * sqrt(D)` with rational parts. When `D` is a
//! perfect square the surd is folded into the rational part at
//! construction, so `surd != 0` implies `D` is not a square and the
//! representation is unique.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use super::int::{is_perfect_square, isqrt};
use super::{CertInterval, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadExt {
    d: BigInt,
    rat: Rational,
    surd: Rational,
}

impl QuadExt {
    pub fn new(d: impl Into<BigInt>, rat: Rational, surd: Rational) -> Result<Self> {
        let d = d.into();
        if d <= BigInt::zero() {
            return Err(Error::InvalidRadicand(d.to_string()));
        }
        if let Some(t) = is_perfect_square(&d) {
            let rat = rat + surd * Rational::integer(t);
            return Ok(QuadExt { d, rat, surd: Rational::zero() });
        }
        Ok(QuadExt { d, rat, surd })
    }

    pub fn rational(d: impl Into<BigInt>, rat: Rational) -> Result<Self> {
        Self::new(d, rat, Rational::zero())
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: impl Into<BigInt>) -> Result<Self> {
        Self::new(d, Rational::zero(), Rational::one())
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn surd(&self) -> &Rational {
        &self.surd
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    /// Conjugate `rat - surd*sqrt(D)`.
    pub fn conj(&self) -> Self {
        QuadExt { d: self.d.clone(), rat: self.rat.clone(), surd: -&self.surd }
    }

    /// Field norm `rat^2 - surd^2 D`.
    pub fn norm(&self) -> Rational {
        self.rat.square() - self.surd.square() * Rational::integer(self.d.clone())
    }

    /// Exact sign. Never consults floating point.
    pub fn signum(&self) -> i32 {
        let a = self.rat.signum();
        let b = self.surd.signum();
        if b == 0 {
            return a;
        }
        if a == 0 || a == b {
            return b;
        }
        // Opposite signs: whichever of rat^2 and surd^2 D is larger wins.
        // They cannot tie because D is not a square.
        let lhs = self.rat.square();
        let rhs = self.surd.square() * Rational::integer(self.d.clone());
        if lhs > rhs {
            a
        } else {
            b
        }
    }

    fn radicand_for(&self, other: &QuadExt) -> Result<BigInt> {
        if self.d == other.d || other.surd.is_zero() {
            Ok(self.d.clone())
        } else if self.surd.is_zero() {
            Ok(other.d.clone())
        } else {
            Err(Error::RadicandMismatch(self.d.to_string(), other.d.to_string()))
        }
    }

    pub fn checked_add(&self, o: &QuadExt) -> Result<QuadExt> {
        let d = self.radicand_for(o)?;
        Ok(QuadExt { d, rat: &self.rat + &o.rat, surd: &self.surd + &o.surd })
    }

    pub fn checked_sub(&self, o: &QuadExt) -> Result<QuadExt> {
        let d = self.radicand_for(o)?;
        Ok(QuadExt { d, rat: &self.rat - &o.rat, surd: &self.surd - &o.surd })
    }

    pub fn checked_mul(&self, o: &QuadExt) -> Result<QuadExt> {
        let d = self.radicand_for(o)?;
        let dr = Rational::integer(d.clone());
        let rat = &self.rat * &o.rat + &self.surd * &o.surd * dr;
        let surd = &self.rat * &o.surd + &self.surd * &o.rat;
        Ok(QuadExt { d, rat, surd })
    }

    pub fn recip(&self) -> Result<QuadExt> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QuadExt { d: self.d.clone(), rat: self.rat.checked_div(&n)?, surd: -(self.surd.checked_div(&n)?) })
    }

    pub fn checked_div(&self, o: &QuadExt) -> Result<QuadExt> {
        self.checked_mul(&o.recip()?)
    }

    pub fn scale(&self, c: &Rational) -> QuadExt {
        QuadExt { d: self.d.clone(), rat: &self.rat * c, surd: &self.surd * c }
    }

    pub fn add_rat(&self, c: &Rational) -> QuadExt {
        QuadExt { d: self.d.clone(), rat: &self.rat + c, surd: self.surd.clone() }
    }

    pub fn pow(&self, mut e: u32) -> QuadExt {
        let mut base = self.clone();
        let mut acc = QuadExt { d: self.d.clone(), rat: Rational::one(), surd: Rational::zero() };
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn cmp_exact(&self, o: &QuadExt) -> Result<Ordering> {
        Ok(self.checked_sub(o)?.signum().cmp(&0))
    }

    pub fn cmp_rat(&self, c: &Rational) -> Ordering {
        self.add_rat(&-c).signum().cmp(&0)
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        // sqrt(surd^2 D) bracketed by integer square roots, then corrected by
        // exact comparisons.
        let t = self.surd.square() * Rational::integer(self.d.clone());
        let r = isqrt(&t.floor());
        let approx = if self.surd.is_negative() { -Rational::integer(r) } else { Rational::integer(r) };
        let mut c = (&self.rat + &approx).floor();
        while self.cmp_rat(&Rational::integer(c.clone())) == Ordering::Less {
            c -= 1;
        }
        while self.cmp_rat(&Rational::integer(&c + 1)) != Ordering::Less {
            c += 1;
        }
        c
    }

    /// Enclosure of the real value at the given precision.
    pub fn to_interval(&self, bits: u32) -> CertInterval {
        let rat = CertInterval::point(self.rat.clone(), bits);
        if self.surd.is_zero() {
            return rat;
        }
        let root = CertInterval::root(&Rational::integer(self.d.clone()), 2, bits);
        rat.add(&root.mul_rat(&self.surd))
    }

    pub fn to_f64(&self) -> f64 {
        let d: f64 = Rational::integer(self.d.clone()).to_f64();
        self.rat.to_f64() + self.surd.to_f64() * d.sqrt()
    }

    pub fn one(d: impl Into<BigInt>) -> Result<Self> {
        Self::rational(d, Rational::one())
    }

    pub fn zero(d: impl Into<BigInt>) -> Result<Self> {
        Self::rational(d, Rational::zero())
    }

    pub fn is_one(&self) -> bool {
        self.surd.is_zero() && self.rat == Rational::one()
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if self.rat.is_zero() {
            return write!(f, "{}*sqrt({})", self.surd, self.d);
        }
        if self.surd.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.rat, -&self.surd, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.rat, self.surd, self.d)
        }
    }
}

// Operator forms panic on radicand mismatch, which is a programming error.
impl<'a, 'b> Add<&'b QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, o: &'b QuadExt) -> QuadExt {
        self.checked_add(o).expect("radicand mismatch")
    }
}
impl<'a, 'b> Sub<&'b QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, o: &'b QuadExt) -> QuadExt {
        self.checked_sub(o).expect("radicand mismatch")
    }
}
impl<'a, 'b> Mul<&'b QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, o: &'b QuadExt) -> QuadExt {
        self.checked_mul(o).expect("radicand mismatch")
    }
}
impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { d: self.d.clone(), rat: -&self.rat, surd: -&self.surd }
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

impl serde::Serialize for QuadExt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadExt", 3)?;
        st.serialize_field("radicand", &self.d.to_string())?;
        st.serialize_field("rational", &self.rat)?;
        st.serialize_field("surd", &self.surd)?;
        st.end()
    }
}

/// Is `x` strictly greater than `y * sqrt(d)` for rationals `x`, `y`?
pub fn gt_times_sqrt(x: &Rational, y: &Rational, d: u64) -> bool {
    let q = QuadExt::new(d, x.clone(), -y).expect("positive radicand");
    q.signum() > 0
}

impl From<&QuadExt> for (Rational, Rational) {
    fn from(q: &QuadExt) -> Self {
        (q.rat.clone(), q.surd.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: i64, a: Rational, b: Rational) -> QuadExt {
        QuadExt::new(d, a, b).unwrap()
    }

    #[test]
    fn sign_examples() {
        // 3 - 2 sqrt(2) = 0.1716 > 0
        assert_eq!(q(2, 3.into(), (-2).into()).signum(), 1);
        // 1 - sqrt(2) < 0
        assert_eq!(q(2, 1.into(), (-1).into()).signum(), -1);
        // 1 + 0 sqrt(3) > 0
        assert_eq!(q(3, 1.into(), 0.into()).signum(), 1);
    }

    #[test]
    fn square_radicand_collapses() {
        let x = q(4, 1.into(), Rational::frac(1, 2));
        assert!(x.is_rational());
        assert_eq!(x.rat(), &Rational::from(2));
    }

    #[test]
    fn bad_radicand() {
        assert!(QuadExt::new(0, Rational::one(), Rational::one()).is_err());
        assert!(QuadExt::new(-3, Rational::one(), Rational::one()).is_err());
    }

    #[test]
    fn reciprocal_and_floor() {
        let x = q(7, 2.into(), 1.into()); // 2 + sqrt 7 = 4.6457...
        let inv = x.recip().unwrap();
        assert!((&x * &inv).is_one());
        assert_eq!(x.floor(), BigInt::from(4));
        assert_eq!((-&x).floor(), BigInt::from(-5));
        let y = q(2, 0.into(), 1000.into()); // 1414.21...
        assert_eq!(y.floor(), BigInt::from(1414));
    }

    #[test]
    fn mismatch_detected() {
        let a = QuadExt::sqrt(2).unwrap();
        let b = QuadExt::sqrt(3).unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::RadicandMismatch(_, _))));
        // A rational element is compatible with anything.
        let c = QuadExt::one(5).unwrap();
        assert!(a.checked_add(&c).is_ok());
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let x = q(5, Rational::frac(1, 2), Rational::frac(1, 2));
        let mut acc = QuadExt::one(5).unwrap();
        for _ in 0..7 {
            acc = &acc * &x;
        }
        assert_eq!(x.pow(7), acc);
    }
}
