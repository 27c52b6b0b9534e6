//! Downstream consequences of the large-k admissible range: the defect at
//! the critical exponent, Tarry's problem and the Waring asymptotic-formula
//! bound with its constants `xi` and `C`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{int_power_root, refine, CertInterval, Rational};
use crate::error::{Error, Result};
use crate::exponents::{t13_bound, GateConfig};

fn gate(k: u64, cfg: &GateConfig) -> Result<()> {
    if k < cfg.large_k_gate {
        return Err(Error::KTooSmall { k, min: cfg.large_k_gate });
    }
    Ok(())
}

fn half_k_k1(k: u64) -> BigInt {
    BigInt::from(k) * (k + 1) / 2u32
}

/// `k/3 + 8k^(2/3) + 1`, the a priori ceiling on the critical defect.
pub fn defect_ceiling(k: u64, bits: u32) -> CertInterval {
    int_power_root(k, 2, 3, bits)
        .mul_rat(&Rational::from(8))
        .add_rat(&(Rational::frac(1, 3) * Rational::from(k) + Rational::one()))
}

/// `Delta = k(k+1)/2 - floor(k(k+1)/2 - k/3 - 8k^(2/3))`.
///
/// With this `Delta` one has `J_{s,k}(X) << X^(s + Delta + eps)` at
/// `s = k(k+1)/2`.
pub fn critical_defect(k: u64, cfg: &GateConfig) -> Result<u64> {
    gate(k, cfg)?;
    let floor = t13_bound(k, cfg.bits)?;
    (half_k_k1(k) - floor)
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("critical defect at k = {k}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct TarryCertificate {
    pub k: u64,
    /// The candidate `s = k(k+1)/2 + 1`.
    #[serde(serialize_with = "crate::ser_big")]
    pub s: BigInt,
    /// `(k+1)(k+2)/2 - (k+1)/3 - 8(k+1)^(2/3)`.
    pub rhs: CertInterval,
    /// `rhs - s`.
    pub margin: CertInterval,
    pub holds: bool,
    /// `W(k, h) <= bound` whenever `holds`.
    #[serde(serialize_with = "crate::ser_big")]
    pub bound: BigInt,
}

/// Check that `s = k(k+1)/2 + 1` lies in the admissible range for degree
/// `k + 1`, which gives `W(k, h) <= k(k+1)/2 + 1`.
pub fn tarry_bound(k: u64, cfg: &GateConfig) -> Result<TarryCertificate> {
    gate(k, cfg)?;
    let s = half_k_k1(k) + 1u32;
    let s_rat = Rational::integer(s.clone());
    let k1 = k + 1;
    let (rhs, holds) = refine(cfg.bits, |bits| {
        let rhs = int_power_root(k1, 2, 3, bits)
            .mul_rat(&Rational::from(-8))
            .add_rat(&(Rational::integer(half_k_k1(k1)) - Rational::frac(1, 3) * Rational::from(k1)));
        let holds = if rhs.lo() >= &s_rat {
            true
        } else if rhs.hi() < &s_rat {
            false
        } else {
            return None;
        };
        Some((rhs, holds))
    })
    .map_err(|bits| Error::Indeterminate { what: format!("Tarry condition at k = {k}"), bits })?;
    let margin = rhs.add_rat(&-&s_rat);
    Ok(TarryCertificate { k, bound: s.clone(), s, rhs, margin, holds })
}

/// One evaluation point of `u0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WaringParams {
    pub k: u64,
    #[serde(serialize_with = "crate::ser_big")]
    pub t: BigInt,
    #[serde(serialize_with = "crate::ser_big")]
    pub v: BigInt,
    pub w: u64,
    pub delta_t: Rational,
    pub delta_v: Rational,
}

impl WaringParams {
    /// `t = k^2 - k + 1`, `Delta_t = 0`, `v = k(k+1)/2`.
    pub fn new(k: u64, w: u64, delta_v: Rational) -> Self {
        WaringParams {
            k,
            t: BigInt::from(k) * k - k + 1u32,
            v: half_k_k1(k),
            w,
            delta_t: Rational::zero(),
            delta_v,
        }
    }

    fn feasible(&self) -> bool {
        self.w >= 1
            && self.w < self.k
            && 2u32 * &self.v + BigInt::from(self.w) * (self.w - 1) < 2u32 * &self.t
    }

    pub fn validate(&self) -> Result<()> {
        if !self.feasible() {
            return Err(Error::Precondition(format!(
                "need 1 <= w <= k-1 and 2v + w(w-1) < 2t (k = {}, t = {}, v = {}, w = {})",
                self.k, self.t, self.v, self.w
            )));
        }
        if self.delta_t >= Rational::one() || self.delta_t.is_negative() {
            return Err(Error::Precondition(format!("Delta_t = {} outside [0, 1)", self.delta_t)));
        }
        if self.delta_v.is_negative() {
            return Err(Error::Precondition(format!("Delta_v = {} is negative", self.delta_v)));
        }
        Ok(())
    }
}

/// `u0 = 2t - (1 - Dt)(2t - 2v - w(w-1)) / (1 - Dt + Dv/w)`.
///
/// `u0` is increasing in `Delta_v`, so an upper bound for `Delta_v` gives an
/// upper bound for `u0`.
pub fn u0(p: &WaringParams) -> Result<Rational> {
    p.validate()?;
    let two_t = Rational::integer(2u32 * &p.t);
    let one_dt = Rational::one() - &p.delta_t;
    let gap = &two_t - Rational::integer(2u32 * &p.v + BigInt::from(p.w) * (p.w - 1));
    let den = &one_dt + &p.delta_v / Rational::from(p.w);
    Ok(&two_t - &(one_dt * gap).checked_div(&den)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct U1Report {
    pub k: u64,
    #[serde(serialize_with = "crate::ser_big")]
    pub t: BigInt,
    #[serde(serialize_with = "crate::ser_big")]
    pub v: BigInt,
    pub delta_t: Rational,
    pub delta_v: Rational,
    pub value: Rational,
    pub w: u64,
    /// `floor(u1) + 1`, the bound on `G~(k)`.
    #[serde(serialize_with = "crate::ser_big")]
    pub g_bound: BigInt,
    /// `Delta_t = 0` at `t = k^2 - k + 1` is imported, not proved here.
    pub imported_hypothesis: &'static str,
}

/// Minimise `u0` over `w` with `Delta_v` fixed. Ties go to the smaller `w`.
pub fn u1_with(k: u64, delta_v: Rational) -> Result<U1Report> {
    let base = WaringParams::new(k, 1, delta_v);
    let best = (1..k)
        .into_par_iter()
        .filter_map(|w| {
            let p = WaringParams { w, ..base.clone() };
            p.feasible().then(|| u0(&p).map(|u| (u, w)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or_else(|| Error::Hypothesis(format!("no feasible w at k = {k}")))?;
    let (value, w) = best;
    Ok(U1Report {
        k,
        g_bound: value.floor() + 1u32,
        t: base.t,
        v: base.v,
        delta_t: base.delta_t,
        delta_v: base.delta_v,
        value,
        w,
        imported_hypothesis: "Delta_{t,k} = 0 at t = k^2 - k + 1",
    })
}

/// `u1(k)` with `Delta_v` the critical defect.
pub fn u1(k: u64, cfg: &GateConfig) -> Result<U1Report> {
    let dv = critical_defect(k, cfg)?;
    u1_with(k, Rational::from(dv))
}

#[derive(Clone, Debug, Serialize)]
pub struct XiConstants {
    pub xi: CertInterval,
    #[serde(rename = "C")]
    pub c: CertInterval,
    pub precision: u32,
}

fn xi_poly(x: &Rational) -> Rational {
    Rational::from(6) * x.pow(3) + Rational::from(3) * x.square() - Rational::one()
}

fn c_of(x: &Rational) -> Rational {
    let num = Rational::from(5) + Rational::from(6) * x - Rational::from(3) * x.square();
    let den = Rational::from(2) + Rational::from(6) * x;
    num / den
}

/// `xi`, the real root of `6x^3 + 3x^2 - 1`, and
/// `C = (5 + 6xi - 3xi^2)/(2 + 6xi)`, both enclosed to width `< 2^(8 - precision)`.
pub fn xi_and_c(precision: u32) -> Result<XiConstants> {
    if precision < 64 {
        return Err(Error::Precondition(format!("precision {precision} < 64 bits")));
    }
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let half = Rational::frac(1, 2);
    for _ in 0..precision {
        let mid = (&lo + &hi) * half.clone();
        if xi_poly(&mid).is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert!(!xi_poly(&lo).is_positive() && !xi_poly(&hi).is_negative());
    // C is decreasing in x on [0, 1].
    let c = CertInterval::new(c_of(&hi), c_of(&lo), precision)?;
    let xi = CertInterval::new(lo, hi, precision)?;
    Ok(XiConstants { xi, c, precision })
}

/// `(3x^3 + 3x + 2)/(6x + 2)`, the leading coefficient of `u1/(2k^2)` at `beta = x`.
pub fn u1_leading(x: &CertInterval) -> Result<CertInterval> {
    let num = x.pow(3).mul_rat(&Rational::from(3)).add(&x.mul_rat(&Rational::from(3))).add_rat(&Rational::from(2));
    let den = x.mul_rat(&Rational::from(6)).add_rat(&Rational::from(2));
    num.div(&den)
}
