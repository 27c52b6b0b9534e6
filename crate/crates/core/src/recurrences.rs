//! The recurrences behind the iteration.
//!
//! * the weights `phi_m` and `phi*`,
//! * the integer sequences `(a_n, b_n)` driven by a tuple `m` and offsets `h`,
//!   and their offset-free real counterparts `(a~_n, b~_n)`,
//! * the linear sequences `B_n`, `A_n` whose growth decides `s_0`,
//! * the refined (large-`k`) variants with the `u~`, `v~` windows.
//!
//! Quantities living in `Q(sqrt k)` are kept as [`QuadExt`]; the large-`k`
//! variants only need rationals and intervals.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{ceil_cbrt, int_power_root, is_perfect_square, refine, CertInterval, Cmp, QuadExt, Rational, DEFAULT_BITS};
use crate::error::{Error, Result};
use crate::exponents::{r0, t13_bound, theta_data, IterationParams, ThetaData};

/// `phi_m = (s-r)/((s-m)(s-m-1))` for `0 <= m < r` and `phi* = (s-r)/s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiWeights {
    pub r: u64,
    pub s: u64,
    pub phi: Vec<Rational>,
    pub phi_star: Rational,
}

pub fn phi_weights(r: u64, s: u64) -> Result<PhiWeights> {
    if r < 1 || r >= s {
        return Err(Error::Precondition(format!("need 1 <= r < s, got r = {r}, s = {s}")));
    }
    let num = Rational::from(s - r);
    let phi: Vec<Rational> = (0..r).map(|m| &num / Rational::from((s - m) * (s - m - 1))).collect();
    let phi_star = &num / Rational::from(s);
    let sum: Rational = phi.iter().cloned().sum();
    // Both identities telescope; failure would mean a bug above.
    assert_eq!(&sum + &phi_star, Rational::one());
    assert_eq!(sum, Rational::new(r, s).unwrap());
    Ok(PhiWeights { r, s, phi, phi_star })
}

/// Which starting ratio `a_0 / b_0` the sequences use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Flavor {
    /// `a_0 = floor(b / sqrt k)`, the core iteration.
    SqrtK,
    /// `a_0 = floor(b / l)` with `l = ceil(k^(1/3))`, the refined iteration.
    EllK,
}

/// `l = ceil(k^(1/3))`.
pub fn ell(k: u64) -> u64 {
    ceil_cbrt(k)
}

/// `floor(b / sqrt k)` computed as `isqrt(floor(b^2 / k))`.
pub fn floor_div_sqrt(b: &BigInt, k: u64) -> BigInt {
    crate::arith::isqrt(&((b * b) / BigInt::from(k)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceChecks {
    /// `b~_{n+1} > sqrt(k) b~_n` for every `n` (core flavor, `r <= r0`).
    pub growth: Option<bool>,
    /// `b b~_n <= b_n <= b b~_n + 16 k^(R+n) b` (core flavor, small offsets).
    pub sandwich: Option<bool>,
    /// `a_R < b_R / sqrt(k)` (core flavor, `r <= r0`).
    pub a_below: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbSequence {
    pub k: u64,
    pub r: u64,
    pub flavor: Flavor,
    pub a: Vec<BigInt>,
    pub b: Vec<BigInt>,
    pub checks: SequenceChecks,
}

fn validate_tuple(k: u64, r: u64, m: &[u64]) -> Result<()> {
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    if r < 1 || r >= k {
        return Err(Error::Precondition(format!("need 1 <= r <= k-1, got r = {r}")));
    }
    if let Some(x) = m.iter().find(|&&x| x >= r) {
        return Err(Error::Precondition(format!("m entry {x} exceeds r - 1 = {}", r - 1)));
    }
    Ok(())
}

/// Run `a_n = b_{n-1}`, `b_n = (k - m_n) b_{n-1} - m_n a_{n-1} + h_n`.
pub fn iterate_ab(k: u64, r: u64, b: &BigInt, m: &[u64], h: &[BigInt], flavor: Flavor) -> Result<AbSequence> {
    validate_tuple(k, r, m)?;
    if m.len() != h.len() {
        return Err(Error::Precondition("m and h must have the same length".into()));
    }
    if !b.is_positive() {
        return Err(Error::Precondition("b must be positive".into()));
    }
    if h.iter().any(|x| x.is_negative()) {
        return Err(Error::Precondition("offsets must be nonnegative".into()));
    }
    let a0 = match flavor {
        Flavor::SqrtK => floor_div_sqrt(b, k),
        Flavor::EllK => b / BigInt::from(ell(k)),
    };
    let mut av = vec![a0];
    let mut bv = vec![b.clone()];
    for (n, (&mn, hn)) in m.iter().zip(h).enumerate() {
        let bn = BigInt::from(k - mn) * &bv[n] - BigInt::from(mn) * &av[n] + hn;
        av.push(bv[n].clone());
        bv.push(bn);
    }
    let mut checks = SequenceChecks { growth: None, sandwich: None, a_below: None };
    if flavor == Flavor::SqrtK {
        let t = tilde_sequence(k, r, m, Flavor::SqrtK)?;
        let sk = QuadExt::sqrt(k)?;
        if r <= r0(k) {
            let g = (0..m.len()).all(|n| t.b[n + 1].cmp_exact(&(&sk * &t.b[n])).unwrap().is_gt());
            checks.growth = Some(g);
            let rr = m.len();
            // a_R < b_R / sqrt k  <=>  sqrt(k) a_R < b_R
            let lhs = sk.scale(&Rational::from(av[rr].clone()));
            checks.a_below = Some(lhs.cmp_rat(&Rational::from(bv[rr].clone())).is_lt());
        }
        let rr = m.len() as u32;
        let cap = BigInt::from(16) * num_traits::pow(BigInt::from(k), rr as usize) * b;
        if h.iter().all(|x| x <= &cap) {
            let br = Rational::from(b.clone());
            let ok = (0..=m.len()).all(|n| {
                let base = t.b[n].scale(&br);
                let bn = Rational::from(bv[n].clone());
                let slack = Rational::from(BigInt::from(16) * num_traits::pow(BigInt::from(k), rr as usize + n) * b);
                base.cmp_rat(&bn).is_le() && base.add_rat(&slack).cmp_rat(&bn).is_ge()
            });
            checks.sandwich = Some(ok);
        }
    }
    Ok(AbSequence { k, r, flavor, a: av, b: bv, checks })
}

/// `c_{n,l}` for unit offset at step `l`: `c_{l,l} = 1`, `c_{l-1,l} = 0`,
/// `c_{n+1,l} = (k - m_{n+1}) c_{n,l} - m_{n+1} c_{n-1,l}`. Entry `i` is
/// `c_{l+i,l}`.
pub fn offset_kernel(k: u64, m: &[u64], l: usize) -> Vec<BigInt> {
    assert!(l >= 1 && l <= m.len());
    let mut c = vec![BigInt::one()];
    let mut prev = BigInt::zero();
    for n in l..m.len() {
        let mn = m[n]; // m_{n+1} in 1-based indexing
        let next = BigInt::from(k - mn) * &c[c.len() - 1] - BigInt::from(mn) * &prev;
        prev = c[c.len() - 1].clone();
        c.push(next);
    }
    c
}

/// `c_{n+1,l} > sqrt(k) c_{n,l}` for every `l` and every `n >= l`.
pub fn offset_kernel_grows(k: u64, m: &[u64]) -> bool {
    (1..=m.len()).all(|l| {
        let c = offset_kernel(k, m, l);
        c.windows(2).all(|w| crate::arith::gt_times_sqrt(&Rational::from(w[1].clone()), &Rational::from(w[0].clone()), k))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TildeSequence {
    pub k: u64,
    pub r: u64,
    pub flavor: Flavor,
    pub a: Vec<QuadExt>,
    pub b: Vec<QuadExt>,
    /// `u~_n = r b~_{n-1} / (a~_{n-1} + b~_{n-1})` for `1 <= n <= R`.
    pub u: Vec<QuadExt>,
    /// `v~_n = floor(u~_n)`.
    pub v: Vec<BigInt>,
    /// `k_m = b~_R`.
    pub k_m: QuadExt,
    /// Every `m_n <= v~_n - 1`.
    pub in_window: bool,
    /// Refined flavor inside the window: `b~_{n+1} >= l b~_n`.
    pub growth: Option<bool>,
    /// Refined flavor inside the window: `2^R <= k_m <= k^R`.
    pub bounds: Option<bool>,
}

/// Offset-free sequences with `a~_0 = 1/sqrt(k)` or `1/l`, `b~_0 = 1`.
pub fn tilde_sequence(k: u64, r: u64, m: &[u64], flavor: Flavor) -> Result<TildeSequence> {
    validate_tuple(k, r, m)?;
    let a0 = match flavor {
        Flavor::SqrtK => QuadExt::new(k, Rational::zero(), Rational::new(1, k)?)?,
        Flavor::EllK => QuadExt::rational(k, Rational::new(1, ell(k))?)?,
    };
    let mut a = vec![a0];
    let mut b = vec![QuadExt::one(k)?];
    let mut u = Vec::new();
    let mut v = Vec::new();
    let rq = Rational::from(r);
    for (n, &mn) in m.iter().enumerate() {
        let denom = &a[n] + &b[n];
        let un = b[n].scale(&rq).checked_div(&denom)?;
        v.push(un.floor());
        u.push(un);
        let bn = &b[n].scale(&Rational::from(k - mn)) - &a[n].scale(&Rational::from(mn));
        a.push(b[n].clone());
        b.push(bn);
    }
    let in_window = m.iter().zip(&v).all(|(&mn, vn)| BigInt::from(mn) < *vn);
    let k_m = b[m.len()].clone();
    let (mut growth, mut bounds) = (None, None);
    if flavor == Flavor::EllK && in_window {
        let l = Rational::from(ell(k));
        growth = Some((0..m.len()).all(|n| b[n + 1].cmp_exact(&b[n].scale(&l)).unwrap().is_ge()));
        let rr = m.len();
        let lo = Rational::from(num_traits::pow(BigInt::from(2), rr));
        let hi = Rational::from(num_traits::pow(BigInt::from(k), rr));
        bounds = Some(k_m.cmp_rat(&lo).is_ge() && k_m.cmp_rat(&hi).is_le());
    }
    Ok(TildeSequence { k, r, flavor, a, b, u, v, k_m, in_window, growth, bounds })
}

/// One row of the `B_n`, `A_n` table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BnRow {
    pub n: u32,
    pub b: QuadExt,
    pub a: QuadExt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BnTable {
    pub params: IterationParams,
    pub theta: ThetaData,
    pub rows: Vec<BnRow>,
    /// Closed form agrees with the recursion on every row; `None` when the
    /// closed form is unavailable (discriminant `<= 0`).
    pub closed_form_agrees: Option<bool>,
    /// `s^R B_R`, i.e. `s_0^R` at the last row.
    pub s0_pow_r: QuadExt,
}

/// Integer form of the `B_n`, `A_n` recursion.
///
/// With `alpha = a/d`, `beta/r = c/d`, `X_n = s^n B_n` and `Y_n = s^n A_n`,
/// the scaled values `x_n = d^n k X_n`, `y_n = d^n k Y_n` are `p + q sqrt(k)`
/// with integer `p`, `q`, and `x_{n+1} = a x_n - c y_n`, `y_{n+1} = r d x_n`.
/// Keeping integers avoids a gcd per operation.
fn scaled_bn(params: &IterationParams, t: &ThetaData, rr: u32, mut stop: impl FnMut(u32, &(BigInt, BigInt), &BigInt) -> bool) -> Vec<[BigInt; 4]> {
    let IterationParams { k, r, .. } = *params;
    let beta_r = t.beta_over_r(r);
    let d = num_integer::Integer::lcm(t.alpha.denom(), beta_r.denom());
    let a = (&t.alpha * Rational::integer(d.clone())).numer().clone();
    let c = (&beta_r * Rational::integer(d.clone())).numer().clone();
    let kb = BigInt::from(k);
    let rd = BigInt::from(r) * &d;
    let (mut xp, mut xq) = (&a * &kb, -c.clone());
    let (mut yp, mut yq) = (&rd * &kb, BigInt::zero());
    let mut dk = &d * &kb; // d^n k
    let mut out = Vec::new();
    for n in 1..=rr {
        out.push([xp.clone(), xq.clone(), yp.clone(), yq.clone()]);
        if stop(n, &(xp.clone(), xq.clone()), &dk) {
            break;
        }
        let nxp = &a * &xp - &c * &yp;
        let nxq = &a * &xq - &c * &yq;
        yp = &rd * &xp;
        yq = &rd * &xq;
        xp = nxp;
        xq = nxq;
        dk *= &d;
    }
    out
}

/// `B_n`, `A_n` from the recursion
/// `s B_{n+1} = alpha B_n - (beta/r) A_n`, `s A_{n+1} = r B_n`, started at
/// `s B_1 = alpha - beta/(r sqrt k)`, `s A_1 = r`.
pub fn bn_recursion(params: &IterationParams, t: &ThetaData, rr: u32) -> Result<Vec<BnRow>> {
    let IterationParams { k, r, s } = *params;
    let beta_r = t.beta_over_r(r);
    let d = num_integer::Integer::lcm(t.alpha.denom(), beta_r.denom());
    let raw = scaled_bn(params, t, rr, |_, _, _| false);
    let mut scale = BigInt::from(k) * BigInt::from(s) * &d; // d^n k s^n
    let step = BigInt::from(s) * &d;
    let mut rows = Vec::with_capacity(raw.len());
    for (i, [xp, xq, yp, yq]) in raw.into_iter().enumerate() {
        let b = QuadExt::new(k, Rational::new(xp, scale.clone())?, Rational::new(xq, scale.clone())?)?;
        let a = QuadExt::new(k, Rational::new(yp, scale.clone())?, Rational::new(yq, scale.clone())?)?;
        rows.push(BnRow { n: i as u32 + 1, b, a });
        scale *= &step;
    }
    Ok(rows)
}

/// `U_n = (theta_+^n - theta_-^n)/(theta_+ - theta_-)` for `0 <= n <= n_max`,
/// by powering the roots of `x^2 - alpha x + beta` in `Q(sqrt disc)`.
pub fn root_power_quotients(alpha: &Rational, disc: &Rational, n_max: u32) -> Result<Vec<Rational>> {
    if !disc.is_positive() {
        return Err(Error::Degenerate(format!("discriminant {disc} <= 0")));
    }
    let (p, q) = (disc.numer().clone(), disc.denom().clone());
    // sqrt(disc) = sqrt(D)/q with D = p q. Write theta_+ = (X + Y sqrt D)/L
    // with L = 2 lcm(den alpha, q).
    let d = &p * &q;
    let l = num_integer::Integer::lcm(alpha.denom(), &q) * 2;
    let x = (alpha * Rational::integer(&l / 2)).numer().clone();
    let y = &l / (&q * 2);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    if let Some(t) = is_perfect_square(&d) {
        // Rational roots (X +- Y t)/L; U_n = (P^n - M^n) / (L^(n-1) (P - M)).
        let pl = &x + &y * &t;
        let ml = &x - &y * &t;
        let diff = &pl - &ml;
        let (mut pp, mut mm, mut ln) = (BigInt::one(), BigInt::one(), BigInt::one());
        for _ in 0..=n_max {
            out.push(Rational::new((&pp - &mm) * &l, &diff * &ln)?);
            pp *= &pl;
            mm *= &ml;
            ln *= &l;
        }
        return Ok(out);
    }
    // theta_+^n = (X_n + Y_n sqrt D)/L^n, and U_n = 2 (Y_n / L^n) sqrt(D) / (sqrt(D)/q).
    let (mut xn, mut yn) = (BigInt::one(), BigInt::zero());
    let mut ln = BigInt::one();
    for _ in 0..=n_max {
        out.push(Rational::new(BigInt::from(2) * &yn * &q, ln.clone())?);
        let nx = &xn * &x + &yn * &y * &d;
        yn = &xn * &y + &yn * &x;
        xn = nx;
        ln *= &l;
    }
    Ok(out)
}

pub fn bn_table(k: u64, r: u64, s: u64, rr: u32) -> Result<BnTable> {
    let params = IterationParams::new(k, r, s)?;
    if rr == 0 {
        return Err(Error::Precondition("R must be at least 1".into()));
    }
    let t = theta_data(&params)?;
    let rows = bn_recursion(&params, &t, rr)?;
    let closed_form_agrees = match root_power_quotients(&t.alpha, &t.discriminant, rr + 1) {
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
        Ok(u) => {
            let c = &t.beta / Rational::from(r * k);
            let sq = Rational::from(s);
            let mut ok = true;
            let mut spow = Rational::one();
            for row in &rows {
                let n = row.n as usize;
                spow = &spow * &sq;
                let bn = QuadExt::new(k, u[n + 1].clone(), -(&c * &u[n]))?.scale(&spow.recip()?);
                let an = QuadExt::new(k, u[n].clone(), -(&c * &u[n - 1]))?.scale(&(Rational::from(r) / &spow));
                ok &= bn == row.b && an == row.a;
            }
            Some(ok)
        }
    };
    let last = &rows[rows.len() - 1].b;
    let s0_pow_r = last.scale(&Rational::from(s).pow(rr));
    Ok(BnTable { params, theta: t, rows, closed_form_agrees, s0_pow_r })
}

/// Smallest `R <= r_max` with `B_R > 1`, i.e. `s < s_0`.
pub fn min_valid_r(k: u64, r: u64, s: u64, r_max: u32) -> Result<Option<u32>> {
    let params = IterationParams::new(k, r, s)?;
    let t = theta_data(&params)?;
    // B_n > 1  <=>  x_n > d^n k s^n, compared exactly in Z[sqrt k].
    let sb = BigInt::from(s);
    let mut spow = BigInt::one();
    let mut found = None;
    scaled_bn(&params, &t, r_max, |n, (p, q), dk| {
        spow *= &sb;
        let rhs = dk * &spow;
        let diff = QuadExt::new(k, Rational::integer(p - &rhs), Rational::integer(q.clone())).expect("k >= 4");
        if diff.signum() > 0 {
            found = Some(n);
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// Every `(k, r, s)` with `4 <= k <= k_max`, `2 <= r <= r0(k)`, `s <= k r`,
/// `s >= 2r - 1` and `s >= r(r-1)/2 + Delta`; the grid on which `s < theta_+`
/// is the remaining hypothesis.
pub fn hypothesis_grid(k_max: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for k in 4..=k_max {
        for r in 2..=r0(k) {
            for s in (2 * r - 1)..=k * r {
                let Ok(p) = IterationParams::new(k, r, s) else { continue };
                let Ok(t) = theta_data(&p) else { continue };
                if Rational::from(s) >= t.beta_over_r(r) {
                    out.push((k, r, s));
                }
            }
        }
    }
    out
}

/// The refined iteration's `alpha` and `beta` at `bits`.
fn refined_alpha_beta(k: u64, bits: u32) -> (CertInterval, CertInterval) {
    let k23 = int_power_root(k, 2, 3, bits);
    let kr = Rational::from(k);
    let alpha = k23
        .mul_rat(&Rational::from(-3))
        .add_rat(&(Rational::from(k * (k + 1)) * Rational::frac(1, 2) - &kr * Rational::frac(1, 3)));
    let beta = k23
        .mul_rat(&(Rational::from(3) * &kr))
        .add_rat(&(Rational::from(k * (k - 1)) * Rational::frac(1, 2)));
    (alpha, beta)
}

/// `B~_1..B~_R` from `s B~_1 = alpha - beta/l`, `s^2 B~_2 = alpha(alpha - beta/l) - r beta`,
/// `s^2 B~_{n+2} = s alpha B~_{n+1} - r beta B~_n`.
pub fn refined_b_tilde(k: u64, s: u64, rr: u32, bits: u32) -> Result<Vec<CertInterval>> {
    let l = Rational::from(ell(k));
    let r = Rational::from(k - ell(k));
    let (alpha, beta) = refined_alpha_beta(k, bits);
    let sq = Rational::from(s);
    let inv_s = sq.recip()?;
    let first = alpha.sub(&beta.mul_rat(&l.recip()?));
    let mut out = vec![first.mul_rat(&inv_s)];
    if rr >= 2 {
        let second = alpha.mul(&first).sub(&beta.mul_rat(&r));
        out.push(second.mul_rat(&inv_s.square()));
    }
    while (out.len() as u32) < rr {
        let n = out.len();
        // B~_{n+1} = (alpha B~_n)/s - (r beta B~_{n-1})/s^2
        let next = alpha.mul(&out[n - 1]).mul_rat(&inv_s).sub(&beta.mul(&out[n - 2]).mul_rat(&(&r * inv_s.square())));
        out.push(next);
    }
    Ok(out)
}

/// Right-hand side of the refined lower bound for `s_0^R` (closed form),
/// i.e. `s^R B~_R`. `None` if the discriminant is not certainly positive.
pub fn refined_closed_form(k: u64, rr: u32, bits: u32) -> Option<CertInterval> {
    let l = Rational::from(ell(k));
    let r = Rational::from(k - ell(k));
    let (alpha, beta) = refined_alpha_beta(k, bits);
    let disc = alpha.square().sub(&beta.mul_rat(&(Rational::from(4) * &r)));
    if !disc.lo().is_positive() {
        return None;
    }
    let root = disc.sqrt().ok()?;
    let half = Rational::frac(1, 2);
    let tp = alpha.add(&root).mul_rat(&half);
    let tm = alpha.sub(&root).mul_rat(&half);
    let diff = root.clone();
    let quot = |n: u32| tp.pow(n).sub(&tm.pow(n)).div(&diff);
    let prod = tp.mul(&tm).mul_rat(&(&l * &r).recip().ok()?);
    let v = quot(rr + 1).ok()?.sub(&prod.mul(&quot(rr).ok()?));
    Some(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinedReport {
    pub k: u64,
    pub s: u64,
    pub r: u64,
    pub ell: u64,
    pub big_r: u32,
    /// `k(k+1)/2 - 3k <= s + r <= floor(k(k+1)/2 - k/3 - 8k^(2/3))`.
    pub in_window: bool,
    /// `B_n = sum over the v~-window of beta_m b~_n(m)`, exact.
    pub b_n: Vec<Rational>,
    pub a_n: Vec<Rational>,
    pub b_tilde: Vec<CertInterval>,
    /// `B_n >= B~_n` for each `n`; `None` if undecided at the maximum precision.
    pub lower_bound_holds: Vec<Option<bool>>,
    /// `s_0^R = s^R B_R`.
    pub s0_pow_r: Rational,
    pub s0: CertInterval,
    /// Closed form for `s^R B~_R`, when available.
    pub closed_form: Option<CertInterval>,
    /// Closed form and recursion enclosures for `s^R B~_R` overlap.
    pub closed_form_consistent: Option<bool>,
    /// `2^R <= k_m <= k^R` on every window tuple.
    pub k_m_bounds_hold: bool,
    /// Largest `k_m` over the window; `rho_m = k_m / B_R`, so this also
    /// gives the largest `rho_m`.
    pub k_m_max: Rational,
    /// `max rho_m = k_m_max / B_R`, absent when `B_R = 0`.
    pub rho_max: Option<Rational>,
    /// `rho_m < k_m` for every tuple, i.e. `B_R > 1`.
    pub rho_below_k_m: bool,
    /// Some `v~_n` vanished on every path, so the weighted sum is empty.
    pub degenerate: bool,
    /// Window tuples of length `R` visited.
    pub tuples: u64,
}

/// Cap on window nodes visited by [`s0_section11`].
pub const REFINED_NODE_CAP: u64 = 5_000_000;

struct Walk<'a> {
    k: u64,
    r: u64,
    rr: usize,
    phi: &'a [Rational],
    phi_prefix: Vec<Rational>,
    mphi_prefix: Vec<Rational>,
    b_n: Vec<Rational>,
    a_n: Vec<Rational>,
    nodes: u64,
    tuples: u64,
    bounds_ok: bool,
    k_m_max: Rational,
    lo_bound: Rational,
    hi_bound: Rational,
}

impl Walk<'_> {
    fn window(&self, a: &Rational, b: &Rational) -> usize {
        // v~ = floor(r b / (a + b)), capped at r so phi_m stays defined.
        let u = Rational::from(self.r) * b / (a + b);
        u.floor().to_u64().unwrap_or(0).min(self.r) as usize
    }

    fn go(&mut self, depth: usize, a: Rational, b: Rational, w: Rational) -> Result<()> {
        self.nodes += 1;
        if self.nodes > REFINED_NODE_CAP {
            return Err(Error::BudgetExceeded { estimate: self.nodes as u128, cap: REFINED_NODE_CAP as u128 });
        }
        let v = self.window(&a, &b);
        if v == 0 {
            return Ok(());
        }
        let kq = Rational::from(self.k);
        if depth + 1 == self.rr {
            // Last level in closed form: sum_{m<v} phi_m ((k-m) b - m a).
            let contrib = &kq * &b * &self.phi_prefix[v] - (&a + &b) * &self.mphi_prefix[v];
            self.b_n[depth] += &w * contrib;
            self.a_n[depth] += &w * &b * &self.phi_prefix[v];
            self.tuples += v as u64;
            // b~_R is decreasing in m, so the extremes are m = 0 and m = v - 1.
            let top = &kq * &b;
            let bottom = Rational::from(self.k - (v as u64 - 1)) * &b - Rational::from(v as u64 - 1) * &a;
            self.bounds_ok &= bottom >= self.lo_bound && top <= self.hi_bound;
            if top > self.k_m_max {
                self.k_m_max = top;
            }
            return Ok(());
        }
        for mi in 0..v {
            let m = Rational::from(mi as u64);
            let nb = Rational::from(self.k - mi as u64) * &b - &m * &a;
            let nw = &w * &self.phi[mi];
            self.b_n[depth] += &nw * &nb;
            self.a_n[depth] += &nw * &b;
            self.go(depth + 1, b.clone(), nb, nw)?;
        }
        Ok(())
    }
}

/// The refined `s_0^R` and the lower bound chain around it.
pub fn s0_section11(k: u64, s: u64, rr: u32) -> Result<RefinedReport> {
    if k < 8 {
        return Err(Error::KTooSmall { k, min: 8 });
    }
    if rr == 0 {
        return Err(Error::Precondition("R must be at least 1".into()));
    }
    let l = ell(k);
    let r = k - l;
    let w = phi_weights(r, s)?;
    let mut phi_prefix = vec![Rational::zero()];
    let mut mphi_prefix = vec![Rational::zero()];
    for (m, p) in w.phi.iter().enumerate() {
        phi_prefix.push(&phi_prefix[m] + p);
        mphi_prefix.push(&mphi_prefix[m] + Rational::from(m as u64) * p);
    }
    let mut walk = Walk {
        k,
        r,
        rr: rr as usize,
        phi: &w.phi,
        phi_prefix,
        mphi_prefix,
        b_n: vec![Rational::zero(); rr as usize],
        a_n: vec![Rational::zero(); rr as usize],
        nodes: 0,
        tuples: 0,
        bounds_ok: true,
        k_m_max: Rational::zero(),
        lo_bound: Rational::from(num_traits::pow(BigInt::from(2), rr as usize)),
        hi_bound: Rational::from(num_traits::pow(BigInt::from(k), rr as usize)),
    };
    walk.go(0, Rational::new(1, l)?, Rational::one(), Rational::one())?;
    let b_tilde = refined_b_tilde(k, s, rr, DEFAULT_BITS)?;
    let mut lower_bound_holds = Vec::new();
    for (n, bn) in walk.b_n.iter().enumerate() {
        let verdict = refine(DEFAULT_BITS, |bits| {
            let bt = &refined_b_tilde(k, s, n as u32 + 1, bits).ok()?[n];
            match bt.cmp_rat(bn) {
                Cmp::Less | Cmp::Equal => Some(true),
                Cmp::Greater => Some(false),
                Cmp::Indeterminate => None,
            }
        });
        lower_bound_holds.push(verdict.ok());
    }
    let sr = Rational::from(s).pow(rr);
    let s0_pow_r = &sr * &walk.b_n[rr as usize - 1];
    if s0_pow_r.is_negative() {
        return Err(Error::Hypothesis("s_0^R is negative".into()));
    }
    let s0 = CertInterval::root(&s0_pow_r, rr, DEFAULT_BITS);
    let b_last = &walk.b_n[rr as usize - 1];
    let rho_max = (!b_last.is_zero()).then(|| &walk.k_m_max / b_last);
    let rho_below_k_m = *b_last > Rational::one();
    let closed_form = refined_closed_form(k, rr, DEFAULT_BITS);
    let closed_form_consistent = closed_form
        .as_ref()
        .map(|cf| cf.intersect(&b_tilde[rr as usize - 1].mul_rat(&sr)).is_some());
    let lo = Rational::from(k * (k + 1) / 2) - Rational::from(3 * k);
    let hi = t13_bound(k, DEFAULT_BITS)?;
    let in_window = Rational::from(s + r) >= lo && BigInt::from(s + r) <= hi;
    Ok(RefinedReport {
        k,
        s,
        r,
        ell: l,
        big_r: rr,
        in_window,
        b_n: walk.b_n,
        a_n: walk.a_n,
        b_tilde,
        lower_bound_holds,
        s0_pow_r,
        s0,
        closed_form,
        closed_form_consistent,
        k_m_bounds_hold: walk.bounds_ok,
        rho_below_k_m,
        degenerate: walk.tuples == 0,
        k_m_max: walk.k_m_max,
        rho_max,
        tuples: walk.tuples,
    })
}

/// Outcome of the refined-iteration lemmas at one `(b, m, h)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinedPoint {
    /// `1 <= m_n <= u~_n - 1` and `0 <= h_n <= 15 k^R b`.
    pub in_hypothesis: bool,
    /// `k_m b <= b_R <= k_m b + 16 k^(2R) b` and `a_R <= b_R / l`.
    pub sandwich: Option<bool>,
    /// `0 <= u~_n <= u_n` for every `n` (needs only `h_n <= 16 k^R b`).
    pub u_monotone: Option<bool>,
}

/// Check the refined sandwich and the `u~ <= u` comparison at one point.
pub fn refined_point(k: u64, b: &BigInt, m: &[u64], h: &[BigInt]) -> Result<RefinedPoint> {
    let l = ell(k);
    let r = k - l;
    let rr = m.len();
    let t = tilde_sequence(k, r, m, Flavor::EllK)?;
    let seq = iterate_ab(k, r, b, m, h, Flavor::EllK)?;
    let kr = num_traits::pow(BigInt::from(k), rr);
    let m_ok = m.iter().zip(&t.v).all(|(&mn, vn)| mn >= 1 && BigInt::from(mn) < *vn);
    let h_ok = h.iter().all(|x| !x.is_negative() && *x <= BigInt::from(15) * &kr * b);
    let in_hypothesis = m_ok && h_ok;
    let br = Rational::from(b.clone());
    let b_r = Rational::from(seq.b[rr].clone());
    let a_r = Rational::from(seq.a[rr].clone());
    let sandwich = in_hypothesis.then(|| {
        let km = t.k_m.rat() * &br;
        let slack = Rational::from(BigInt::from(16) * &kr * &kr * b);
        km <= b_r && b_r <= &km + &slack && a_r <= &b_r / Rational::from(l)
    });
    let h16 = h.iter().all(|x| !x.is_negative() && *x <= BigInt::from(16) * &kr * b);
    let u_monotone = h16.then(|| {
        (0..rr).all(|n| {
            let ut = t.u[n].rat();
            let denom = &seq.a[n] + &seq.b[n];
            if !denom.is_positive() {
                return false;
            }
            let un = Rational::new(BigInt::from(r) * &seq.b[n], denom).unwrap();
            !ut.is_negative() && ut <= &un
        })
    });
    Ok(RefinedPoint { in_hypothesis, sandwich, u_monotone })
}

/// One grid point for [`refined_audit`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub m: Vec<u64>,
    pub h: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub point: GridPoint,
    pub what: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinedAudit {
    pub k: u64,
    pub big_r: u32,
    pub b: BigInt,
    pub checked: u64,
    pub skipped: u64,
    pub violations: Vec<Violation>,
}

/// Run [`refined_point`] over a grid in parallel; the report keeps grid order.
pub fn refined_audit(k: u64, b: &BigInt, grid: &[GridPoint]) -> Result<RefinedAudit> {
    use rayon::prelude::*;
    let big_r = grid.first().map_or(0, |p| p.m.len() as u32);
    let outcomes: Vec<Result<RefinedPoint>> = grid.par_iter().map(|p| refined_point(k, b, &p.m, &p.h)).collect();
    let mut audit = RefinedAudit { k, big_r, b: b.clone(), checked: 0, skipped: 0, violations: Vec::new() };
    for (p, o) in grid.iter().zip(outcomes) {
        let o = o?;
        if o.u_monotone == Some(false) {
            audit.violations.push(Violation { point: p.clone(), what: "u~_n <= u_n".into() });
        }
        match o.sandwich {
            None => audit.skipped += 1,
            Some(ok) => {
                audit.checked += 1;
                if !ok {
                    audit.violations.push(Violation { point: p.clone(), what: "refined sandwich".into() });
                }
            }
        }
    }
    Ok(audit)
}

/// Every `m` with `1 <= m_n <= v~_n - 1` (refined window), up to `cap` tuples.
pub fn refined_window_tuples(k: u64, rr: usize, cap: usize) -> Result<Vec<Vec<u64>>> {
    let l = Rational::from(ell(k));
    let r = k - ell(k);
    let mut out = Vec::new();
    let mut stack = vec![(Vec::<u64>::new(), Rational::one() / l, Rational::one())];
    while let Some((m, a, b)) = stack.pop() {
        if m.len() == rr {
            out.push(m);
            if out.len() > cap {
                return Err(Error::BudgetExceeded { estimate: out.len() as u128, cap: cap as u128 });
            }
            continue;
        }
        let v = (Rational::from(r) * &b / (&a + &b)).floor().to_u64().unwrap_or(0).min(r);
        for mi in (1..v).rev() {
            let nb = Rational::from(k - mi) * &b - Rational::from(mi) * &a;
            let mut next = m.clone();
            next.push(mi);
            stack.push((next, b.clone(), nb));
        }
    }
    Ok(out)
}

/// The three constant offset vectors `0`, `max/2`, `max` with `max = 15 k^R b`.
pub fn constant_offsets(k: u64, rr: usize, b: &BigInt) -> [Vec<BigInt>; 3] {
    let max = BigInt::from(15) * num_traits::pow(BigInt::from(k), rr) * b;
    let half = &max / 2;
    [vec![BigInt::zero(); rr], vec![half; rr], vec![max; rr]]
}

/// Exhaustive window tuples times the constant offsets.
pub fn refined_exhaustive_grid(k: u64, rr: usize, b: &BigInt, cap: usize) -> Result<Vec<GridPoint>> {
    let hs = constant_offsets(k, rr, b);
    Ok(refined_window_tuples(k, rr, cap)?
        .into_iter()
        .flat_map(|m| hs.iter().map(move |h| GridPoint { m: m.clone(), h: h.clone() }))
        .collect())
}

/// `count` seeded random points: each `m_n` uniform in `[1, v~_n - 1]` given
/// the prefix, each `h_n` uniform in `[0, 15 k^R b]`. Stops a tuple early and
/// redraws if the window empties.
pub fn refined_random_grid(k: u64, rr: usize, b: &BigInt, count: usize, seed: u64) -> Vec<GridPoint> {
    use num_bigint::RandBigInt;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let l = Rational::from(ell(k));
    let r = k - ell(k);
    let max = BigInt::from(15) * num_traits::pow(BigInt::from(k), rr) * b;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 100 {
        attempts += 1;
        let (mut a, mut bt) = (Rational::one() / &l, Rational::one());
        let mut m = Vec::with_capacity(rr);
        for _ in 0..rr {
            let v = (Rational::from(r) * &bt / (&a + &bt)).floor().to_u64().unwrap_or(0).min(r);
            if v < 2 {
                break;
            }
            let mi = rng.gen_range(1..v);
            let nb = Rational::from(k - mi) * &bt - Rational::from(mi) * &a;
            a = std::mem::replace(&mut bt, nb);
            m.push(mi);
        }
        if m.len() < rr {
            continue;
        }
        let h = (0..rr).map(|_| rng.gen_bigint_range(&BigInt::zero(), &(&max + 1))).collect();
        out.push(GridPoint { m, h });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_examples() {
        let w = phi_weights(2, 6).unwrap();
        assert_eq!(w.phi_star, Rational::frac(2, 3));
        assert_eq!(w.phi, vec![Rational::frac(2, 15), Rational::frac(1, 5)]);
        let w = phi_weights(1, 2).unwrap();
        assert_eq!(w.phi_star, Rational::frac(1, 2));
        assert_eq!(w.phi, vec![Rational::frac(1, 2)]);
        assert!(phi_weights(3, 3).is_err());
    }

    #[test]
    fn bn_example_4_2_6() {
        let t = bn_table(4, 2, 6, 3).unwrap();
        assert_eq!(t.rows[0].b, QuadExt::rational(4, Rational::frac(31, 30)).unwrap());
        assert_eq!(t.rows[1].b, QuadExt::rational(4, Rational::frac(497, 450)).unwrap());
        assert_eq!(t.rows[0].a, QuadExt::rational(4, Rational::frac(1, 3)).unwrap());
        assert_eq!(t.closed_form_agrees, Some(true));
    }

    #[test]
    fn bn_irrational_sqrt_k() {
        let t = bn_table(7, 3, 17, 6).unwrap();
        assert!(!t.rows[0].b.is_rational());
        assert_eq!(t.closed_form_agrees, Some(true));
    }

    #[test]
    fn min_valid_r_tracks_theta() {
        assert!(min_valid_r(4, 2, 6, 50).unwrap().is_some());
        assert_eq!(min_valid_r(4, 2, 7, 50).unwrap(), None);
    }

    #[test]
    fn root_quotients_small() {
        // x^2 - 3x + 2: roots 2, 1; U_n = 2^n - 1.
        let u = root_power_quotients(&Rational::from(3), &Rational::from(1), 5).unwrap();
        let want: Vec<Rational> = (0..=5).map(|n| Rational::from((1i64 << n) - 1)).collect();
        assert_eq!(u, want);
        // x^2 - x - 1 (Fibonacci): disc 5.
        let u = root_power_quotients(&Rational::one(), &Rational::from(5), 10).unwrap();
        assert_eq!(u[10], Rational::from(55));
    }

    #[test]
    fn tilde_refined_first_window() {
        let t = tilde_sequence(27, 24, &[0], Flavor::EllK).unwrap();
        assert_eq!(t.u[0].rat(), &Rational::from(18));
        assert_eq!(t.v[0], BigInt::from(18));
    }

    #[test]
    fn growth_k9() {
        let m = [2, 0, 1, 2, 1, 0];
        let h = vec![BigInt::zero(); 6];
        let s = iterate_ab(9, 3, &BigInt::from(100), &m, &h, Flavor::SqrtK).unwrap();
        assert_eq!(s.checks.growth, Some(true));
        assert_eq!(s.checks.sandwich, Some(true));
        for n in 0..6 {
            assert!(s.b[n + 1] > BigInt::from(3) * &s.b[n]);
        }
    }

    #[test]
    fn kernel() {
        let c = offset_kernel(9, &[1, 2, 2], 1);
        // c_{1,1} = 1, c_{2,1} = 7, c_{3,1} = 7*7 - 2*1 = 47
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(7), BigInt::from(47)]);
        assert!(offset_kernel_grows(9, &[1, 2, 2]));
    }

    #[test]
    fn refined_s0_k27() {
        let rep = s0_section11(27, 273, 2).unwrap();
        assert!(rep.in_window);
        assert!(rep.lower_bound_holds.iter().all(|x| *x == Some(true)));
        assert!(rep.k_m_bounds_hold);
        assert_eq!(rep.closed_form_consistent, Some(true));
    }
}
