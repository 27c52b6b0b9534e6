//! Exact counts for the Vinogradov system
//! `x_1^j + ... + x_s^j = y_1^j + ... + y_s^j` (`1 <= j <= k`, `1 <= x_i, y_i <= X`).
//!
//! `J_{s,k}(X) = sum_v N_s(v)^2`, where `N_s(v)` counts `s`-tuples with power-sum
//! profile `v`. The census `N_s` is built by repeated single-variable
//! convolution; the meet-in-the-middle strategy instead pairs difference
//! censuses of the two halves. A brute-force pair enumeration serves as the
//! independent oracle on tiny instances.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};

/// Power sums `(sum x_i, sum x_i^2, ..., sum x_i^k)`.
pub type Profile = Vec<i64>;

/// Default memory ceiling for a census, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 8 << 30;

/// Oracle cap on `X^(2s)`.
pub const ORACLE_CAP: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// `s` successive single-variable convolutions.
    Convolve,
    /// Difference censuses of `ceil(s/2)` and `floor(s/2)` variables.
    MeetInMiddle,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convolve" | "direct" => Ok(Strategy::Convolve),
            "meet_in_middle" | "mitm" => Ok(Strategy::MeetInMiddle),
            _ => Err(Error::Precondition(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileCensus {
    pub s: u32,
    pub k: u32,
    pub x: u64,
    pub table: FxHashMap<Profile, u128>,
}

fn check_args(s: u32, k: u32, x: u64) -> Result<()> {
    if s == 0 || k == 0 || x == 0 {
        return Err(Error::Precondition("need s, k, X >= 1".into()));
    }
    Ok(())
}

fn powers(k: u32, x: u64) -> Result<Profile> {
    let mut out = Vec::with_capacity(k as usize);
    let mut p: i64 = 1;
    for _ in 0..k {
        p = p.checked_mul(x as i64).ok_or_else(|| Error::Overflow(format!("{x}^{k} exceeds 64 bits")))?;
        out.push(p);
    }
    Ok(out)
}

/// Upper bound on the number of distinct profiles of `s` variables,
/// `min(prod_j (s X^j - s + 1), X^s)`.
pub fn profile_bound(s: u32, k: u32, x: u64) -> u128 {
    let mut prod: u128 = 1;
    let mut xp: u128 = 1;
    for _ in 0..k {
        xp = xp.saturating_mul(x as u128);
        prod = prod.saturating_mul((s as u128).saturating_mul(xp.saturating_sub(1)).saturating_add(1));
    }
    prod.min((x as u128).saturating_pow(s))
}

/// Bytes per map entry: key vector, heap header, count, hash slack.
fn entry_bytes(k: u32) -> u128 {
    8 * k as u128 + 24 + 16 + 16
}

/// Pre-flight memory estimate for a strategy, in bytes. Independent of the
/// thread count so that refusals are reproducible; the factor 3 covers the
/// previous table, the new one and the partial tables being merged.
pub fn memory_estimate(s: u32, k: u32, x: u64, strategy: Strategy) -> u128 {
    match strategy {
        Strategy::Convolve => profile_bound(s, k, x).saturating_mul(entry_bytes(k)).saturating_mul(3),
        Strategy::MeetInMiddle => {
            let a = s.div_ceil(2);
            // Differences of two a-tuples: each coordinate spans 2a(X^j - 1) + 1.
            let mut prod: u128 = 1;
            let mut xp: u128 = 1;
            for _ in 0..k {
                xp = xp.saturating_mul(x as u128);
                prod = prod.saturating_mul((2 * a as u128).saturating_mul(xp - 1).saturating_add(1));
            }
            let diffs = prod.min((x as u128).saturating_pow(2 * a));
            diffs.saturating_mul(entry_bytes(k)).saturating_mul(3)
        }
    }
}

fn check_memory(s: u32, k: u32, x: u64, strategy: Strategy, budget: u64) -> Result<()> {
    let estimate = memory_estimate(s, k, x, strategy);
    if estimate > budget as u128 {
        return Err(Error::MemoryBudget { estimate, budget: budget as u128 });
    }
    Ok(())
}

fn merge(mut a: FxHashMap<Profile, u128>, b: FxHashMap<Profile, u128>) -> Result<FxHashMap<Profile, u128>> {
    let (mut big, small) = if a.len() >= b.len() { (std::mem::take(&mut a), b) } else { (b, a) };
    for (key, c) in small {
        let e = big.entry(key).or_insert(0);
        *e = e.checked_add(c).ok_or_else(|| Error::Overflow("census count exceeds 128 bits".into()))?;
    }
    Ok(big)
}

// One convolution step, partitioned on the new variable's value.
fn convolve_step(prev: &FxHashMap<Profile, u128>, k: u32, x: u64) -> Result<FxHashMap<Profile, u128>> {
    let pw: Vec<Profile> = (1..=x).map(|v| powers(k, v)).collect::<Result<_>>()?;
    let entries: Vec<(&Profile, &u128)> = prev.iter().collect();
    (0..pw.len())
        .into_par_iter()
        .fold(
            || Ok(FxHashMap::default()),
            |acc: Result<FxHashMap<Profile, u128>>, i| {
                let mut acc = acc?;
                let p = &pw[i];
                for (key, &c) in &entries {
                    let mut nk = Vec::with_capacity(k as usize);
                    for (a, b) in key.iter().zip(p) {
                        nk.push(a.checked_add(*b).ok_or_else(|| Error::Overflow("power sum exceeds 64 bits".into()))?);
                    }
                    *acc.entry(nk).or_insert(0) += c;
                }
                Ok(acc)
            },
        )
        .try_reduce(FxHashMap::default, merge)
}

/// `N_s` within `budget` bytes.
pub fn census_with_budget(s: u32, k: u32, x: u64, budget: u64) -> Result<ProfileCensus> {
    check_args(s, k, x)?;
    check_memory(s, k, x, Strategy::Convolve, budget)?;
    let mut table: FxHashMap<Profile, u128> = FxHashMap::default();
    table.insert(vec![0; k as usize], 1);
    for _ in 0..s {
        table = convolve_step(&table, k, x)?;
    }
    Ok(ProfileCensus { s, k, x, table })
}

pub fn census(s: u32, k: u32, x: u64) -> Result<ProfileCensus> {
    census_with_budget(s, k, x, DEFAULT_MEMORY_BUDGET)
}

impl ProfileCensus {
    /// `sum N(v)`, which must equal `X^s`.
    pub fn mass(&self) -> BigInt {
        self.table.values().map(|&c| BigInt::from(c)).sum()
    }

    /// `sum N(v)^2`.
    pub fn sum_of_squares(&self) -> BigInt {
        sum_products(self.table.values().map(|&c| (c, c)))
    }

    /// Entries sorted by profile.
    pub fn sorted(&self) -> Vec<(&Profile, u128)> {
        let mut v: Vec<_> = self.table.iter().map(|(p, &c)| (p, c)).collect();
        v.sort();
        v
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (1..=self.k).map(|j| format!("j{j}")).collect();
        writeln!(w, "{},count", header.join(","))?;
        for (p, c) in self.sorted() {
            let cols: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            writeln!(w, "{},{c}", cols.join(","))?;
        }
        Ok(())
    }

    /// Binary cache: magic, version, `s`, `k`, `X`, entry count, then each
    /// entry as `k` profile components followed by the count. All integers
    /// are little-endian; components and counts are length-prefixed
    /// (`u32` byte length, two's complement bytes).
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.s.to_le_bytes())?;
        w.write_all(&self.k.to_le_bytes())?;
        w.write_all(&self.x.to_le_bytes())?;
        w.write_all(&(self.table.len() as u64).to_le_bytes())?;
        for (p, c) in self.sorted() {
            for comp in p {
                write_big(&mut w, &BigInt::from(*comp))?;
            }
            write_big(&mut w, &BigInt::from(c))?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format("bad census cache magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CACHE_VERSION {
            return Err(Error::Format(format!("unsupported census cache version {version}")));
        }
        let s = read_u32(&mut r)?;
        let k = read_u32(&mut r)?;
        let x = read_u64(&mut r)?;
        let n = read_u64(&mut r)?;
        let mut table = FxHashMap::default();
        for _ in 0..n {
            let mut p = Vec::with_capacity(k as usize);
            for _ in 0..k {
                p.push(read_big(&mut r)?.to_i64().ok_or_else(|| Error::Format("profile component too large".into()))?);
            }
            let c = read_big(&mut r)?.to_u128().ok_or_else(|| Error::Format("count out of range".into()))?;
            table.insert(p, c);
        }
        Ok(ProfileCensus { s, k, x, table })
    }
}

const CACHE_MAGIC: &[u8; 8] = b"VMVTCNS\0";
const CACHE_VERSION: u32 = 1;

fn write_big<W: Write>(w: &mut W, x: &BigInt) -> Result<()> {
    let bytes = x.to_signed_bytes_le();
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(&bytes)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_big<R: Read>(r: &mut R) -> Result<BigInt> {
    let len = read_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(Error::Format("length prefix too large".into()));
    }
    let mut b = vec![0u8; len];
    r.read_exact(&mut b)?;
    Ok(BigInt::from_signed_bytes_le(&b))
}

// sum of a*b, in u128 while it fits.
fn sum_products(it: impl Iterator<Item = (u128, u128)>) -> BigInt {
    let mut small: u128 = 0;
    let mut big = BigInt::zero();
    for (a, b) in it {
        match a.checked_mul(b).and_then(|p| small.checked_add(p)) {
            Some(v) => small = v,
            None => big += BigInt::from(a) * BigInt::from(b),
        }
    }
    big + BigInt::from(small)
}

// D(d) = #{(u, w) : P(u) - P(w) = d} from a census.
fn difference_census(c: &ProfileCensus) -> FxHashMap<Profile, u128> {
    let entries: Vec<(&Profile, u128)> = c.sorted();
    entries
        .par_iter()
        .fold(FxHashMap::default, |mut acc: FxHashMap<Profile, u128>, (u, cu)| {
            for (w, cw) in &entries {
                let d: Profile = u.iter().zip(w.iter()).map(|(a, b)| a - b).collect();
                *acc.entry(d).or_insert(0) += cu * cw;
            }
            acc
        })
        .reduce(FxHashMap::default, |a, b| merge(a, b).expect("difference counts fit 128 bits"))
}

/// Both halves of a meet-in-the-middle computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfCensuses {
    pub first: ProfileCensus,
    pub second: ProfileCensus,
}

pub fn half_censuses(s: u32, k: u32, x: u64) -> Result<HalfCensuses> {
    check_args(s, k, x)?;
    let a = s.div_ceil(2);
    let first = census(a, k, x)?;
    let second = if s / 2 == a {
        first.clone()
    } else if s / 2 == 0 {
        let mut t = FxHashMap::default();
        t.insert(vec![0; k as usize], 1);
        ProfileCensus { s: 0, k, x, table: t }
    } else {
        census(s / 2, k, x)?
    };
    Ok(HalfCensuses { first, second })
}

/// `J_{s,k}(X)` by the chosen strategy within `budget` bytes.
pub fn j_with(s: u32, k: u32, x: u64, strategy: Strategy, budget: u64) -> Result<BigInt> {
    check_args(s, k, x)?;
    check_memory(s, k, x, strategy, budget)?;
    match strategy {
        Strategy::Convolve => Ok(census_with_budget(s, k, x, budget)?.sum_of_squares()),
        Strategy::MeetInMiddle => {
            // x_a + x_b = y_a + y_b  <=>  P(x_a) - P(y_a) = P(y_b) - P(x_b).
            let h = half_censuses(s, k, x)?;
            let da = difference_census(&h.first);
            let db = if h.first.s == h.second.s { None } else { Some(difference_census(&h.second)) };
            let db = db.as_ref().unwrap_or(&da);
            let mut keys: Vec<&Profile> = da.keys().collect();
            keys.sort();
            // D is symmetric under d -> -d, so D_b(-d) = D_b(d).
            Ok(sum_products(keys.into_iter().filter_map(|d| db.get(d).map(|&c| (da[d], c)))))
        }
    }
}

pub fn j(s: u32, k: u32, x: u64) -> Result<BigInt> {
    j_with(s, k, x, Strategy::Convolve, DEFAULT_MEMORY_BUDGET)
}

/// Brute force over every pair `(x, y)`; requires `X^(2s) <= 10^8`.
pub fn j_oracle(s: u32, k: u32, x: u64) -> Result<BigInt> {
    check_args(s, k, x)?;
    let pairs = (x as u128).saturating_pow(2 * s);
    if pairs > ORACLE_CAP {
        return Err(Error::BudgetExceeded { estimate: pairs, cap: ORACLE_CAP });
    }
    let n = (x as usize).pow(s);
    let kk = k as usize;
    // Row i holds the power sums of the i-th s-tuple in lexicographic order.
    let mut flat = vec![0i64; n * kk];
    for i in 0..n {
        let mut rest = i;
        for _ in 0..s {
            let v = (rest % x as usize) as i64 + 1;
            rest /= x as usize;
            let mut p = 1i64;
            for j in 0..kk {
                p *= v;
                flat[i * kk + j] += p;
            }
        }
    }
    let count: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = &flat[i * kk..(i + 1) * kk];
            flat.chunks_exact(kk).filter(|other| *other == row).count() as u64
        })
        .sum();
    Ok(BigInt::from(count))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalReport {
    pub s: u32,
    pub k: u32,
    pub x: u64,
    #[serde(serialize_with = "crate::ser_big")]
    pub lower: BigInt,
    #[serde(serialize_with = "crate::ser_big")]
    pub j: BigInt,
    #[serde(serialize_with = "crate::ser_big")]
    pub upper: BigInt,
    pub holds: bool,
    /// `J / X^s` to six decimals.
    pub ratio: String,
}

/// `X^s <= J <= X^(2s)`.
pub fn diagonal_bounds(s: u32, k: u32, x: u64, j: &BigInt) -> DiagonalReport {
    let lower = num_traits::pow(BigInt::from(x), s as usize);
    let upper = &lower * &lower;
    let holds = &lower <= j && j <= &upper;
    let ratio = crate::arith::Rational::new(j.clone(), lower.clone())
        .map(|q| q.to_decimal(6, crate::arith::Round::Nearest))
        .unwrap_or_default();
    DiagonalReport { s, k, x, lower, j: j.clone(), upper, holds, ratio }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SlopeVerdict {
    Consistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeReport {
    pub s: u32,
    pub k: u32,
    pub xs: Vec<u64>,
    pub js: Vec<String>,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    pub verdict: SlopeVerdict,
}

pub const DEFAULT_SLOPE_TOLERANCE: f64 = 0.35;

/// Least-squares slope of `log J` against `log X`. Diagnostic only.
pub fn slope_fit(s: u32, k: u32, xs: &[u64], js: &[BigInt], tolerance: f64) -> Result<SlopeReport> {
    if xs.len() < 3 || xs.len() != js.len() {
        return Err(Error::Precondition("need at least three points".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("X values must be strictly increasing".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|&x| (x as f64).ln()).collect();
    let ly: Vec<f64> = js.iter().map(|j| ln_big(j)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = lx.iter().zip(&ly).map(|(a, b)| b - (intercept + slope * a)).collect();
    let verdict = if slope <= s as f64 + tolerance { SlopeVerdict::Consistent } else { SlopeVerdict::Inconclusive };
    Ok(SlopeReport { s, k, xs: xs.to_vec(), js: js.iter().map(|j| j.to_string()).collect(), slope, intercept, residuals, tolerance, verdict })
}

pub fn slope_estimate(s: u32, k: u32, xs: &[u64], tolerance: f64) -> Result<SlopeReport> {
    if xs.len() < 3 {
        return Err(Error::Precondition("need at least three points".into()));
    }
    let js: Vec<BigInt> = xs.iter().map(|&x| j(s, k, x)).collect::<Result<_>>()?;
    slope_fit(s, k, xs, &js, tolerance)
}

fn ln_big(x: &BigInt) -> f64 {
    // Keep 60 leading bits and add the shifted exponent back.
    let bits = x.bits();
    if bits <= 60 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    (x >> shift as usize).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `2X^2 - X`: for `s = 2`, `k >= 2` the system forces `{x} = {y}`.
pub fn j_two_closed(x: u64) -> BigInt {
    let x = BigInt::from(x);
    BigInt::from(2) * &x * &x - x
}

/// `J(s, k, 1) = 1` and `J(1, k, X) = X`.
pub fn j_trivial(s: u32, x: u64) -> Option<BigInt> {
    if x == 1 {
        Some(BigInt::one())
    } else if s == 1 {
        Some(BigInt::from(x))
    } else {
        None
    }
}
