//! The auxiliary congruence systems
//! `sum_i (z_i - eta)^j = m_j (mod p^(jb))`, `1 <= j <= k`, their
//! equivalence classes modulo `p^level`, and the `k!` class bound.
//!
//! Levels are exponents: "level `L`" means classes of `z` modulo `p^L`
//! componentwise. The lemma's maximal level for `n = m + 1` variables is
//! `(k - m) b - m a`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{binomial, factorial, prime_factors, Rational};
use crate::error::{Error, Result};

/// Hard cap on tuples visited by an enumeration.
pub const ENUMERATION_CAP: u128 = 100_000_000;

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e).ok_or_else(|| Error::Overflow(format!("{p}^{e} exceeds 64 bits")))
}

/// `Xi_c^m(xi)`: `m`-tuples in `[1, p^(c+1)]`, each `= xi (mod p^c)`,
/// pairwise distinct modulo `p^(c+1)`. For `c = 0` pass `xi = 0`.
pub fn xi_set(c: u32, m: u32, xi: u64, p: u64) -> Result<Vec<Vec<u64>>> {
    let pc = pow(p, c)?;
    let top = pc * p;
    if c >= 1 && (xi < 1 || xi > pc) {
        return Err(Error::Precondition(format!("need 1 <= xi <= p^c = {pc}")));
    }
    if c == 0 && xi != 0 {
        return Err(Error::Precondition("for c = 0 use xi = 0".into()));
    }
    let base: Vec<u64> = (1..=top).filter(|v| (v % pc) == (xi % pc)).collect();
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t: Vec<u64>| {
                base.iter()
                    .filter(|&&v| t.iter().all(|&u| u % top != v % top))
                    .map(|&v| [t.clone(), vec![v]].concat())
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(out)
}

/// One congruence system: prime `p > k`, `0 <= a < b`, `n` variables,
/// residues `xi`, `eta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceInstance {
    pub p: u64,
    pub k: u32,
    pub a: u32,
    pub b: u32,
    pub n: u32,
    pub xi: u64,
    pub eta: u64,
}

impl CongruenceInstance {
    pub fn new(p: u64, k: u32, a: u32, b: u32, n: u32, xi: u64, eta: u64) -> Result<Self> {
        if !is_prime(p) || p <= k as u64 {
            return Err(Error::Precondition(format!("need a prime p > k, got p = {p}, k = {k}")));
        }
        if a >= b || n == 0 || k == 0 {
            return Err(Error::Precondition("need 0 <= a < b, n >= 1, k >= 1".into()));
        }
        let pb = pow(p, b)?;
        if eta < 1 || eta > pb {
            return Err(Error::Precondition(format!("need 1 <= eta <= p^b = {pb}")));
        }
        if a == 0 {
            if xi != 0 {
                return Err(Error::Precondition("for a = 0 use xi = 0".into()));
            }
        } else {
            let pa = pow(p, a)?;
            if xi < 1 || xi > pa {
                return Err(Error::Precondition(format!("need 1 <= xi <= p^a = {pa}")));
            }
            if xi % p == eta % p {
                return Err(Error::Precondition("need eta != xi (mod p)".into()));
            }
        }
        pow(p, k * b * n)?;
        Ok(CongruenceInstance { p, k, a, b, n, xi, eta })
    }

    /// The side conditions on a single coordinate `z` in `[1, p^(kb)]`.
    fn coordinate_ok(&self, z: u64) -> bool {
        if self.a == 0 {
            z % self.p != self.eta % self.p
        } else {
            let pa = self.p.pow(self.a);
            z % pa == self.xi % pa
        }
    }

    /// Distinctness modulus `p^(a+1)`.
    fn distinct_mod(&self) -> u64 {
        self.p.pow(self.a + 1)
    }

    fn moduli(&self) -> Vec<u64> {
        (1..=self.k).map(|j| self.p.pow(j * self.b)).collect()
    }

    /// `sum_i (z_i - eta)^j mod p^(jb)` for `j = 1..k`.
    pub fn m_vector(&self, z: &[u64]) -> Vec<u64> {
        let top = self.p.pow(self.k * self.b) as u128;
        self.moduli()
            .iter()
            .enumerate()
            .map(|(j, &md)| {
                let md = md as u128;
                let mut acc = 0u128;
                for &zi in z {
                    let y = ((zi as u128 + top - (self.eta as u128 % top)) % top) % md;
                    let mut pw = 1u128;
                    for _ in 0..=j {
                        pw = pw * y % md;
                    }
                    acc = (acc + pw) % md;
                }
                acc as u64
            })
            .collect()
    }

    fn tuples_estimate(&self) -> u128 {
        let per = self.p.pow(self.k * self.b) as u128;
        per.saturating_pow(self.n)
    }

    /// Every `z` satisfying the side conditions, in lexicographic order.
    fn admissible(&self) -> Result<Vec<Vec<u64>>> {
        let est = self.tuples_estimate();
        if est > ENUMERATION_CAP {
            return Err(Error::BudgetExceeded { estimate: est, cap: ENUMERATION_CAP });
        }
        let top = self.p.pow(self.k * self.b);
        let dm = self.distinct_mod();
        let cands: Vec<u64> = (1..=top).filter(|&z| self.coordinate_ok(z)).collect();
        let mut out = vec![vec![]];
        for _ in 0..self.n {
            let mut next = Vec::new();
            for t in out {
                for &z in &cands {
                    if t.iter().all(|&u: &u64| u % dm != z % dm) {
                        let mut v = t.clone();
                        v.push(z);
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// All solutions `z` for the vector `m` (entries reduced modulo `p^(jb)`).
pub fn enumerate_b(inst: &CongruenceInstance, m: &[u64]) -> Result<Vec<Vec<u64>>> {
    if m.len() != inst.k as usize {
        return Err(Error::Precondition("m must have k entries".into()));
    }
    let target: Vec<u64> = m.iter().zip(inst.moduli()).map(|(&x, md)| x % md).collect();
    Ok(inst.admissible()?.into_iter().filter(|z| inst.m_vector(z) == target).collect())
}

/// Number of classes of `enumerate_b` modulo `p^level`.
pub fn class_count(inst: &CongruenceInstance, m: &[u64], level: u32) -> Result<u64> {
    let md = pow(inst.p, level)?;
    let mut classes: Vec<Vec<u64>> = enumerate_b(inst, m)?.into_iter().map(|z| z.iter().map(|x| x % md).collect()).collect();
    classes.sort();
    classes.dedup();
    Ok(classes.len() as u64)
}

/// Per-`m` class counts at `level`, over all `m`; the direct definition.
pub fn class_counts_direct(inst: &CongruenceInstance, level: u32) -> Result<BTreeMap<Vec<u64>, u64>> {
    let md = pow(inst.p, level)?;
    let mut seen: BTreeMap<Vec<u64>, Vec<Vec<u64>>> = BTreeMap::new();
    for z in inst.admissible()? {
        seen.entry(inst.m_vector(&z)).or_default().push(z.iter().map(|x| x % md).collect());
    }
    Ok(seen
        .into_iter()
        .map(|(m, mut c)| {
            c.sort();
            c.dedup();
            (m, c.len() as u64)
        })
        .collect())
}

/// Maximum class count at `level` over `xi`, `eta` and `m`, straight from the
/// definition. Tiny instances only.
pub fn brute_max(p: u64, k: u32, a: u32, b: u32, n: u32, level: u32) -> Result<u64> {
    let pb = pow(p, b)?;
    let xis: Vec<u64> = if a == 0 { vec![0] } else { (1..=pow(p, a)?).collect() };
    let mut best = 0;
    for &xi in &xis {
        for eta in 1..=pb {
            if a >= 1 && xi % p == eta % p {
                continue;
            }
            let inst = CongruenceInstance::new(p, k, a, b, n, xi, eta)?;
            best = best.max(class_counts_direct(&inst, level)?.values().copied().max().unwrap_or(0));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub p: u64,
    pub k: u32,
    pub m: u32,
    pub a: u32,
    pub b: u32,
    pub n: u32,
    /// Maximal level `(k - m) b - m a`.
    pub h: i64,
    pub in_hypothesis: bool,
    /// Maximum class count at levels `1..=h`.
    pub max_by_level: Vec<u64>,
    pub max_count: u64,
    #[serde(serialize_with = "crate::ser_big")]
    pub bound: BigInt,
    /// `k!/(k-m-1)!`, the sharper count from the proof.
    #[serde(serialize_with = "crate::ser_big")]
    pub falling_bound: BigInt,
    pub within_bound: bool,
    pub monotone: bool,
    /// `class count -> number of m` at level `h`, pooled over the residue shifts.
    pub histogram: BTreeMap<u64, u64>,
    /// A maximiser: residue `xi - eta (mod p^a)` (0 when `a = 0`) and `m`.
    pub argmax_shift: u64,
    pub argmax_m: Vec<u64>,
    pub tuples: u64,
}

struct LevelStats {
    max_by_level: Vec<u64>,
    histogram: BTreeMap<u64, u64>,
    argmax: Vec<u64>,
    tuples: u64,
}

// Counts for the translated system: y = z - eta ranges over residues mod p^(kb)
// with y = shift (mod p^a) and distinct mod p^(a+1) (a >= 1), or y a unit
// and distinct mod p (a = 0).
fn shifted_stats(p: u64, k: u32, a: u32, b: u32, n: u32, shift: u64, levels: u32) -> Result<LevelStats> {
    let kb = k * b;
    let top = pow(p, kb)?;
    let dm = pow(p, a + 1)?;
    let pa = pow(p, a)?;
    let cands: Vec<u64> = if a == 0 { (0..top).filter(|y| y % p != 0).collect() } else { (0..top).filter(|y| y % pa == shift).collect() };
    let moduli: Vec<u64> = (1..=k).map(|j| p.pow(j * b)).collect();
    let mut radix = Vec::with_capacity(k as usize);
    let mut acc: u128 = 1;
    for &md in &moduli {
        radix.push(acc);
        acc = acc.checked_mul(md as u128).ok_or_else(|| Error::Overflow("m-vector key exceeds 128 bits".into()))?;
    }
    if acc > u64::MAX as u128 {
        return Err(Error::Overflow("m-vector key exceeds 64 bits".into()));
    }
    // Per candidate: powers mod p^(jb), and base-p digits (low first).
    let pows: Vec<Vec<u64>> = cands
        .iter()
        .map(|&y| {
            let mut v = Vec::with_capacity(k as usize);
            let mut pw = 1u128;
            for &md in &moduli {
                pw = pw * y as u128 % top as u128;
                v.push((pw % md as u128) as u64);
            }
            v
        })
        .collect();
    let digits: Vec<Vec<u64>> = cands
        .iter()
        .map(|&y| {
            let mut d = Vec::with_capacity(kb as usize);
            let mut t = y;
            for _ in 0..kb {
                d.push(t % p);
                t /= p;
            }
            d
        })
        .collect();
    let key_of = |idx: &[usize]| -> (u64, u64) {
        let mut mk: u128 = 0;
        for j in 0..k as usize {
            let md = moduli[j];
            let s = idx.iter().map(|&i| pows[i][j]).fold(0u64, |s, x| (s + x) % md);
            mk += s as u128 * radix[j];
        }
        // Interleave digits: lowest digit of every coordinate first, so that
        // classes modulo p^L are contiguous key ranges.
        let mut zk: u64 = 0;
        for t in 0..kb as usize {
            for &i in idx {
                zk = zk * p + digits[i][t];
            }
        }
        (mk as u64, zk)
    };
    let mut leaves: Vec<(u64, u64)> = (0..cands.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut stack = vec![vec![first]];
            while let Some(idx) = stack.pop() {
                if idx.len() == n as usize {
                    out.push(key_of(&idx));
                    continue;
                }
                for c in 0..cands.len() {
                    if idx.iter().all(|&i| cands[i] % dm != cands[c] % dm) {
                        let mut next = idx.clone();
                        next.push(c);
                        stack.push(next);
                    }
                }
            }
            out
        })
        .collect();
    leaves.par_sort_unstable();
    let tuples = leaves.len() as u64;
    let mut max_by_level = vec![0u64; levels as usize];
    let mut histogram = BTreeMap::new();
    let mut best_key = None;
    let shifts: Vec<u32> = (1..=levels).map(|l| (kb - l) * n).collect();
    let mut i = 0;
    while i < leaves.len() {
        let mk = leaves[i].0;
        let mut j = i;
        let mut counts = vec![0u64; levels as usize];
        let mut last: Vec<Option<u64>> = vec![None; levels as usize];
        while j < leaves.len() && leaves[j].0 == mk {
            for (l, &sh) in shifts.iter().enumerate() {
                let prefix = leaves[j].1 / p.pow(sh);
                if last[l] != Some(prefix) {
                    counts[l] += 1;
                    last[l] = Some(prefix);
                }
            }
            j += 1;
        }
        for l in 0..levels as usize {
            if counts[l] > max_by_level[l] {
                max_by_level[l] = counts[l];
                if l + 1 == levels as usize {
                    best_key = Some(mk);
                }
            }
        }
        if levels > 0 {
            *histogram.entry(counts[levels as usize - 1]).or_insert(0) += 1;
        }
        i = j;
    }
    let argmax = best_key
        .map(|mut key| {
            moduli
                .iter()
                .map(|&md| {
                    let v = key % md;
                    key /= md;
                    v
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(LevelStats { max_by_level, histogram, argmax, tuples })
}

/// Tuples an audit would visit.
pub fn audit_estimate(p: u64, k: u32, a: u32, b: u32, n: u32) -> u128 {
    let kb = (k * b) as u128;
    let p = p as u128;
    let (shifts, per_coord_classes, lifts) = if a == 0 {
        (1u128, p - 1, kb - 1)
    } else {
        ((p - 1) * p.pow(a - 1), p, kb - a as u128 - 1)
    };
    let mut distinct: u128 = 1;
    for i in 0..n as u128 {
        distinct = distinct.saturating_mul(per_coord_classes.saturating_sub(i));
    }
    shifts.saturating_mul(distinct).saturating_mul(p.saturating_pow((lifts * n as u128) as u32))
}

/// Maximum class counts for `n = m + 1` variables at every level up to
/// `(k - m) b - m a`, maximised over `xi`, `eta` and `m`.
///
/// `eta` is removed by translating `z -> z - eta`, which is a bijection on
/// solutions preserving classes and `m`; what remains of `(xi, eta)` is the
/// shift `xi - eta (mod p^a)`, which runs over the units (or is absent when
/// `a = 0`).
pub fn lemma31_audit(p: u64, k: u32, m: u32, a: u32, b: u32) -> Result<ClassReport> {
    if m >= k {
        return Err(Error::Precondition(format!("need 0 <= m <= k - 1, got m = {m}")));
    }
    if !is_prime(p) || p <= k as u64 || a >= b {
        return Err(Error::Precondition("need a prime p > k and 0 <= a < b".into()));
    }
    let n = m + 1;
    let h = (k as i64 - m as i64) * b as i64 - (m * a) as i64;
    let in_hypothesis = (k - m) * b >= (m + 1) * a && a as i64 <= h;
    let levels = h.clamp(1, (k * b) as i64) as u32;
    let est = audit_estimate(p, k, a, b, n);
    if est > ENUMERATION_CAP {
        return Err(Error::BudgetExceeded { estimate: est, cap: ENUMERATION_CAP });
    }
    let shifts: Vec<u64> = if a == 0 { vec![0] } else { (1..p.pow(a)).filter(|s| s % p != 0).collect() };
    let mut max_by_level = vec![0u64; levels as usize];
    let mut histogram = BTreeMap::new();
    let (mut argmax_shift, mut argmax_m) = (0, Vec::new());
    let mut tuples = 0;
    for &sh in &shifts {
        let st = shifted_stats(p, k, a, b, n, sh, levels)?;
        tuples += st.tuples;
        for (c, v) in st.histogram {
            *histogram.entry(c).or_insert(0) += v;
        }
        if st.max_by_level[levels as usize - 1] > max_by_level[levels as usize - 1] {
            argmax_shift = sh;
            argmax_m = st.argmax;
        }
        for l in 0..levels as usize {
            max_by_level[l] = max_by_level[l].max(st.max_by_level[l]);
        }
    }
    let max_count = max_by_level[levels as usize - 1];
    let bound = factorial(k as u64);
    let falling_bound = &bound / factorial((k - m - 1) as u64);
    let monotone = max_by_level.windows(2).all(|w| w[0] <= w[1]);
    Ok(ClassReport {
        p,
        k,
        m,
        a,
        b,
        n,
        h,
        in_hypothesis,
        within_bound: BigInt::from(max_count) <= bound,
        max_by_level,
        max_count,
        bound,
        falling_bound,
        monotone,
        histogram,
        argmax_shift,
        argmax_m,
        tuples,
    })
}

/// The desk grid: `p in {5, 7}`, `k in {3, 4}`, `m <= k - 1`,
/// `(a, b) in {(0, 1), (1, 2), (0, 2)}` with `(k - m) b >= (m + 1) a` and
/// `p^(kbn) <= 10^8`.
pub fn desk_grid() -> Vec<(u64, u32, u32, u32, u32)> {
    let mut out = Vec::new();
    for p in [5u64, 7] {
        for k in [3u32, 4] {
            for m in 0..k {
                for (a, b) in [(0u32, 1u32), (1, 2), (0, 2)] {
                    let n = m + 1;
                    if (k - m) * b < (m + 1) * a {
                        continue;
                    }
                    if (p as u128).checked_pow(k * b * n).is_none_or(|v| v > ENUMERATION_CAP) {
                        continue;
                    }
                    out.push((p, k, m, a, b));
                }
            }
        }
    }
    out
}

/// Coefficients of `c_const + sum_{l=k-m}^{j} c_l (x+1)^l = sum_{u=beta}^{j} d_u x^u`
/// with `beta = j - k + m + 1` and `d_beta = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinomialIdentity {
    pub k: u32,
    pub m: u32,
    pub j: u32,
    /// `c_{j, k-m-1}`.
    pub c_const: Rational,
    /// `(l, c_{j,l})` for `k - m <= l <= j`.
    pub c: Vec<(u32, Rational)>,
    /// `(u, d_{j,u})` for `beta <= u <= j`.
    pub d: Vec<(u32, Rational)>,
    /// The expansion of left minus right is the zero polynomial.
    pub verified: bool,
    /// Primes dividing a denominator of some coefficient.
    pub denominator_primes: Vec<u64>,
}

fn solve(mut a: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Result<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or_else(|| Error::Degenerate("singular system".into()))?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        let inv = a[col][col].recip()?;
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &t;
                }
                let t = &f * &rhs[col];
                rhs[r] = &rhs[r] - &t;
            }
        }
    }
    Ok(rhs)
}

pub fn binomial_identity(k: u32, m: u32, j: u32) -> Result<BinomialIdentity> {
    if m >= k || j < k - m || j > k {
        return Err(Error::Precondition(format!("need 0 <= m <= k - 1 and k - m <= j <= k, got k = {k}, m = {m}, j = {j}")));
    }
    let beta = j + m + 1 - k;
    let ls: Vec<u32> = (k - m..=j).collect();
    // Unknowns: c_const, then c_l. Rows: coefficient of x^t for t = 0..=beta.
    let size = beta as usize + 1;
    let mut mat = vec![vec![Rational::zero(); size]; size];
    for t in 0..size {
        mat[t][0] = if t == 0 { Rational::one() } else { Rational::zero() };
        for (i, &l) in ls.iter().enumerate() {
            mat[t][i + 1] = Rational::integer(binomial(l as u64, t as u64));
        }
    }
    let mut rhs = vec![Rational::zero(); size];
    rhs[beta as usize] = Rational::one();
    let sol = solve(mat, rhs)?;
    let c_const = sol[0].clone();
    let c: Vec<(u32, Rational)> = ls.iter().zip(&sol[1..]).map(|(&l, v)| (l, v.clone())).collect();
    // Expand the left side fully.
    let mut lhs = vec![Rational::zero(); j as usize + 1];
    lhs[0] = c_const.clone();
    for (l, cl) in &c {
        for t in 0..=*l as usize {
            lhs[t] += cl * Rational::integer(binomial(*l as u64, t as u64));
        }
    }
    let d: Vec<(u32, Rational)> = (beta..=j).map(|u| (u, lhs[u as usize].clone())).collect();
    let mut rhs_poly = vec![Rational::zero(); j as usize + 1];
    for (u, du) in &d {
        rhs_poly[*u as usize] = du.clone();
    }
    let verified = lhs == rhs_poly && d[0].1 == Rational::one();
    let mut primes: Vec<u64> = std::iter::once(&c_const)
        .chain(c.iter().map(|x| &x.1))
        .chain(d.iter().map(|x| &x.1))
        .flat_map(|q| prime_factors(q.denom()))
        .filter_map(|p| p.abs().to_u64())
        .collect();
    primes.sort();
    primes.dedup();
    Ok(BinomialIdentity { k, m, j, c_const, c, d, verified, denominator_primes: primes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_examples() {
        assert_eq!(xi_set(0, 1, 0, 5).unwrap().len(), 5);
        assert_eq!(xi_set(0, 2, 0, 5).unwrap().len(), 20);
        let s = xi_set(1, 2, 3, 5).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.iter().all(|t| t.iter().all(|x| [3, 8, 13, 18, 23].contains(x))));
        assert!(xi_set(0, 6, 0, 5).unwrap().is_empty());
    }

    #[test]
    fn binomial_example() {
        let b = binomial_identity(3, 1, 2).unwrap();
        assert_eq!(b.c_const, Rational::frac(-1, 2));
        assert_eq!(b.c, vec![(2, Rational::frac(1, 2))]);
        assert_eq!(b.d, vec![(1, Rational::one()), (2, Rational::frac(1, 2))]);
        assert!(b.verified);
        assert_eq!(b.denominator_primes, vec![2]);
    }

    #[test]
    fn binomial_single_block() {
        for k in 1..=6 {
            let b = binomial_identity(k, k - 1, k).unwrap();
            assert!(b.verified);
            assert_eq!(b.d.len(), 1);
        }
        assert!(binomial_identity(3, 3, 3).is_err());
        assert!(binomial_identity(4, 1, 2).is_err());
    }

    #[test]
    fn audit_k3() {
        let r = lemma31_audit(5, 3, 1, 0, 1).unwrap();
        assert!(r.in_hypothesis && r.within_bound && r.monotone);
        assert_eq!(r.h, 2);
        assert_eq!(r.bound, BigInt::from(6));
        assert_eq!(r.max_count, brute_max(5, 3, 0, 1, 2, 2).unwrap());
    }

    #[test]
    fn single_variable() {
        let z = [7u64];
        let inst = CongruenceInstance::new(5, 3, 0, 1, 1, 0, 1).unwrap();
        let m = inst.m_vector(&z);
        let sols = enumerate_b(&inst, &m).unwrap();
        assert!(sols.contains(&vec![7]));
        for s in &sols {
            assert_eq!(inst.m_vector(s), m);
        }
    }

    #[test]
    fn levels_extremes() {
        let inst = CongruenceInstance::new(5, 3, 0, 1, 2, 0, 1).unwrap();
        let m = inst.m_vector(&[2, 3]);
        let sols = enumerate_b(&inst, &m).unwrap();
        assert_eq!(class_count(&inst, &m, 3).unwrap(), sols.len() as u64);
        assert_eq!(class_count(&inst, &m, 0).unwrap(), 1);
    }
}
