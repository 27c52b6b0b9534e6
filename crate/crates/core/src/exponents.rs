//! Admissible exponents.
//!
//! Certifies ranges of `s` for which the strongly diagonal bound
//! `J_{s,k}(X) << X^{s+eps}` is available, from the main iteration theorem
//! (`T9_2`), its closed-form corollaries, the large-`k` refinement and the
//! classical baselines, and reproduces the table of `D(k)` for small `k`.
//!
//! Every admissibility decision is exact: rational quantities are compared
//! as rationals, `s < theta_plus` is decided by squaring, and the few
//! irrational thresholds go through [`CertInterval`] with precision
//! escalation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::{ceil_cbrt, ceil_sqrt, int_power_root, refine, CertInterval, Cmp, Rational, DEFAULT_BITS};
use crate::error::{Error, Result};

/// Published values of `D(k)` for `4 <= k <= 20`.
pub const TABLE1: [(u64, u64); 17] = [
    (4, 8),
    (5, 10),
    (6, 17),
    (7, 20),
    (8, 29),
    (9, 38),
    (10, 44),
    (11, 55),
    (12, 68),
    (13, 75),
    (14, 90),
    (15, 105),
    (16, 122),
    (17, 132),
    (18, 151),
    (19, 170),
    (20, 191),
];

/// `r0(k) = k - ceil(2 sqrt k) + 2`, the largest `r` the main theorem allows.
pub fn r0(k: u64) -> u64 {
    let c = ceil_sqrt(&BigInt::from(4 * k)).to_u64().unwrap();
    (k + 2).saturating_sub(c)
}

/// `sum_{m=1}^{r-1} m(r-m)/(s-m)`, or with `s-r-m` in the denominators when
/// `shifted`. Requires every denominator to be positive.
pub fn delta(r: u64, s: u64, shifted: bool) -> Result<Rational> {
    let offset = if shifted { r } else { 0 };
    if r >= 2 && s <= offset + r - 1 {
        return Err(Error::Precondition(format!(
            "delta needs s > {} (r = {r}, s = {s}, shifted = {shifted})",
            offset + r - 1
        )));
    }
    let mut acc = Rational::zero();
    for m in 1..r {
        acc += Rational::new(m * (r - m), s - offset - m)?;
    }
    Ok(acc)
}

/// A parameter triple for the core iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IterationParams {
    pub k: u64,
    pub r: u64,
    pub s: u64,
}

impl IterationParams {
    pub fn new(k: u64, r: u64, s: u64) -> Result<Self> {
        if k < 4 {
            return Err(Error::KTooSmall { k, min: 4 });
        }
        if r < 1 || r >= k {
            return Err(Error::Precondition(format!("need 1 <= r <= k-1, got r = {r}, k = {k}")));
        }
        if s < 1 {
            return Err(Error::Precondition("need s >= 1".into()));
        }
        Ok(IterationParams { k, r, s })
    }
}

/// `Delta`, `alpha = kr - r(r-1)/2 - Delta`, `beta = r(r(r-1)/2 + Delta)` and
/// the discriminant `alpha^2 - 4 beta` of `theta^2 - alpha theta + beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaData {
    pub delta: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub discriminant: Rational,
}

impl ThetaData {
    pub fn theta_plus(&self, bits: u32) -> Option<CertInterval> {
        self.theta(bits, true)
    }

    pub fn theta_minus(&self, bits: u32) -> Option<CertInterval> {
        self.theta(bits, false)
    }

    fn theta(&self, bits: u32, plus: bool) -> Option<CertInterval> {
        if self.discriminant.is_negative() {
            return None;
        }
        let root = CertInterval::root(&self.discriminant, 2, bits);
        let root = if plus { root } else { root.neg() };
        Some(root.add_rat(&self.alpha).mul_rat(&Rational::frac(1, 2)))
    }

    /// `r(r-1)/2 + Delta`, i.e. `beta / r`.
    pub fn beta_over_r(&self, r: u64) -> Rational {
        &self.beta / Rational::from(r)
    }
}

pub fn theta_data(p: &IterationParams) -> Result<ThetaData> {
    let (k, r, s) = (p.k, p.r, p.s);
    let d = delta(r, s, false)?;
    let tri = Rational::from(r * (r - 1) / 2);
    let alpha = Rational::from(k * r) - &tri - &d;
    let beta = Rational::from(r) * (&tri + &d);
    let discriminant = alpha.square() - Rational::from(4) * &beta;
    Ok(ThetaData { delta: d, alpha, beta, discriminant })
}

/// Exact test of `s < theta_plus`. False when the discriminant is negative.
pub fn below_theta_plus(s: u64, t: &ThetaData) -> bool {
    if t.discriminant.is_negative() {
        return false;
    }
    // s < (alpha + sqrt(disc))/2  <=>  2s - alpha < sqrt(disc)
    let x = Rational::from(2 * s) - &t.alpha;
    x.is_negative() || x.square() < t.discriminant
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Theorem {
    /// Closed form with `r = r0(k)`, `k >= 7`.
    T1_1,
    /// `s <= k(k+1)/2 - 7k/3`, `k >= 7`.
    C1_2,
    /// `s <= k(k+1)/2 - k/3 - 8k^(2/3)` for sufficiently large `k`.
    T1_3,
    /// The main iteration theorem.
    T9_2,
    /// The refined iteration for large `k`.
    T11_8,
    /// `s <= (k+1)^2/4`.
    FW2013,
    /// `s <= k+1`.
    Hua,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Admissible,
    NotAdmissible,
    Indeterminate,
}

/// One hypothesis of a theorem, evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    /// `None` when an interval comparison could not be decided.
    pub holds: Option<bool>,
}

impl Check {
    fn new(label: &str, lhs: impl fmt::Display, rhs: impl fmt::Display, holds: Option<bool>) -> Self {
        Check { label: label.to_string(), lhs: lhs.to_string(), rhs: rhs.to_string(), holds }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "undecided",
        };
        write!(f, "{} {} (lhs {}, rhs {})", self.label, status, self.lhs, self.rhs)
    }
}

/// A certified (or refused) admissible exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub theorem: Theorem,
    pub k: u64,
    pub r: Option<u64>,
    /// The theorem's own `s` (for `T9_2` and `T11_8`, before adding `r`).
    pub s: Option<u64>,
    /// Largest total number of variables certified: `J_{s_total,k} << X^{s_total+eps}`.
    pub s_total: Option<u64>,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub theta_plus: Option<CertInterval>,
    pub note: Option<String>,
}

impl Certificate {
    fn baseline(theorem: Theorem, k: u64, s_total: u64, label: &str, rhs: String) -> Self {
        Certificate {
            theorem,
            k,
            r: None,
            s: None,
            s_total: Some(s_total),
            verdict: Verdict::Admissible,
            checks: vec![Check::new(label, s_total, rhs, Some(true))],
            theta_plus: None,
            note: None,
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.holds != Some(true))
    }
}

/// Gates and knobs shared by the certifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GateConfig {
    /// Smallest `k` at which the large-`k` statements are applied.
    pub large_k_gate: u64,
    /// Starting precision for interval decisions.
    pub bits: u32,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig { large_k_gate: 20, bits: DEFAULT_BITS }
    }
}

/// Check the hypotheses of the main iteration theorem for `(k, r, s)`.
///
/// On success the certificate covers `s_total = s + r`.
pub fn certify_t92(k: u64, r: u64, s: u64) -> Certificate {
    let mut checks = Vec::new();
    let mut cert = Certificate {
        theorem: Theorem::T9_2,
        k,
        r: Some(r),
        s: Some(s),
        s_total: None,
        verdict: Verdict::NotAdmissible,
        checks: Vec::new(),
        theta_plus: None,
        note: None,
    };
    let r0k = r0(k);
    checks.push(Check::new("k >= 4", k, 4, Some(k >= 4)));
    checks.push(Check::new("2 <= r", 2, r, Some(r >= 2)));
    checks.push(Check::new("r <= r0(k)", r, r0k, Some(r <= r0k)));
    checks.push(Check::new("s >= 2r - 1", s, (2 * r).saturating_sub(1), Some(s + 1 >= 2 * r)));
    let params = IterationParams { k, r, s };
    let t = if r >= 1 && r < k && s + 1 > r { theta_data(&params).ok() } else { None };
    match t {
        None if r == 0 || r >= k => {
            checks.push(Check::new("r <= k - 1", r, k.saturating_sub(1), Some(false)));
        }
        None => {
            checks.push(Check::new("s > r - 1 (Delta defined)", s, r - 1, Some(false)));
        }
        Some(t) => {
            let floor_s = &t.beta / Rational::from(r);
            checks.push(Check::new("s >= r(r-1)/2 + Delta", s, &floor_s, Some(Rational::from(s) >= floor_s)));
            let tp = t.theta_plus(DEFAULT_BITS);
            let rhs = match &tp {
                Some(iv) => iv.to_string(),
                None => format!("undefined (discriminant {} < 0)", t.discriminant),
            };
            checks.push(Check::new("s < theta_plus", s, rhs, Some(below_theta_plus(s, &t))));
            cert.theta_plus = tp;
        }
    }
    let ok = checks.iter().all(|c| c.holds == Some(true));
    cert.checks = checks;
    if ok {
        cert.verdict = Verdict::Admissible;
        cert.s_total = Some(s + r);
    }
    cert
}

fn half_k_k1(k: u64) -> Rational {
    Rational::from(k * (k + 1)) * Rational::frac(1, 2)
}

/// `s_1` of the refined iteration, enclosed at `bits`.
///
/// `Some(None)` when the discriminant is certainly negative (no `s_1`),
/// `None` when its sign is not decided at this precision.
pub fn t11_s1(k: u64, bits: u32) -> Option<Option<CertInterval>> {
    let ell = ceil_cbrt(k);
    let r = k - ell;
    let k23 = int_power_root(k, 2, 3, bits);
    let kr = Rational::from(k);
    let alpha = k23.mul_rat(&Rational::from(-3)).add_rat(&(half_k_k1(k) - &kr * Rational::frac(1, 3)));
    let beta = k23
        .mul_rat(&(Rational::from(3) * &kr))
        .add_rat(&(Rational::from(k * (k - 1)) * Rational::frac(1, 2)));
    let disc = alpha.square().sub(&beta.mul_rat(&Rational::from(4 * r)));
    if disc.hi().is_negative() {
        return Some(None);
    }
    let root = disc.sqrt().ok()?;
    Some(Some(alpha.add(&root).mul_rat(&Rational::frac(1, 2))))
}

/// Check `1 <= s <= s_1` for the refined iteration with `r = k - ceil(k^(1/3))`.
pub fn certify_t11(k: u64, s: u64, cfg: &GateConfig) -> Certificate {
    let ell = ceil_cbrt(k.max(1));
    let r = k.saturating_sub(ell);
    let mut cert = Certificate {
        theorem: Theorem::T11_8,
        k,
        r: Some(r),
        s: Some(s),
        s_total: None,
        verdict: Verdict::NotAdmissible,
        checks: Vec::new(),
        theta_plus: None,
        note: None,
    };
    let gate_ok = k >= cfg.large_k_gate.max(2);
    cert.checks.push(Check::new("k >= large-k gate", k, cfg.large_k_gate, Some(gate_ok)));
    cert.checks.push(Check::new("1 <= s", 1, s, Some(s >= 1)));
    if !gate_ok {
        cert.note = Some("below gate".into());
        return cert;
    }
    let sr = Rational::from(s);
    let decided = refine(cfg.bits, |bits| match t11_s1(k, bits)? {
        None => Some(None),
        Some(s1) => match s1.cmp_rat(&sr) {
            Cmp::Greater | Cmp::Equal => Some(Some((true, s1))),
            Cmp::Less => Some(Some((false, s1))),
            Cmp::Indeterminate => None,
        },
    });
    match decided {
        Ok(None) => {
            cert.checks.push(Check::new("s1 defined (alpha^2 >= 4 r beta)", "negative discriminant", 0, Some(false)));
            cert.note = Some("s1 undefined".into());
        }
        Ok(Some((holds, s1))) => {
            cert.checks.push(Check::new("s <= s1", s, &s1, Some(holds)));
            cert.theta_plus = Some(s1);
        }
        Err(bits) => {
            cert.checks.push(Check::new("s <= s1", s, format!("undecided at {bits} bits"), None));
            cert.verdict = Verdict::Indeterminate;
            return cert;
        }
    }
    if cert.checks.iter().all(|c| c.holds == Some(true)) {
        cert.verdict = Verdict::Admissible;
        cert.s_total = Some(s + r);
    }
    cert
}

/// `floor(s_1)` for the refined iteration, certified.
pub fn t11_max_s(k: u64, bits: u32) -> Result<u64> {
    let f = refine(bits, |b| match t11_s1(k, b)? {
        None => Some(None),
        Some(s1) => s1.floor().map(Some),
    })
    .map_err(|bits| Error::Indeterminate { what: format!("floor of s1 at k = {k}"), bits })?;
    let f = f.ok_or_else(|| Error::Hypothesis(format!("s1 undefined at k = {k} (negative discriminant)")))?;
    f.to_u64().ok_or_else(|| Error::Hypothesis(format!("s1 < 0 at k = {k}")))
}

/// `floor(k(k+1)/2 - k/3 - 8k^(2/3))`, certified.
pub fn t13_bound(k: u64, bits: u32) -> Result<BigInt> {
    refine(bits, |b| {
        let k23 = int_power_root(k, 2, 3, b);
        let v = k23
            .mul_rat(&Rational::from(-8))
            .add_rat(&(half_k_k1(k) - Rational::from(k) * Rational::frac(1, 3)));
        v.floor()
    })
    .map_err(|bits| Error::Indeterminate { what: format!("floor of the T1_3 bound at k = {k}"), bits })
}

/// The largest `s` with `s <= kr - r(r-1)/2 - Delta_shifted(s)`, `r = r0(k)`,
/// scanning up from the `(k+1)^2/4` baseline while the inequality holds.
fn closed_t11_scan(k: u64) -> (u64, Vec<Check>, String) {
    let r = r0(k);
    let start = (k + 1) * (k + 1) / 4;
    let base = Rational::from(k * r) - Rational::from(r * (r - 1) / 2);
    let rhs_at = |s: u64| delta(r, s, true).map(|d| &base - &d);
    let mut best = start;
    let mut s = start + 1;
    let note = loop {
        match rhs_at(s) {
            Ok(rhs) if Rational::from(s) <= rhs => best = s,
            Ok(rhs) => break format!("range ends: s = {s} exceeds {rhs}"),
            Err(_) => break format!("range ends: Delta_shifted undefined at s = {s}"),
        }
        s += 1;
        if s > k * (k + 1) {
            break "scan reached k(k+1)".to_string();
        }
    };
    let rhs = rhs_at(best).map(|x| x.to_string()).unwrap_or_else(|_| "FW2013 baseline".into());
    let checks = vec![Check::new("s <= kr - r(r-1)/2 - Delta_shifted", best, rhs, Some(true))];
    (best, checks, note)
}

/// The closed-form range supplied by one theorem.
pub fn closed_range(k: u64, theorem: Theorem, cfg: &GateConfig) -> Result<Certificate> {
    match theorem {
        Theorem::Hua => Ok(Certificate::baseline(Theorem::Hua, k, k + 1, "s <= k + 1", (k + 1).to_string())),
        Theorem::FW2013 => {
            let v = (k + 1) * (k + 1) / 4;
            Ok(Certificate::baseline(Theorem::FW2013, k, v, "s <= (k+1)^2/4", Rational::new((k + 1) * (k + 1), 4)?.to_string()))
        }
        Theorem::C1_2 => {
            if k < 7 {
                return Err(Error::KTooSmall { k, min: 7 });
            }
            let bound = half_k_k1(k) - Rational::from(7 * k) * Rational::frac(1, 3);
            let v = bound.floor().to_u64().unwrap();
            Ok(Certificate::baseline(Theorem::C1_2, k, v, "s <= k(k+1)/2 - 7k/3", bound.to_string()))
        }
        Theorem::T1_1 => {
            if k < 7 {
                return Err(Error::KTooSmall { k, min: 7 });
            }
            let (s, checks, note) = closed_t11_scan(k);
            Ok(Certificate {
                theorem: Theorem::T1_1,
                k,
                r: Some(r0(k)),
                s: None,
                s_total: Some(s),
                verdict: Verdict::Admissible,
                checks,
                theta_plus: None,
                note: Some(note),
            })
        }
        Theorem::T1_3 => {
            if k < cfg.large_k_gate {
                return Err(Error::KTooSmall { k, min: cfg.large_k_gate });
            }
            let v = t13_bound(k, cfg.bits)?;
            let v = v.to_u64().ok_or_else(|| Error::Hypothesis(format!("T1_3 bound negative at k = {k}")))?;
            let mut c = Certificate::baseline(Theorem::T1_3, k, v, "s <= k(k+1)/2 - k/3 - 8k^(2/3)", v.to_string());
            // The range is stated for large k and is meant to follow from the
            // refined iteration; record whether that iteration reaches it here.
            let r = k - ceil_cbrt(k);
            let (holds, rhs) = match t11_max_s(k, cfg.bits) {
                Ok(s1) => (s1 + r >= v, (s1 + r).to_string()),
                Err(e) => (false, e.to_string()),
            };
            c.checks.push(Check::new("T11_8 reaches the bound: floor(s1) + r >= bound", rhs, v, Some(holds)));
            if !holds {
                c.verdict = Verdict::NotAdmissible;
                c.s_total = None;
                c.note = Some("stated for sufficiently large k; not reached by the refined iteration at this k".into());
            }
            Ok(c)
        }
        Theorem::T11_8 => {
            if k < cfg.large_k_gate {
                return Err(Error::KTooSmall { k, min: cfg.large_k_gate });
            }
            let s = t11_max_s(k, cfg.bits)?;
            Ok(certify_t11(k, s, cfg))
        }
        Theorem::T9_2 => best_t92(k, r0(k)).ok_or_else(|| Error::Hypothesis(format!("no admissible (r, s) at k = {k}"))),
    }
}

/// Every closed-form range that applies at `k`.
pub fn closed_ranges(k: u64, cfg: &GateConfig) -> Vec<Certificate> {
    [Theorem::Hua, Theorem::FW2013, Theorem::C1_2, Theorem::T1_1, Theorem::T1_3, Theorem::T11_8]
        .into_iter()
        .filter_map(|t| closed_range(k, t, cfg).ok())
        .collect()
}

/// Best `T9_2` certificate over `2 <= r <= r_max`; ties go to the smaller `r`.
pub fn best_t92(k: u64, r_max: u64) -> Option<Certificate> {
    let mut best: Option<Certificate> = None;
    for r in 2..=r_max.min(k.saturating_sub(1)) {
        // Scan down from above theta_plus (< alpha < kr); the first hit is the max.
        for s in (1..=k * r).rev() {
            let c = certify_t92(k, r, s);
            if c.is_admissible() {
                if best.as_ref().map_or(true, |b| c.s_total > b.s_total) {
                    best = Some(c);
                }
                break;
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RPolicy {
    /// `2 <= r <= r0(k)`, as the main theorem requires.
    UpToR0,
    /// `2 <= r <= k - 1`; exploratory, drops the `r <= r0` hypothesis.
    Unrestricted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BestBound {
    pub k: u64,
    pub best: Certificate,
    pub candidates: Vec<Certificate>,
}

/// The largest certified `s_total` at `k`, over the main theorem, the
/// large-`k` refinement (above the gate) and the baselines.
pub fn best_bound(k: u64, policy: RPolicy, cfg: &GateConfig) -> BestBound {
    let mut candidates = Vec::new();
    let t92 = match policy {
        RPolicy::UpToR0 => best_t92(k, r0(k)),
        RPolicy::Unrestricted => best_t92_unrestricted(k),
    };
    candidates.extend(t92);
    if k >= cfg.large_k_gate {
        if let Ok(c) = closed_range(k, Theorem::T11_8, cfg) {
            if c.is_admissible() {
                candidates.push(c);
            }
        }
    }
    candidates.push(closed_range(k, Theorem::FW2013, cfg).unwrap());
    candidates.push(closed_range(k, Theorem::Hua, cfg).unwrap());
    let mut best = candidates[0].clone();
    for c in &candidates[1..] {
        if c.s_total > best.s_total {
            best = c.clone();
        }
    }
    BestBound { k, best, candidates }
}

// Same search without the r <= r0 hypothesis. The certificates it returns
// carry the failing "r <= r0(k)" check, so they are marked as exploratory.
fn best_t92_unrestricted(k: u64) -> Option<Certificate> {
    let mut best: Option<Certificate> = None;
    for r in 2..k {
        for s in (1..=k * r).rev() {
            let mut c = certify_t92(k, r, s);
            let others_ok = c.checks.iter().filter(|ch| ch.label != "r <= r0(k)").all(|ch| ch.holds == Some(true));
            if others_ok {
                c.s_total = Some(s + r);
                if r > r0(k) {
                    c.note = Some("exploratory: r exceeds r0(k)".into());
                } else {
                    c.verdict = Verdict::Admissible;
                }
                if best.as_ref().map_or(true, |b| c.s_total > b.s_total) {
                    best = Some(c);
                }
                break;
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableVerdict {
    Match,
    Discrepancy,
    /// No published value to compare with; the computed value is unverified.
    NoReference,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub k: u64,
    pub half_k_k1: u64,
    pub d_table: Option<u64>,
    pub d_computed: u64,
    pub theorem: Theorem,
    pub r_star: Option<u64>,
    pub s_star: Option<u64>,
    pub verdict: TableVerdict,
    /// For discrepancies: why the published value is not reached, one entry
    /// per `r` in `[2, r0(k)]`.
    pub blocking: Vec<String>,
}

pub fn table_row(k: u64, cfg: &GateConfig) -> TableRow {
    let bb = best_bound(k, RPolicy::UpToR0, cfg);
    let d_computed = bb.best.s_total.unwrap_or(0);
    let d_table = TABLE1.iter().find(|(kk, _)| *kk == k).map(|(_, d)| *d);
    let verdict = match d_table {
        None => TableVerdict::NoReference,
        Some(d) if d == d_computed => TableVerdict::Match,
        Some(_) => TableVerdict::Discrepancy,
    };
    let mut blocking = Vec::new();
    if let Some(d) = d_table {
        if d > d_computed {
            for r in 2..=r0(k) {
                if d <= r {
                    continue;
                }
                let c = certify_t92(k, r, d - r);
                if let Some(f) = c.first_failure() {
                    blocking.push(format!("r = {r}, s = {}: {}", d - r, f));
                }
            }
        } else if d < d_computed {
            blocking.push(format!("computed {d_computed} exceeds published {d}"));
        }
    }
    TableRow {
        k,
        half_k_k1: k * (k + 1) / 2,
        d_table,
        d_computed,
        theorem: bb.best.theorem,
        r_star: bb.best.r,
        s_star: bb.best.s,
        verdict,
        blocking,
    }
}

pub fn table1(ks: impl IntoIterator<Item = u64>, cfg: &GateConfig) -> Vec<TableRow> {
    ks.into_iter().map(|k| table_row(k, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r0_values() {
        assert_eq!(r0(4), 2);
        assert_eq!(r0(7), 3);
        assert_eq!(r0(16), 10);
        assert_eq!(r0(6), 3);
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(2, 6, false).unwrap(), Rational::frac(1, 5));
        assert_eq!(delta(3, 17, false).unwrap(), Rational::frac(31, 120));
        assert_eq!(delta(1, 1, false).unwrap(), Rational::zero());
        assert!(delta(3, 2, false).is_err());
        assert!(delta(3, 5, true).is_err());
        assert_eq!(delta(3, 6, true).unwrap(), Rational::frac(2, 2) + Rational::frac(2, 1));
    }

    #[test]
    fn theta_for_4_2_6() {
        let t = theta_data(&IterationParams::new(4, 2, 6).unwrap()).unwrap();
        assert_eq!(t.alpha, Rational::frac(34, 5));
        assert_eq!(t.beta, Rational::frac(12, 5));
        assert_eq!(t.discriminant, Rational::frac(916, 25));
        let tp = t.theta_plus(128).unwrap();
        assert!((tp.to_f64() - 6.42655).abs() < 1e-4);
        assert!(below_theta_plus(6, &t));
    }

    #[test]
    fn r1_has_no_delta() {
        let t = theta_data(&IterationParams::new(4, 1, 5).unwrap()).unwrap();
        assert_eq!(t.delta, Rational::zero());
        assert_eq!(t.alpha, Rational::from(4));
        assert_eq!(t.beta, Rational::zero());
    }

    #[test]
    fn certify_examples() {
        let c = certify_t92(4, 2, 6);
        assert!(c.is_admissible());
        assert_eq!(c.s_total, Some(8));
        assert!(!certify_t92(4, 2, 7).is_admissible());
        let c = certify_t92(6, 3, 14);
        assert!(!c.is_admissible());
        assert_eq!(c.first_failure().unwrap().label, "s < theta_plus");
        let tp = c.theta_plus.unwrap().to_f64();
        assert!((tp - 13.9662).abs() < 1e-3, "{tp}");
    }

    #[test]
    fn corollary_range() {
        let cfg = GateConfig::default();
        assert_eq!(closed_range(7, Theorem::C1_2, &cfg).unwrap().s_total, Some(11));
        assert_eq!(closed_range(6, Theorem::C1_2, &cfg), Err(Error::KTooSmall { k: 6, min: 7 }));
    }

    #[test]
    fn k6_discrepancy() {
        let row = table_row(6, &GateConfig::default());
        assert_eq!(row.d_computed, 16);
        assert_eq!(row.r_star, Some(3));
        assert_eq!(row.s_star, Some(13));
        assert_eq!(row.verdict, TableVerdict::Discrepancy);
        assert!(row.blocking.iter().any(|b| b.contains("s < theta_plus fails")));
    }

    #[test]
    fn t11_at_1000() {
        let cfg = GateConfig::default();
        assert_eq!(t13_bound(1000, 64).unwrap(), BigInt::from(499366));
        assert_eq!(t11_max_s(1000, 64).unwrap(), 498278);
        let c = certify_t11(1000, 498278, &cfg);
        assert!(c.is_admissible(), "{c:?}");
        assert_eq!(c.s_total, Some(498278 + 990));
        assert!(!certify_t11(1000, 498279, &cfg).is_admissible());
        // floor(T1_3 bound) - r lies above s1 at k = 1000.
        assert!(!certify_t11(1000, 499366 - 990, &cfg).is_admissible());
    }

    #[test]
    fn t13_not_reached_by_refined_iteration() {
        let c = closed_range(1000, Theorem::T1_3, &GateConfig::default()).unwrap();
        assert_eq!(c.verdict, Verdict::NotAdmissible);
        assert_eq!(c.first_failure().unwrap().lhs, "499268");
    }

    #[test]
    fn t11_undefined_at_20() {
        let c = certify_t11(20, 100, &GateConfig::default());
        assert_eq!(c.verdict, Verdict::NotAdmissible);
        assert_eq!(c.note.as_deref(), Some("s1 undefined"));
        assert!(t11_max_s(20, 64).is_err());
    }

    #[test]
    fn t11_below_gate() {
        let c = certify_t11(10, 5, &GateConfig::default());
        assert!(!c.is_admissible());
        assert_eq!(c.note.as_deref(), Some("below gate"));
    }
}
