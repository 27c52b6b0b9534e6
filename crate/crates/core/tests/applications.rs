use num_bigint::BigInt;
use proptest::prelude::*;
use vmvt::applications::*;
use vmvt::arith::{CertInterval, Rational};
use vmvt::exponents::GateConfig;
use vmvt::Error;

const XI: f64 = 0.424_574_112_262_460_5;
const C: f64 = 1.540_789_530_410_369_2;

// Delta is the least d with 3d - k >= 24 k^(2/3), i.e. (3d - k)^3 >= 13824 k^2.
fn defect_oracle(k: u64) -> u64 {
    let k = k as i128;
    let mut d = (k + 2) / 3;
    while (3 * d - k).pow(3) < 13824 * k * k {
        d += 1;
    }
    d as u64
}

// s = k(k+1)/2 + 1 <= (k+1)(k+2)/2 - (k+1)/3 - 8(k+1)^(2/3)  <=>  (2k - 1)^3 >= 13824 (k+1)^2.
fn tarry_oracle(k: u64) -> bool {
    let k = k as i128;
    2 * k - 1 >= 0 && (2 * k - 1).pow(3) >= 13824 * (k + 1) * (k + 1)
}

fn u1_oracle(k: u64, dv: f64) -> (u64, f64) {
    let (t, v) = ((k * k - k + 1) as f64, (k * (k + 1) / 2) as f64);
    let mut best = (0, f64::INFINITY);
    for w in 1..k {
        let wf = w as f64;
        if 2.0 * v + wf * (wf - 1.0) >= 2.0 * t {
            continue;
        }
        let u = 2.0 * t - (2.0 * t - 2.0 * v - wf * (wf - 1.0)) / (1.0 + dv / wf);
        if u < best.1 - 1e-9 * u.abs() {
            best = (w, u);
        }
    }
    best
}

#[test]
fn critical_defect_frozen_and_oracle() {
    let cfg = GateConfig::default();
    for (k, d) in [(1000u64, 1134u64), (10_000, 7047), (100_000, 50569)] {
        assert_eq!(critical_defect(k, &cfg).unwrap(), d);
        assert_eq!(defect_oracle(k), d);
    }
    for k in (20..=2000).chain([4095, 4096, 4097, 9999, 10_000]) {
        assert_eq!(critical_defect(k, &cfg).unwrap(), defect_oracle(k), "k = {k}");
    }
}

#[test]
fn critical_defect_below_ceiling() {
    let cfg = GateConfig::default();
    for k in (20..=10_000).step_by(7).chain([10_000]) {
        let d = critical_defect(k, &cfg).unwrap();
        let ceil = defect_ceiling(k, 128).hi().ceil();
        assert!(BigInt::from(d) <= ceil, "k = {k}");
    }
}

#[test]
fn defect_ratio_tends_to_one_third() {
    let cfg = GateConfig::default();
    for k in [1000u64, 10_000, 100_000] {
        let d = critical_defect(k, &cfg).unwrap() as f64;
        let kf = k as f64;
        assert!((d / kf - 1.0 / 3.0).abs() <= 8.0 * kf.powf(-1.0 / 3.0) + 2.0 / kf);
    }
    for k in [100u64, 317, 1000, 3163, 10_000, 31_623, 100_000] {
        let r = critical_defect(k, &cfg).unwrap() as f64 / k as f64;
        assert!(r >= 1.0 / 3.0 && r <= 1.0 / 3.0 + 9.0 * (k as f64).powf(-1.0 / 3.0), "k = {k}");
    }
}

#[test]
fn defect_gate() {
    let cfg = GateConfig { large_k_gate: 50, ..GateConfig::default() };
    assert!(matches!(critical_defect(49, &cfg), Err(Error::KTooSmall { k: 49, min: 50 })));
    assert!(tarry_bound(49, &cfg).is_err());
    assert!(u1(49, &cfg).is_err());
}

#[test]
fn tarry_matches_oracle() {
    let cfg = GateConfig::default();
    for k in (20..=5000).chain([10_000, 100_000]) {
        let t = tarry_bound(k, &cfg).unwrap();
        assert_eq!(t.holds, tarry_oracle(k), "k = {k}");
        assert_eq!(t.bound, BigInt::from(k * (k + 1) / 2 + 1));
        assert_eq!(t.margin.lo().is_positive() || t.margin.lo().is_zero(), t.holds);
    }
    assert!(!tarry_bound(20, &cfg).unwrap().holds);
    assert!(tarry_bound(1000, &cfg).unwrap().margin.hi().is_negative());
    assert!(tarry_bound(1732, &cfg).unwrap().holds);
    assert!(!tarry_bound(1731, &cfg).unwrap().holds);
}

#[test]
fn tarry_margin_shape() {
    // Margin is (2k - 1)/3 - 8(k+1)^(2/3): decreasing until k + 1 = 512, increasing after.
    let cfg = GateConfig::default();
    let m = |k| tarry_bound(k, &cfg).unwrap().margin.midpoint();
    for k in 20..511 {
        assert!(m(k + 1) < m(k), "k = {k}");
    }
    let mut prev = m(1732);
    let mut k = 1732u64;
    while k < 100_000 {
        k = k * 11 / 10;
        let cur = m(k);
        assert!(cur > prev && cur.is_positive(), "k = {k}");
        prev = cur;
    }
}

#[test]
fn u0_spec_point() {
    // k = 100, w = 42, Delta_v = 100/3 + 8 * 100^(2/3) + 1 enclosed.
    let k = 100;
    let dv = defect_ceiling(k, 200);
    let at = |d: &Rational| u0(&WaringParams::new(k, 42, d.clone())).unwrap();
    let (lo, hi) = (at(dv.lo()), at(dv.hi()));
    assert!(lo <= hi);
    let dvf = 100.0 / 3.0 + 8.0 * 100f64.powf(2.0 / 3.0) + 1.0;
    let f = 2.0 * 9901.0 - (2.0 * 9901.0 - 2.0 * 5050.0 - 42.0 * 41.0) / (1.0 + dvf / 42.0);
    assert!((lo.to_f64() - f).abs() < 1e-9 && (hi.to_f64() - f).abs() < 1e-9);
    assert!((hi.clone() - lo.clone()).to_f64() < 1e-40);
}

#[test]
fn u0_rejects_infeasible() {
    let mut p = WaringParams::new(20, 0, Rational::zero());
    assert!(u0(&p).is_err());
    p.w = 19;
    assert!(u0(&p).is_err());
    p.w = 18;
    assert!(u0(&p).is_ok());
    p.t = BigInt::from(200);
    assert!(u0(&p).is_err());
    let mut q = WaringParams::new(20, 5, Rational::one());
    q.delta_t = Rational::one();
    assert!(u0(&q).is_err());
}

#[test]
fn u1_without_defect_is_2v() {
    for k in [20u64, 57, 300] {
        let r = u1_with(k, Rational::zero()).unwrap();
        assert_eq!(r.w, 1);
        assert_eq!(r.value, Rational::integer(r.v.clone() * 2u32));
    }
}

#[test]
fn u1_frozen_argmin() {
    let cfg = GateConfig::default();
    for (k, w) in [(20u64, 10u64), (100, 53), (1000, 506), (10_000, 4789), (100_000, 45622)] {
        let r = u1(k, &cfg).unwrap();
        assert_eq!(r.w, w, "k = {k}");
        let (ow, ou) = u1_oracle(k, critical_defect(k, &cfg).unwrap() as f64);
        assert_eq!(ow, w);
        assert!((r.value.to_f64() - ou).abs() <= 1e-9 * ou);
        assert_eq!(r.g_bound, r.value.floor() + 1u32);
    }
}

#[test]
fn u1_argmin_approaches_xi() {
    let cfg = GateConfig::default();
    let gaps: Vec<f64> = [1000u64, 10_000, 100_000]
        .iter()
        .map(|&k| (u1(k, &cfg).unwrap().w as f64 / k as f64 - XI).abs())
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
    assert!(gaps[2] <= 0.05);
}

#[test]
fn u1_leading_term() {
    let cfg = GateConfig::default();
    let lead = u1_leading(&xi_and_c(128).unwrap().xi).unwrap();
    for k in [1000u64, 4000, 20_000, 100_000] {
        let r = u1(k, &cfg).unwrap();
        let ratio = r.value.to_f64() / (2.0 * (k * k) as f64);
        assert!(ratio <= lead.hi().to_f64() + 5.0 * (k as f64).powf(-1.0 / 3.0), "k = {k}");
    }
}

#[test]
fn xi_and_c_values() {
    let x = xi_and_c(64).unwrap();
    // Both constants are quoted truncated to six places.
    assert_eq!(&x.xi.lo_decimal(10)[..8], "0.424574");
    assert_eq!(&x.xi.hi_decimal(10)[..8], "0.424574");
    assert_eq!(&x.c.lo_decimal(10)[..8], "1.540789");
    assert_eq!(&x.c.hi_decimal(10)[..8], "1.540789");
    assert!((x.xi.to_f64() - XI).abs() < 1e-15);
    assert!((x.c.to_f64() - C).abs() < 1e-15);
    for p in [64u32, 100, 256, 1024] {
        let x = xi_and_c(p).unwrap();
        let tol = Rational::new(1, BigInt::from(1) << (p - 8) as usize).unwrap();
        assert!(x.xi.width() < tol && x.c.width() < tol, "precision {p}");
    }
}

#[test]
fn c_identity_at_root() {
    for p in [64u32, 200] {
        let x = xi_and_c(p).unwrap();
        let two_lead = u1_leading(&x.xi).unwrap().mul_rat(&Rational::from(2));
        let slack = CertInterval::new(
            -Rational::new(1, BigInt::from(1) << (p - 10) as usize).unwrap(),
            Rational::new(1, BigInt::from(1) << (p - 10) as usize).unwrap(),
            p,
        )
        .unwrap();
        assert!(two_lead.add(&slack).intersect(&x.c).is_some());
    }
}

fn poly(x: &Rational) -> Rational {
    Rational::from(6) * x.pow(3) + Rational::from(3) * x.square() - Rational::one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn xi_enclosure_straddles_and_narrows(p in 64u32..400) {
        let a = xi_and_c(p).unwrap();
        let b = xi_and_c(p + 1).unwrap();
        prop_assert!(poly(a.xi.lo()) <= Rational::zero() && poly(a.xi.hi()) >= Rational::zero());
        prop_assert!(a.xi.lo() <= b.xi.lo() && b.xi.hi() <= a.xi.hi());
        prop_assert!(b.xi.width() < a.xi.width());
    }

    #[test]
    fn u0_increasing_in_delta_v(k in 20u64..400, wf in 0.0f64..1.0, a in 0u64..1000, b in 0u64..1000) {
        let w = 1 + ((k - 2) as f64 * wf) as u64;
        let p = WaringParams::new(k, w, Rational::new(a.min(b), 7).unwrap());
        let q = WaringParams::new(k, w, Rational::new(a.max(b), 7).unwrap());
        if let (Ok(x), Ok(y)) = (u0(&p), u0(&q)) {
            prop_assert!(x <= y);
            prop_assert!(y < Rational::integer(p.t.clone() * 2u32));
        }
    }

    #[test]
    fn u0_no_defect_formula(k in 20u64..400, wf in 0.0f64..1.0) {
        let w = 1 + ((k - 2) as f64 * wf) as u64;
        let p = WaringParams::new(k, w, Rational::zero());
        let expect = Rational::integer(p.v.clone() * 2u32 + BigInt::from(w * (w - 1)));
        prop_assert_eq!(u0(&p).unwrap(), expect);
    }
}
