use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use vmvt::arith::{QuadExt, Rational};
use vmvt::exponents::{below_theta_plus, r0, theta_data, IterationParams};
use vmvt::recurrences::*;

fn all_tuples(r: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..r).map(move |m| [t.clone(), vec![m]].concat())).collect();
    }
    out
}

#[test]
fn weights_sum_to_one_up_to_200() {
    for s in 2..=200u64 {
        for r in 1..s {
            // phi_weights asserts both identities internally.
            phi_weights(r, s).unwrap();
        }
    }
    let w = phi_weights(3, 14).unwrap();
    let sum: Rational = w.phi.iter().cloned().sum();
    assert_eq!(sum, Rational::frac(3, 14));
}

#[test]
fn zero_tuple_is_pure_powers() {
    let b = BigInt::from(7);
    let seq = iterate_ab(6, 2, &b, &[0, 0, 0, 0], &vec![BigInt::zero(); 4], Flavor::SqrtK).unwrap();
    for (n, bn) in seq.b.iter().enumerate() {
        assert_eq!(*bn, &b * BigInt::from(6u64.pow(n as u32)));
    }
    let t = tilde_sequence(6, 2, &[0, 0, 0], Flavor::EllK).unwrap();
    assert_eq!(t.k_m, QuadExt::rational(6, Rational::from(216)).unwrap());
}

#[test]
fn k9_growth_exhaustive() {
    let h = vec![BigInt::zero(); 6];
    for m in all_tuples(3, 6) {
        let s = iterate_ab(9, 3, &BigInt::from(100), &m, &h, Flavor::SqrtK).unwrap();
        assert!(s.b.windows(2).all(|w| w[1] > BigInt::from(3) * &w[0]), "{m:?}");
        assert_eq!(s.checks.growth, Some(true));
    }
}

#[test]
fn out_of_range_m_rejected() {
    assert!(iterate_ab(9, 3, &BigInt::from(1), &[3], &[BigInt::zero()], Flavor::SqrtK).is_err());
    assert!(tilde_sequence(9, 3, &[5], Flavor::SqrtK).is_err());
}

#[test]
fn big_offsets_skip_sandwich() {
    let b = BigInt::from(10);
    let huge = BigInt::from(10).pow(9);
    let s = iterate_ab(9, 3, &b, &[1, 1], &[huge.clone(), huge], Flavor::SqrtK).unwrap();
    assert_eq!(s.checks.sandwich, None);
    assert_eq!(s.b.len(), 3);
}

#[test]
fn closed_form_on_square_k() {
    for k in [4u64, 9, 16, 25] {
        let all = hypothesis_grid(k);
        for r in 2..=r0(k) {
            let grid: Vec<u64> = all.iter().copied().filter(|&(kk, rr, _)| kk == k && rr == r).map(|x| x.2).collect();
            for &s in [grid[0], grid[grid.len() / 2], grid[grid.len() - 1]].iter() {
                let t = bn_table(k, r, s, 25).unwrap();
                assert!(t.rows.iter().all(|row| row.b.is_rational()));
                assert_eq!(t.closed_form_agrees, Some(true), "k={k} r={r} s={s}");
            }
        }
    }
}

#[test]
fn min_valid_r_matches_theta_on_grid() {
    for (k, r, s) in hypothesis_grid(12) {
        let t = theta_data(&IterationParams::new(k, r, s).unwrap()).unwrap();
        let found = min_valid_r(k, r, s, 50).unwrap().is_some();
        assert_eq!(found, below_theta_plus(s, &t), "k={k} r={r} s={s}");
    }
}

#[test]
fn r1_is_geometric() {
    let t = bn_table(6, 1, 5, 6).unwrap();
    assert!(t.theta.beta.is_zero());
    let ratio = &t.theta.alpha / Rational::from(5);
    for w in t.rows.windows(2) {
        assert_eq!(w[1].b, w[0].b.scale(&ratio));
    }
}

#[test]
fn refined_window_lower_bound() {
    for k in [27u64, 64] {
        for rr in 1..=4usize {
            for m in refined_window_tuples_from_zero(k, rr) {
                let t = tilde_sequence(k, k - ell(k), &m, Flavor::EllK).unwrap();
                assert!(t.in_window);
                assert_eq!(t.bounds, Some(true), "k={k} m={m:?}");
                assert_eq!(t.growth, Some(true));
            }
        }
    }
}

// All m with 0 <= m_n <= v~_n - 1, enumerated through tilde_sequence itself.
fn refined_window_tuples_from_zero(k: u64, rr: usize) -> Vec<Vec<u64>> {
    let r = k - ell(k);
    let mut out = vec![vec![]];
    for _ in 0..rr {
        let mut next = Vec::new();
        for m in out {
            let probe = [m.clone(), vec![0]].concat();
            let t = tilde_sequence(k, r, &probe, Flavor::EllK).unwrap();
            let v: u64 = t.v[m.len()].clone().try_into().unwrap();
            // Sample the window ends plus a middle point to keep R = 4 cheap.
            let mut picks = vec![0, v / 2, v.saturating_sub(1)];
            picks.dedup();
            for mi in picks.into_iter().filter(|&mi| mi < v) {
                next.push([m.clone(), vec![mi]].concat());
            }
        }
        out = next;
    }
    out
}

#[test]
fn refined_s0_small_cases() {
    let rep = s0_section11(27, 273, 1).unwrap();
    // R = 1: s_0 = s * sum_{m < v~_1} phi_m b~_1(m).
    let w = phi_weights(24, 273).unwrap();
    let direct: Rational = (0..18u64).map(|m| &w.phi[m as usize] * Rational::from(27 - m) - &w.phi[m as usize] * Rational::from(m) * Rational::frac(1, 3)).sum();
    assert_eq!(rep.b_n[0], direct);
    assert_eq!(rep.s0_pow_r, Rational::from(273) * direct);
    let rep = s0_section11(27, 273, 3).unwrap();
    assert!(rep.lower_bound_holds.iter().all(|x| *x == Some(true)));
    assert!(rep.k_m_bounds_hold);
    assert!(!rep.degenerate);
}

#[test]
fn refined_audit_random_k27() {
    let b = BigInt::from(10_000);
    let grid = refined_random_grid(27, 3, &b, 200, 11);
    assert_eq!(grid.len(), 200);
    let a = refined_audit(27, &b, &grid).unwrap();
    assert!(a.violations.is_empty());
    assert_eq!(a.checked, 200);
}

#[test]
fn refined_zero_offsets_exact() {
    let b = BigInt::from(999);
    let m = [3u64, 5, 2];
    let p = refined_point(27, &b, &m, &[BigInt::zero(), BigInt::zero(), BigInt::zero()]).unwrap();
    assert!(p.in_hypothesis);
    let t = tilde_sequence(27, 24, &m, Flavor::EllK).unwrap();
    let seq = iterate_ab(27, 24, &b, &m, &[BigInt::zero(), BigInt::zero(), BigInt::zero()], Flavor::EllK).unwrap();
    // a_0 = floor(999/3) = b/l exactly, so b_R = k_m b.
    assert_eq!(Rational::from(seq.b[3].clone()), t.k_m.rat() * &Rational::from(999));
}

#[test]
fn refined_point_outside_hypothesis() {
    let b = BigInt::from(10);
    let p = refined_point(27, &b, &[0], &[BigInt::zero()]).unwrap();
    assert!(!p.in_hypothesis);
    assert_eq!(p.sandwich, None);
}

proptest! {
    #[test]
    fn recursion_satisfies_second_order(k in 4u64..30, rsel in 0u64..100, sel in 0u64..1000) {
        let r = 1 + rsel % (k - 1);
        let s = r + 1 + sel % (k * r);
        let p = IterationParams::new(k, r, s).unwrap();
        let Ok(t) = theta_data(&p) else { return Ok(()) };
        let rows = bn_recursion(&p, &t, 6).unwrap();
        let sq = Rational::from(s);
        for n in 0..4 {
            let lhs = &(&rows[n + 2].b.scale(&sq.square()) - &rows[n + 1].b.scale(&(&sq * &t.alpha))) + &rows[n].b.scale(&t.beta);
            prop_assert!(lhs.is_zero());
        }
    }

    #[test]
    fn closed_form_agrees(k in 4u64..20, rsel in 0u64..100, sel in 0u64..1000) {
        let r = 2 + rsel % (k - 2);
        let s = r + 1 + sel % (k * r);
        if let Ok(t) = bn_table(k, r, s, 8) {
            prop_assert_ne!(t.closed_form_agrees, Some(false));
        }
    }

    #[test]
    fn growth_and_sandwich(k in 4u64..=10, ms in proptest::collection::vec(0u64..100, 1..=5), hsel in 0u8..3, b in 1u64..500) {
        let r = r0(k);
        let m: Vec<u64> = ms.iter().map(|x| x % r).collect();
        let rr = m.len() as u32;
        let max = BigInt::from(16) * BigInt::from(k).pow(rr) * BigInt::from(b);
        let hv = match hsel { 0 => BigInt::zero(), 1 => &max / 2, _ => max };
        let s = iterate_ab(k, r, &BigInt::from(b), &m, &vec![hv; m.len()], Flavor::SqrtK).unwrap();
        prop_assert_eq!(s.checks.growth, Some(true));
        prop_assert_eq!(s.checks.sandwich, Some(true));
        prop_assert!(offset_kernel_grows(k, &m));
    }
}
