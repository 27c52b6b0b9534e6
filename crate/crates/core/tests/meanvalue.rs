use num_bigint::BigInt;
use proptest::prelude::*;
use vmvt::meanvalue::*;
use vmvt::meanvalue as mv;

const GRID: &[(u32, u32, u64)] = &[(2, 2, 20), (3, 2, 10), (2, 3, 10), (3, 3, 6)];

#[test]
fn census_matches_oracle_on_grid() {
    for &(s, k, xmax) in GRID {
        for x in 1..=xmax {
            let c = j(s, k, x).unwrap();
            assert_eq!(c, j_oracle(s, k, x).unwrap(), "({s}, {k}, {x})");
            assert!(diagonal_bounds(s, k, x, &c).holds);
        }
    }
}

#[test]
fn two_variable_closed_form() {
    for x in 1..=50 {
        assert_eq!(j(2, 2, x).unwrap(), j_two_closed(x));
        assert_eq!(j_with(2, 3, x, mv::Strategy::MeetInMiddle, DEFAULT_MEMORY_BUDGET).unwrap(), j_two_closed(x));
    }
}

#[test]
fn diagonal_examples() {
    let r = diagonal_bounds(2, 2, 10, &BigInt::from(190));
    assert_eq!((r.lower, r.upper), (BigInt::from(100), BigInt::from(10_000)));
    assert!(r.holds);
    assert_eq!(r.ratio, "1.900000");
    let r = diagonal_bounds(1, 4, 9, &j(1, 4, 9).unwrap());
    assert_eq!(r.lower, r.j);
}

#[test]
fn monotone_in_x_and_s() {
    for k in 1..=3u32 {
        for s in 1..=3u32 {
            let row: Vec<BigInt> = (1..=6).map(|x| j(s, k, x).unwrap()).collect();
            assert!(row.windows(2).all(|w| w[0] <= w[1]));
            for x in 1..=6 {
                assert!(j(s, k, x).unwrap() <= j(s + 1, k, x).unwrap());
            }
        }
    }
}

#[test]
fn thread_count_does_not_change_census() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let c = census(3, 3, 7).unwrap();
            let mut csv = Vec::new();
            c.write_csv(&mut csv).unwrap();
            let mut bin = Vec::new();
            c.write_binary(&mut bin).unwrap();
            (csv, bin, j_with(4, 2, 6, mv::Strategy::MeetInMiddle, DEFAULT_MEMORY_BUDGET).unwrap())
        })
    };
    assert_eq!(run(1), run(8));
}

#[test]
fn csv_layout() {
    let mut out = Vec::new();
    census(1, 2, 3).unwrap().write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "j1,j2,count\n1,1,1\n2,4,1\n3,9,1\n");
}

#[test]
fn binary_round_trip() {
    let c = census(3, 2, 9).unwrap();
    let mut buf = Vec::new();
    c.write_binary(&mut buf).unwrap();
    let back = ProfileCensus::read_binary(&buf[..]).unwrap();
    assert_eq!(back, c);
    let mut bad = buf.clone();
    bad[0] ^= 1;
    assert!(ProfileCensus::read_binary(&bad[..]).is_err());
    assert!(ProfileCensus::read_binary(&buf[..buf.len() - 1]).is_err());
}

#[test]
fn slopes() {
    let r = slope_estimate(1, 2, &[10, 20, 40, 80], DEFAULT_SLOPE_TOLERANCE).unwrap();
    assert!((r.slope - 1.0).abs() < 1e-12);
    assert_eq!(format!("{:.3}", r.slope), "1.000");
    let r = slope_estimate(2, 2, &[10, 20, 40, 80], DEFAULT_SLOPE_TOLERANCE).unwrap();
    assert!(r.slope > 2.0 && r.slope < 2.1);
    assert_eq!(r.verdict, SlopeVerdict::Consistent);
    let r = slope_estimate(3, 3, &[8, 16, 24, 32], DEFAULT_SLOPE_TOLERANCE).unwrap();
    assert_eq!(r.verdict, SlopeVerdict::Consistent);
    assert!(slope_estimate(2, 2, &[10, 20], DEFAULT_SLOPE_TOLERANCE).is_err());
    assert!(slope_estimate(2, 2, &[10, 20, 15], DEFAULT_SLOPE_TOLERANCE).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn mass_is_x_to_the_s(s in 1u32..=4, k in 1u32..=4, x in 1u64..=8) {
        let c = census(s, k, x).unwrap();
        prop_assert_eq!(c.mass(), BigInt::from(x).pow(s));
        let jv = c.sum_of_squares();
        prop_assert!(jv >= BigInt::from(x).pow(s));
        prop_assert_eq!(&jv, &j_with(s, k, x, mv::Strategy::MeetInMiddle, DEFAULT_MEMORY_BUDGET).unwrap());
    }

    #[test]
    fn profiles_within_range(s in 1u32..=3, k in 1u32..=3, x in 1u64..=6) {
        let c = census(s, k, x).unwrap();
        for p in c.table.keys() {
            for (j, v) in p.iter().enumerate() {
                let hi = s as i64 * (x as i64).pow(j as u32 + 1);
                prop_assert!(*v >= s as i64 && *v <= hi);
            }
        }
    }
}
