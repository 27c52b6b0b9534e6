//! Integer helpers: exact roots, factorials, small factorizations.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Floor of the square root of `n >= 0`.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    // num-integer runs Newton's method on the big integer; the result is exact.
    let r = n.sqrt();
    debug_assert!(&r * &r <= *n && (&r + 1u32) * (&r + 1u32) > *n);
    r
}

/// Ceiling of the square root of `n >= 0`.
pub fn ceil_sqrt(n: &BigInt) -> BigInt {
    let r = isqrt(n);
    if &r * &r == *n {
        r
    } else {
        r + 1u32
    }
}

pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = isqrt(n);
    (&r * &r == *n).then_some(r)
}

/// Floor of the n-th root of `x >= 0`.
pub fn iroot(x: &BigInt, n: u32) -> BigInt {
    assert!(!x.is_negative() && n >= 1);
    x.nth_root(n)
}

/// Ceiling of the cube root of `k`.
pub fn ceil_cbrt(k: u64) -> u64 {
    let r = iroot(&BigInt::from(k), 3).to_u64().unwrap();
    if r * r * r == k {
        r
    } else {
        r + 1
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Distinct prime divisors of `|n|` by trial division. Intended for the
/// small denominators that show up in the coefficient identities.
pub fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut p = BigInt::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            out.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1u32;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
