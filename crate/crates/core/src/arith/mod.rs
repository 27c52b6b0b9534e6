//! Exact and certified arithmetic: rationals, quadratic surds, enclosures.

mod int;
mod interval;
mod quad;
mod rational;

pub use int::{binomial, ceil_cbrt, ceil_sqrt, factorial, iroot, is_perfect_square, isqrt, prime_factors};
pub use interval::{int_power_root, refine, CertInterval, Cmp, DEFAULT_BITS, MAX_BITS};
pub use quad::{gt_times_sqrt, QuadExt};
pub use rational::{Rational, Round};
