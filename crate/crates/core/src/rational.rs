//! Rational scalar type and small helpers.
//!
//! Coefficient arithmetic is exact.  `Rational` is a reduced fraction of
//! arbitrary-precision integers with positive denominator; both properties
//! are maintained by the underlying `Ratio` normalization on every
//! construction and operation.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// The integer `n` as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The reduced fraction `n/d`.  Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^k` for a possibly negative exponent.  Panics when `base == 0`
/// and `k < 0`.
pub fn pow_i64(base: &Rational, k: i64) -> Rational {
    if k >= 0 {
        let mut acc = Rational::one();
        for _ in 0..k {
            acc *= base;
        }
        acc
    } else {
        pow_i64(base, -k).recip()
    }
}

/// The fractional part of `x`, reduced to `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// True when `x` is an integer.
pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// The integer value of `x`, if `x` is an integer that fits in `i64`.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Best-effort conversion to `f64` (used only by the float cross-check).
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of leading digits for extreme values.
        let n = x.numer().to_f64().unwrap_or(if x.numer().is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// True when `m` divides the integer rational `x` (requires `x` integral).
pub fn divisible_by(x: &Rational, m: i64) -> bool {
    is_integer(x) && (x.numer() % BigInt::from(m)).is_zero()
}
