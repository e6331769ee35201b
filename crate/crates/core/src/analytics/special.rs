//! Self-contained special functions.
//!
//! Combinatorial quantities are exact big rationals. The Bessel function of
//! the first kind is summed from its ascending series in binary fixed point
//! with enough fractional bits that the cancellation between terms (up to
//! `~e^x` in size for argument `x`) costs no accuracy in the final double.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Largest argument accepted by [`bessel_j`].
pub const BESSEL_MAX_ARG: f64 = 100.0;
/// Largest order accepted by [`bessel_j`].
pub const BESSEL_MAX_ORDER: u32 = 128;

/// Fractional bits of the fixed-point accumulator.
const FIXED_BITS: u64 = 512;

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `n! / (k₁! k₂! …)`; the parts must sum to `n`.
pub fn multinomial(n: u64, parts: &[u64]) -> BigInt {
    assert_eq!(parts.iter().sum::<u64>(), n, "multinomial parts must sum to n");
    parts.iter().fold(factorial(n), |acc, &k| acc / factorial(k))
}

/// Rising factorial `(a)_j` for an integer base.
pub fn pochhammer(a: i64, j: u64) -> BigInt {
    (0..j as i64).fold(BigInt::one(), |acc, i| acc * (a + i))
}

/// `₂F₁(−k̄, −k̄−q; q+1; 1)`, a finite sum since the first upper parameter is a
/// non-positive integer.
pub fn hyp2f1_terminating(kbar: u64, q: u64) -> BigRational {
    let a = -(kbar as i64);
    let b = -(kbar as i64) - q as i64;
    let c = q as i64 + 1;
    (0..=kbar).fold(BigRational::zero(), |acc, j| {
        let num = pochhammer(a, j) * pochhammer(b, j);
        let den = pochhammer(c, j) * factorial(j);
        acc + BigRational::new(num, den)
    })
}

/// `α_q = 4^{−q} C(2q, q)`.
pub fn alpha(q: u64) -> BigRational {
    BigRational::new(binomial(2 * q, q), BigInt::one() << (2 * q))
}

pub fn rational_to_real<T: Real>(r: &BigRational) -> T {
    lit(r.to_f64().expect("rational within f64 range"))
}

/// Splits a finite non-negative double into `mantissa · 2^exponent`.
fn decompose(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (BigInt::from(frac), -1074)
    } else {
        (BigInt::from(frac | (1u64 << 52)), exp_bits - 1075)
    }
}

fn shift(v: BigInt, by: i64) -> BigInt {
    if by >= 0 {
        v << by as u64
    } else {
        v >> (-by) as u64
    }
}

/// Bessel function of the first kind `J_n(x)` for `0 ≤ x ≤ 100`, `n ≤ 128`.
///
/// `J_n(x) = Σ_k (−1)^k (x/2)^{2k+n} / (k! (n+k)!)`, summed exactly in
/// 512-bit fixed point and rounded once at the end.
pub fn bessel_j<T: Real>(order: u32, x: T) -> Result<T> {
    let xf = x.to_f64().unwrap_or(f64::NAN);
    if !(0.0..=BESSEL_MAX_ARG).contains(&xf) {
        return Err(Error::Capability(format!(
            "bessel_j argument {xf} outside [0, {BESSEL_MAX_ARG}]"
        )));
    }
    if order > BESSEL_MAX_ORDER {
        return Err(Error::Capability(format!(
            "bessel_j order {order} above {BESSEL_MAX_ORDER}"
        )));
    }
    if xf == 0.0 {
        return Ok(if order == 0 { T::one() } else { T::zero() });
    }
    let (mant, exp) = decompose(xf);
    let n = order as u64;
    let frac = FIXED_BITS as i64;

    // (x/2)^n / n! in fixed point: mant^n 2^{n(exp−1)} / n!
    let mut term = shift(mant.pow(order), n as i64 * (exp - 1) + frac) / factorial(n);
    // x²/4 = mant² 2^{2exp−2}
    let x2 = &mant * &mant;
    let x2_shift = 2 * exp - 2;
    let mut sum = term.clone();
    let peak = (xf / 2.0).ceil() as u64 + 1;
    let mut k = 0u64;
    loop {
        k += 1;
        term = -shift(term * &x2, x2_shift) / (BigInt::from(k) * BigInt::from(n + k));
        if term.is_zero() && k > peak {
            break;
        }
        sum += &term;
        if k > peak && term.abs() <= BigInt::one() {
            break;
        }
    }
    let value = fixed_to_f64(&sum, FIXED_BITS);
    Ok(lit(value))
}

fn fixed_to_f64(v: &BigInt, frac_bits: u64) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    // keep 64 significant bits before the single rounding to f64
    let bits = v.bits();
    let drop = bits.saturating_sub(64);
    let top = (v.abs() >> drop).to_u64().expect("64-bit head");
    let mag = top as f64 * 2f64.powi(drop as i32 - frac_bits as i32);
    if v.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}
