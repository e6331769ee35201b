use serde::{Deserialize, Serialize};

use super::special::{alpha, bessel_j, rational_to_real};
use crate::chain::ChainParams;
use crate::error::{Error, Result};
use crate::scalar::{from_int, lit, Real};
use crate::sum::CompensatedSum;

/// Partial sum of the transient Taylor series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorSum<T> {
    pub value: T,
    pub terms: usize,
    /// False when the terms were still growing at the cutoff.
    pub converged: bool,
}

/// `Σ_{k̄<K} C(2(q+k̄), q+k̄) (−1)^k̄ / (k̄! (2q+k̄)!) (Jt/2ħ)^{2(q+k̄)}`.
///
/// Consecutive terms are built from their ratio
/// `−2(2n+1)/(n+1) · y² / ((k̄+1)(2q+k̄+1))`, `n = q+k̄`, `y = Jt/2ħ`.
pub fn taylor_series<T: Real>(params: &ChainParams<T>, q: u64, t: T, terms: usize) -> Result<TaylorSum<T>> {
    if terms == 0 {
        return Err(Error::Validation("taylor_series needs at least one term".into()));
    }
    if !(t.is_finite() && t >= T::zero()) {
        return Err(Error::Validation(format!("time must be finite and non-negative, got {t}")));
    }
    let y = params.frequency_unit() * t / lit(2.0);
    let y2 = y * y;
    // leading term (y^q / q!)²
    let root = (1..=q).fold(T::one(), |acc, j| acc * y / from_int(j as i64));
    let mut term = root * root;
    let mut acc = CompensatedSum::new();
    let mut prev = T::infinity();
    for k in 0..terms as u64 {
        acc.add(term);
        if k + 1 == terms as u64 {
            break;
        }
        prev = term.abs();
        let n: T = from_int((q + k) as i64);
        let ratio = -(lit::<T>(2.0) * (lit::<T>(2.0) * n + T::one()) / (n + T::one())) * y2
            / (from_int::<T>(k as i64 + 1) * from_int((2 * q + k + 1) as i64));
        term = term * ratio;
    }
    let converged = terms == 1 || term.abs() <= prev || term == T::zero();
    Ok(TaylorSum {
        value: acc.value(),
        terms,
        converged,
    })
}

/// `α_q J_{2q}(2Jt/ħ)`.
pub fn transient<T: Real>(params: &ChainParams<T>, q: u64, t: T) -> Result<T> {
    if q == 0 {
        return Err(Error::Validation("transient approximation expects q ≥ 1".into()));
    }
    if q > 64 {
        return Err(Error::Capability(format!("transient order 2q={} above Bessel envelope", 2 * q)));
    }
    if !(t.is_finite() && t >= T::zero()) {
        return Err(Error::Validation(format!("time must be finite and non-negative, got {t}")));
    }
    let x = lit::<T>(2.0) * params.frequency_unit() * t;
    let j = bessel_j(2 * q as u32, x)?;
    Ok(rational_to_real::<T>(&alpha(q)) * j)
}
