//! Near-cutoff string of dominant poles.
//!
//! For `m₂ = m₄` the pole frequency is `(J/ħ)(cos θm₃ − cos θm₁)`. Writing
//! `a = |m₁|`, `b = |m₃|` and
//!
//! ```text
//! ε = a − b − N/2,   δ = a + b − N/2
//! ```
//!
//! the frequency is exactly `(2J/ħ) cos(πε/N) cos(πδ/N)`. The string is the
//! family `b < N/4 < a` with `a, b ≥ 1`, which approaches the cutoff `2J/ħ` as
//! `ε, δ → 0`. For odd `N` both ε and δ are half-integers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{bucket_key, enumerate_poles, SpectrumMode, MERGE_TOLERANCE};
use crate::chain::ChainParams;
use crate::error::{Error, Result};
use crate::scalar::{from_int, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringPole<T> {
    /// `|m₁| − |m₃| − N/2` (half-integer).
    pub epsilon: T,
    /// `|m₁| + |m₃| − N/2` (half-integer).
    pub delta: T,
    pub omega: T,
    /// Merged intensity of the pole this `(ε, δ)` lands on.
    pub intensity: T,
}

impl<T: Real> StringPole<T> {
    /// `(2J/ħ) cos(πε/N) cos(πδ/N)`.
    pub fn parametrized_omega(&self, params: &ChainParams<T>) -> T {
        let n: T = from_int(params.n_sites() as i64);
        let pi = T::PI();
        lit::<T>(2.0) * params.frequency_unit() * (pi * self.epsilon / n).cos() * (pi * self.delta / n).cos()
    }
}

/// Poles of the near-cutoff string of spin `q`, ordered by `ω` descending.
///
/// Intensities are read from the dominant-only spectrum, so they carry the
/// full merged weight of each frequency rather than a fitted proportionality.
/// Several `(ε, δ)` landing on the same merged pole are reported once.
pub fn string_poles<T: Real>(params: &ChainParams<T>, q: i64) -> Result<Vec<StringPole<T>>> {
    if q == 0 {
        return Err(Error::Capability(
            "string analysis is defined for propagating spins, q ≥ 1".into(),
        ));
    }
    if q < 0 {
        return Err(Error::Validation(format!("string analysis expects q ≥ 1, got {q}")));
    }
    let spectrum = enumerate_poles(params, q, SpectrumMode::DominantOnly)?;
    let inv_tol: T = lit(1.0 / MERGE_TOLERANCE);
    let unit = params.frequency_unit();
    let by_key: HashMap<i64, T> = spectrum.poles.iter().map(|p| (p.key, p.intensity)).collect();

    let n = params.n_sites() as i64;
    let h = params.half_width();
    let cos = params.cosine_table();
    let half_n: T = lit::<T>(0.5) * from_int(n);
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for a in 1..=h {
        // a > N/4
        if 4 * a <= n {
            continue;
        }
        for b in 1..=h {
            // b < N/4
            if 4 * b >= n {
                break;
            }
            let raw = cos[b as usize] - cos[a as usize];
            let key = bucket_key(raw, inv_tol);
            let Some(&intensity) = by_key.get(&key) else {
                return Err(Error::InvariantViolation(format!(
                    "string pole (|m1|={a}, |m3|={b}) missing from the dominant spectrum"
                )));
            };
            if seen.insert(key, ()).is_some() {
                continue;
            }
            out.push(StringPole {
                epsilon: from_int::<T>(a - b) - half_n,
                delta: from_int::<T>(a + b) - half_n,
                omega: raw * unit,
                intensity,
            });
        }
    }
    out.sort_by(|x, y| y.omega.partial_cmp(&x.omega).expect("finite frequencies"));
    Ok(out)
}

/// Midpoint frequency of the first sign change along the string, walking down
/// from the cutoff.
pub fn first_zero_crossing<T: Real>(params: &ChainParams<T>, q: i64) -> Result<T> {
    if q < 2 {
        return Err(Error::Validation(format!("zero-crossing search expects q ≥ 2, got {q}")));
    }
    if (params.n_sites() as i64) < 8 * q {
        return Err(Error::Validation(format!(
            "N={} too small to resolve the crossing for q={q}; need N ≥ {}",
            params.n_sites(),
            8 * q
        )));
    }
    let string = string_poles(params, q)?;
    string
        .windows(2)
        .find(|w| w[0].intensity * w[1].intensity < T::zero())
        .map(|w| (w[0].omega + w[1].omega) / lit(2.0))
        .ok_or_else(|| {
            Error::NotFound(format!(
                "no sign change among {} string poles for q={q}, N={}",
                string.len(),
                params.n_sites()
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p201() -> ChainParams<f64> {
        ChainParams::<f64>::unit(201, 0.0).unwrap()
    }

    #[test]
    fn q_zero_is_rejected() {
        assert!(matches!(string_poles(&p201(), 0), Err(Error::Capability(_))));
    }

    #[test]
    fn parametrization_reproduces_frequency() {
        let p = ChainParams::<f64>::unit(41, 0.3).unwrap();
        for s in string_poles(&p, 2).unwrap() {
            assert!((s.omega - s.parametrized_omega(&p)).abs() <= 1e-12);
            assert!(s.omega < 2.0 && s.omega > 0.0);
        }
    }

    #[test]
    fn leading_sign_alternates_with_q() {
        let p = p201();
        for q in 1..=6 {
            let s = string_poles(&p, q).unwrap();
            let sign = s[0].intensity.signum();
            assert_eq!(sign, if q % 2 == 0 { 1.0 } else { -1.0 }, "q={q}");
        }
    }

    #[test]
    fn crossing_needs_resolution() {
        let p = ChainParams::<f64>::unit(31, 0.0).unwrap();
        assert!(matches!(first_zero_crossing(&p, 4), Err(Error::Validation(_))));
        assert!(matches!(first_zero_crossing(&p, 1), Err(Error::Validation(_))));
    }
}
