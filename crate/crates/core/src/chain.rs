//! Periodic XXZ chain in the one-magnon sector.
//!
//! Sites and momentum labels are centered: both run over
//! `-(N-1)/2 ..= (N-1)/2` so that site 0 is the quenched spin. The magnon
//! dispersion is `E(K) = J (Δ - cos K)` with `K = 2πm/N`.

use std::ops::RangeInclusive;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_int, Real};
use crate::sum::CompensatedComplexSum;

/// Physical configuration of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams<T> {
    n_sites: usize,
    coupling_j: T,
    anisotropy_delta: T,
    hbar: T,
}

impl<T: Real> ChainParams<T> {
    pub fn new(n_sites: usize, coupling_j: T, anisotropy_delta: T, hbar: T) -> Result<Self> {
        if n_sites < 3 || n_sites % 2 == 0 {
            return Err(Error::Validation(format!(
                "number of sites must be odd and at least 3, got {n_sites}"
            )));
        }
        if !(coupling_j.is_finite() && coupling_j > T::zero()) {
            return Err(Error::Validation(format!(
                "coupling J must be positive and finite, got {coupling_j}"
            )));
        }
        if !(hbar.is_finite() && hbar > T::zero()) {
            return Err(Error::Validation(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if !anisotropy_delta.is_finite() {
            return Err(Error::Validation(format!(
                "anisotropy must be finite, got {anisotropy_delta}"
            )));
        }
        Ok(Self {
            n_sites,
            coupling_j,
            anisotropy_delta,
            hbar,
        })
    }

    /// `J = ħ = 1` with the given anisotropy.
    pub fn unit(n_sites: usize, anisotropy_delta: T) -> Result<Self> {
        Self::new(n_sites, T::one(), anisotropy_delta, T::one())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn coupling_j(&self) -> T {
        self.coupling_j
    }

    pub fn anisotropy_delta(&self) -> T {
        self.anisotropy_delta
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// `(N-1)/2`, the largest site or momentum label.
    pub fn half_width(&self) -> i64 {
        (self.n_sites as i64 - 1) / 2
    }

    pub fn site_range(&self) -> RangeInclusive<i64> {
        -self.half_width()..=self.half_width()
    }

    pub fn check_site(&self, site: i64) -> Result<()> {
        let h = self.half_width();
        if site < -h || site > h {
            return Err(Error::SiteOutOfRange {
                site,
                min: -h,
                max: h,
            });
        }
        Ok(())
    }

    /// Frequency unit `J/ħ`.
    pub fn frequency_unit(&self) -> T {
        self.coupling_j / self.hbar
    }

    /// Maximal magnon group velocity in sites per unit time.
    pub fn group_velocity(&self) -> T {
        self.coupling_j / self.hbar
    }

    /// `2π/N`.
    pub fn theta(&self) -> T {
        T::TAU() / from_int(self.n_sites as i64)
    }

    /// `cos(2π|m|/N)` indexed by `|m|` for `|m| ≤ (N-1)/2`.
    ///
    /// Entries for `m` and `-m` are shared, so sums built from this table are
    /// bitwise invariant under `m -> -m`.
    pub fn cosine_table(&self) -> Vec<T> {
        let theta = self.theta();
        (0..=self.half_width())
            .map(|m| (theta * from_int(m)).cos())
            .collect()
    }

    /// `exp(2πik/N)` for `k = 0..N`, with `table[N-k]` the exact conjugate of
    /// `table[k]`.
    pub fn phase_table(&self) -> Vec<Complex<T>> {
        let n = self.n_sites;
        let theta = self.theta();
        let mut table = vec![Complex::new(T::one(), T::zero()); n];
        for k in 1..=n / 2 {
            let z = Complex::new((theta * from_int(k as i64)).cos(), (theta * from_int(k as i64)).sin());
            table[k] = z;
            table[n - k] = z.conj();
        }
        table
    }

    /// Reduces an integer phase index to `0..N`.
    #[inline]
    pub fn phase_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n_sites as i64) as usize
    }
}

/// One plane-wave eigenmode of the one-magnon sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumMode<T> {
    pub m: i64,
    /// `K = 2πm/N`, radians per site.
    pub momentum_k: T,
    /// `J (Δ - cos K)`.
    pub energy: T,
}

/// All `N` modes ordered by `m` ascending.
pub fn momenta<T: Real>(params: &ChainParams<T>) -> Vec<MomentumMode<T>> {
    let theta = params.theta();
    let cos = params.cosine_table();
    params
        .site_range()
        .map(|m| MomentumMode {
            m,
            momentum_k: theta * from_int(m),
            energy: params.coupling_j * (params.anisotropy_delta - cos[m.unsigned_abs() as usize]),
        })
        .collect()
}

/// Single-magnon amplitude `c_q(t)` for the state initially localized on site 0.
///
/// `c_q(t) = (1/N) Σ_m exp(-i E(K_m) t/ħ) exp(i K_m q)`. The anisotropy enters
/// only through the global phase `exp(-i J Δ t/ħ)`, which is applied after the
/// mode sum so that `|c_q|` does not depend on Δ.
pub fn amplitude<T: Real>(params: &ChainParams<T>, site: i64, t: T) -> Result<Complex<T>> {
    params.check_site(site)?;
    if !(t.is_finite() && t >= T::zero()) {
        return Err(Error::Validation(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(amplitude_unchecked(params, &params.cosine_table(), site, t))
}

pub(crate) fn amplitude_unchecked<T: Real>(
    params: &ChainParams<T>,
    cos: &[T],
    site: i64,
    t: T,
) -> Complex<T> {
    let theta = params.theta();
    let omega_t = params.frequency_unit() * t;
    let mut acc = CompensatedComplexSum::new();
    for m in params.site_range() {
        // exp(+i J cos K t/ħ) exp(i K q)
        let phase = omega_t * cos[m.unsigned_abs() as usize] + theta * from_int(m * site);
        acc.add(Complex::new(phase.cos(), phase.sin()));
    }
    let global = -(omega_t * params.anisotropy_delta);
    acc.value() * Complex::new(global.cos(), global.sin()) / from_int::<T>(params.n_sites as i64)
}

/// Closed-form state vector at time `t`, indexed by site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeVector<T> {
    pub time: T,
    /// Entry `i` holds site `i - (N-1)/2`.
    pub entries: Vec<Complex<T>>,
}

impl<T: Real> AmplitudeVector<T> {
    pub fn closed_form(params: &ChainParams<T>, t: T) -> Result<Self> {
        if !(t.is_finite() && t >= T::zero()) {
            return Err(Error::Validation(format!("time must be finite and non-negative, got {t}")));
        }
        let cos = params.cosine_table();
        let entries = params
            .site_range()
            .map(|p| amplitude_unchecked(params, &cos, p, t))
            .collect();
        Ok(Self { time: t, entries })
    }

    pub fn half_width(&self) -> i64 {
        (self.entries.len() as i64 - 1) / 2
    }

    pub fn site(&self, p: i64) -> Option<Complex<T>> {
        let idx = p + self.half_width();
        if idx < 0 {
            return None;
        }
        self.entries.get(idx as usize).copied()
    }

    pub fn norm_sqr(&self) -> T {
        crate::sum::compensated_sum(self.entries.iter().map(|c| c.norm_sqr()))
    }

    /// Largest entrywise modulus of the difference with `other`.
    pub fn max_deviation(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

/// Maximal magnon group velocity `J/ħ`.
pub fn group_velocity<T: Real>(params: &ChainParams<T>) -> T {
    params.group_velocity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit(n: usize, delta: f64) -> ChainParams<f64> {
        ChainParams::<f64>::unit(n, delta).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ChainParams::<f64>::unit(4, 0.0).is_err());
        assert!(ChainParams::<f64>::unit(1, 0.0).is_err());
        assert!(ChainParams::<f64>::new(5, 0.0, 0.0, 1.0).is_err());
        assert!(ChainParams::<f64>::new(5, 1.0, 0.0, -1.0).is_err());
        assert!(ChainParams::<f64>::new(5, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn five_site_momenta() {
        let modes = momenta(&unit(5, 1.0));
        let ms: Vec<i64> = modes.iter().map(|m| m.m).collect();
        assert_eq!(ms, vec![-2, -1, 0, 1, 2]);
        assert!((modes[0].momentum_k + 4.0 * PI / 5.0).abs() < 1e-15);
        assert!((modes[4].momentum_k - 4.0 * PI / 5.0).abs() < 1e-15);
        assert_eq!(modes[2].energy, 0.0);
        let total: f64 = modes.iter().map(|m| m.momentum_k).sum();
        assert!(total.abs() < 1e-15);
    }

    #[test]
    fn dispersion_is_even() {
        let modes = momenta(&unit(9, 0.0));
        let e = |m: i64| modes.iter().find(|x| x.m == m).unwrap().energy;
        let expected = -(4.0 * PI / 9.0).cos();
        assert_eq!(e(2), e(-2));
        assert!((e(2) - expected).abs() < 1e-15);
    }

    #[test]
    fn initial_condition() {
        for n in [3, 5, 33] {
            let p = unit(n, 0.7);
            for q in p.site_range() {
                let c = amplitude(&p, q, 0.0).unwrap();
                let expected = if q == 0 { 1.0 } else { 0.0 };
                assert!((c - Complex::new(expected, 0.0)).norm() < 1e-15, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn site_out_of_range() {
        let p = unit(5, 0.0);
        assert!(matches!(
            amplitude(&p, 3, 1.0),
            Err(Error::SiteOutOfRange { site: 3, min: -2, max: 2 })
        ));
    }

    // Independent ascending series for J_0, used only as a test oracle.
    fn bessel_j0_series(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -(x * x / 4.0) / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn large_chain_amplitude_is_bessel() {
        let p = unit(201, 0.0);
        let c = amplitude(&p, 0, 2.0).unwrap();
        assert!((c - Complex::new(bessel_j0_series(2.0), 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn group_velocity_values() {
        assert_eq!(group_velocity(&ChainParams::<f64>::new(5, 1.0, 0.0, 1.0).unwrap()), 1.0);
        assert_eq!(group_velocity(&ChainParams::<f64>::new(5, 2.0, 0.0, 1.0).unwrap()), 2.0);
        assert_eq!(group_velocity(&ChainParams::<f64>::new(5, 1.0, 0.0, 2.0).unwrap()), 0.5);
    }

    #[test]
    fn phase_table_conjugate_pairs() {
        let p = unit(9, 0.0);
        let t = p.phase_table();
        for k in 1..9 {
            assert_eq!(t[k], t[9 - k].conj());
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let p = ChainParams::<f32>::unit(33, 0.5).unwrap();
        let v = AmplitudeVector::closed_form(&p, 3.0).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-5);
    }
}
