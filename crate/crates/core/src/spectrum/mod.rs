//! Frequency-domain form of the single-spin entanglement measure.
//!
//! Expanding `Q_q(t) = |c_q|² Σ_{p≠q} |c_p|²` in plane waves gives a sum over
//! four-tuples of momentum labels `(m₁, m₂, m₃, m₄)`. Each tuple contributes
//! the frequency
//!
//! ```text
//! ω = (J/ħ) (cos θm₂ − cos θm₁ − cos θm₄ + cos θm₃),   θ = 2π/N
//! ```
//!
//! with the complex weight
//!
//! ```text
//! N⁻⁴ [ N δ(m₂,m₄) e^{iθq(m₁−m₃)} − e^{iθq(m₁−m₃+m₄−m₂)} ]
//! ```
//!
//! Tuples whose frequencies agree to within [`MERGE_TOLERANCE`] are merged into
//! a single [`Pole`]. Because `m → −m` maps every tuple to one with the same
//! frequency and the conjugate weight, merged weights are real.
//!
//! Enumeration is split over `m₁`. Each `m₁` slice is reduced on its own and
//! the slices are folded in ascending order, so the result is bitwise
//! independent of the number of worker threads.

mod strings;

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::ChainParams;
use crate::error::{Error, Result};
use crate::scalar::{from_int, lit, Real};
use crate::sum::{compensated_sum, CompensatedComplexSum, CompensatedSum};

pub use strings::{first_zero_crossing, string_poles, StringPole};

/// Frequencies closer than this (in units of `J/ħ`) share a pole.
pub const MERGE_TOLERANCE: f64 = 1e-9;
/// Largest chain accepted by full enumeration.
pub const FULL_MODE_MAX_SITES: usize = 65;
/// Largest chain accepted by [`suppressed_tail`].
pub const TAIL_MAX_SITES: usize = 129;
/// Bound on the discarded imaginary part of a pole, relative to `Σ|I|`.
pub const RESIDUAL_BOUND: f64 = 1e-10;

/// Number of `m₁` slices reduced concurrently before folding.
const SLICE_BATCH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    /// Every four-tuple.
    Full,
    /// Only tuples with `cos θm₂ = cos θm₄`, summed over `m₂` in closed form.
    DominantOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleClass {
    Dominant,
    Suppressed,
}

impl PoleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PoleClass::Dominant => "dominant",
            PoleClass::Suppressed => "suppressed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole<T> {
    /// Frequency in the same units as `J/ħ`.
    pub omega: T,
    pub intensity: T,
    /// Magnitude of the imaginary part dropped at merge.
    pub raw_complex_residual: T,
    pub tuple_count: u64,
    /// Tuples with `m₂ = m₄` merged into this pole.
    pub structural_count: u64,
    pub class: PoleClass,
    /// Quantized frequency bucket the pole was merged under.
    #[serde(skip)]
    pub(crate) key: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    pub q: i64,
    pub params: ChainParams<T>,
    pub mode: SpectrumMode,
    /// Sorted by `omega` ascending; mirror-symmetric about zero.
    pub poles: Vec<Pole<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn intensity_sum(&self) -> T {
        compensated_sum(self.poles.iter().map(|p| p.intensity))
    }

    pub fn total_abs_intensity(&self) -> T {
        compensated_sum(self.poles.iter().map(|p| p.intensity.abs()))
    }

    pub fn max_abs_omega(&self) -> T {
        self.poles.iter().map(|p| p.omega.abs()).fold(T::zero(), T::max)
    }

    pub fn dominant(&self) -> impl Iterator<Item = &Pole<T>> {
        self.poles.iter().filter(|p| p.class == PoleClass::Dominant)
    }

    pub fn suppressed(&self) -> impl Iterator<Item = &Pole<T>> {
        self.poles.iter().filter(|p| p.class == PoleClass::Suppressed)
    }
}

/// Per-frequency accumulator.
#[derive(Clone, Copy, Debug)]
struct Bucket<T> {
    omega: CompensatedSum<T>,
    weight: CompensatedComplexSum<T>,
    tuples: u64,
    structural: u64,
}

impl<T: Real> Bucket<T> {
    fn new() -> Self {
        Self {
            omega: CompensatedSum::new(),
            weight: CompensatedComplexSum::new(),
            tuples: 0,
            structural: 0,
        }
    }

    fn merge(&mut self, other: &Self) {
        self.omega.merge(&other.omega);
        self.weight.merge(&other.weight);
        self.tuples += other.tuples;
        self.structural += other.structural;
    }
}

/// A single contribution before merging.
#[derive(Clone, Copy)]
struct Term<T> {
    key: i64,
    omega: T,
    weight: Complex<T>,
    tuples: u64,
    structural: u64,
}

#[inline]
fn bucket_key<T: Real>(omega: T, inv_tol: T) -> i64 {
    (omega * inv_tol).round().to_i64().expect("finite frequency")
}

/// Stable sort by key, then fold runs with equal keys in enumeration order.
fn reduce_slice<T: Real>(mut terms: Vec<Term<T>>) -> Vec<(i64, Bucket<T>)> {
    terms.sort_by_key(|t| t.key);
    let mut out: Vec<(i64, Bucket<T>)> = Vec::new();
    for t in terms {
        if out.last().map(|(k, _)| *k != t.key).unwrap_or(true) {
            out.push((t.key, Bucket::new()));
        }
        let b = &mut out.last_mut().unwrap().1;
        b.omega.add(t.omega * from_int(t.tuples as i64));
        b.weight.add(t.weight);
        b.tuples += t.tuples;
        b.structural += t.structural;
    }
    out
}

/// Folds per-slice reductions in slice order.
fn fold_slices<T, F>(n_slices: usize, slice: F) -> BTreeMap<i64, Bucket<T>>
where
    T: Real,
    F: Fn(usize) -> Vec<Term<T>> + Sync + Send,
{
    let mut merged: BTreeMap<i64, Bucket<T>> = BTreeMap::new();
    let mut start = 0;
    while start < n_slices {
        let end = (start + SLICE_BATCH).min(n_slices);
        let partials: Vec<Vec<(i64, Bucket<T>)>> = (start..end)
            .into_par_iter()
            .map(|i| reduce_slice(slice(i)))
            .collect();
        for partial in partials {
            for (k, b) in partial {
                merged.entry(k).or_insert_with(Bucket::new).merge(&b);
            }
        }
        start = end;
    }
    merged
}

/// Enumerates, merges and classifies the poles of `Q_q`.
///
/// Full mode is limited to [`FULL_MODE_MAX_SITES`]. Dominant-only mode keeps
/// the tuples with `m₄ = ±m₂`, whose frequency `cos θm₃ − cos θm₁` does not
/// depend on `m₂`; the sum over `m₂` is done in closed form, giving the weight
/// `N⁻⁴ [N(N−1) − Nδ(q,0) + 1] e^{iθq(m₁−m₃)}` per `(m₁, m₃)`.
pub fn enumerate_poles<T: Real>(
    params: &ChainParams<T>,
    q: i64,
    mode: SpectrumMode,
) -> Result<Spectrum<T>> {
    params.check_site(q)?;
    let n = params.n_sites();
    if mode == SpectrumMode::Full && n > FULL_MODE_MAX_SITES {
        return Err(Error::Capability(format!(
            "full enumeration supports at most {FULL_MODE_MAX_SITES} sites, got {n}; use dominant-only mode"
        )));
    }
    let h = params.half_width();
    let cos = params.cosine_table();
    let phases = params.phase_table();
    let inv_tol: T = lit(1.0 / MERGE_TOLERANCE);
    let n_t: T = from_int(n as i64);
    let c = |m: i64| cos[m.unsigned_abs() as usize];

    let buckets = match mode {
        SpectrumMode::Full => fold_slices(n, |i| {
            let m1 = i as i64 - h;
            let mut terms = Vec::with_capacity(n * n * n);
            for m2 in -h..=h {
                for m3 in -h..=h {
                    let a = c(m2) + c(m3);
                    for m4 in -h..=h {
                        let omega = a - (c(m1) + c(m4));
                        let mut w = -phases[params.phase_index(q * (m1 - m3 + m4 - m2))];
                        let structural = m2 == m4;
                        if structural {
                            w = w + phases[params.phase_index(q * (m1 - m3))] * n_t;
                        }
                        terms.push(Term {
                            key: bucket_key(omega, inv_tol),
                            omega,
                            weight: w,
                            tuples: 1,
                            structural: structural as u64,
                        });
                    }
                }
            }
            terms
        }),
        SpectrumMode::DominantOnly => {
            let nn = n as i64;
            let factor: T = from_int(nn * (nn - 1) - if q == 0 { nn } else { 0 } + 1);
            fold_slices(n, |i| {
                let m1 = i as i64 - h;
                (-h..=h)
                    .map(|m3| {
                        let omega = c(m3) - c(m1);
                        Term {
                            key: bucket_key(omega, inv_tol),
                            omega,
                            weight: phases[params.phase_index(q * (m1 - m3))] * factor,
                            tuples: 2 * n as u64 - 1,
                            structural: n as u64,
                        }
                    })
                    .collect()
            })
        }
    };

    let poles = finalize(params, buckets)?;
    let spectrum = Spectrum { q, params: *params, mode, poles };
    check_residuals(&spectrum)?;
    check_mirror_symmetry(&spectrum)?;
    Ok(classify(&spectrum))
}

fn finalize<T: Real>(params: &ChainParams<T>, buckets: BTreeMap<i64, Bucket<T>>) -> Result<Vec<Pole<T>>> {
    let n: T = from_int(params.n_sites() as i64);
    let scale = T::one() / (n * n * n * n);
    let unit = params.frequency_unit();
    Ok(buckets
        .into_iter()
        .map(|(key, b)| {
            let w = b.weight.value() * scale;
            Pole {
                omega: b.omega.value() / from_int(b.tuples as i64) * unit,
                intensity: w.re,
                raw_complex_residual: w.im.abs(),
                tuple_count: b.tuples,
                structural_count: b.structural,
                class: PoleClass::Suppressed,
                key,
            }
        })
        .collect())
}

fn check_residuals<T: Real>(s: &Spectrum<T>) -> Result<()> {
    let bound = lit::<T>(RESIDUAL_BOUND) * s.total_abs_intensity();
    if let Some(p) = s.poles.iter().find(|p| p.raw_complex_residual > bound) {
        return Err(Error::InvariantViolation(format!(
            "imaginary residual {:e} at omega={:e} exceeds {:e}",
            p.raw_complex_residual, p.omega, bound
        )));
    }
    Ok(())
}

fn check_mirror_symmetry<T: Real>(s: &Spectrum<T>) -> Result<()> {
    let tol = lit::<T>(2.0 * MERGE_TOLERANCE) * s.params.frequency_unit();
    let itol = lit::<T>(1e-12) * s.total_abs_intensity();
    let n = s.poles.len();
    for i in 0..n / 2 {
        let (a, b) = (&s.poles[i], &s.poles[n - 1 - i]);
        if (a.omega + b.omega).abs() > tol || (a.intensity - b.intensity).abs() > itol {
            return Err(Error::InvariantViolation(format!(
                "poles at {:e} and {:e} break the ±ω symmetry",
                a.omega, b.omega
            )));
        }
    }
    Ok(())
}

/// Labels poles carrying any `m₂ = m₄` weight as dominant, the rest as
/// suppressed.
pub fn classify<T: Real>(spectrum: &Spectrum<T>) -> Spectrum<T> {
    let mut out = spectrum.clone();
    for p in &mut out.poles {
        p.class = if p.structural_count > 0 {
            PoleClass::Dominant
        } else {
            PoleClass::Suppressed
        };
    }
    out
}

/// `Q_q(t) = Σ_j I_j cos(ω_j t)`, pairing `±ω` poles.
pub fn reconstruct<T: Real>(spectrum: &Spectrum<T>, t: T) -> Result<T> {
    if spectrum.mode != SpectrumMode::Full {
        return Err(Error::Capability(
            "reconstruction needs a full-mode spectrum; dominant-only omits suppressed poles".into(),
        ));
    }
    let poles = &spectrum.poles;
    let n = poles.len();
    let mut acc = CompensatedSum::new();
    for i in 0..n / 2 {
        let (neg, pos) = (&poles[i], &poles[n - 1 - i]);
        acc.add((neg.intensity + pos.intensity) * (pos.omega * t).cos());
    }
    if n % 2 == 1 {
        let mid = &poles[n / 2];
        acc.add(mid.intensity * (mid.omega * t).cos());
    }
    Ok(acc.value())
}

/// Merged poles with `|ω| > 2J/ħ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuppressedTail<T> {
    pub q: i64,
    pub n_sites: usize,
    pub pole_count: usize,
    pub tuple_count: u64,
    pub abs_intensity: T,
}

/// Total `Σ|I|` of the merged poles above the `2J/ħ` cutoff, computed without
/// materializing the rest of the spectrum.
///
/// Tuples with `m₂ = m₄` have `|ω| ≤ (1 + cos(π/N)) J/ħ < 2J/ħ`, so every pole
/// in this band is suppressed.
pub fn suppressed_tail<T: Real>(params: &ChainParams<T>, q: i64) -> Result<SuppressedTail<T>> {
    params.check_site(q)?;
    let n = params.n_sites();
    if n > TAIL_MAX_SITES {
        return Err(Error::Capability(format!(
            "tail enumeration supports at most {TAIL_MAX_SITES} sites, got {n}"
        )));
    }
    let h = params.half_width();
    let cos = params.cosine_table();
    let phases = params.phase_table();
    let inv_tol: T = lit(1.0 / MERGE_TOLERANCE);
    let cutoff: T = lit(2.0);
    let c = |m: i64| cos[m.unsigned_abs() as usize];
    let buckets = fold_slices(n, |i| {
        let m1 = i as i64 - h;
        let mut terms = Vec::new();
        for m2 in -h..=h {
            for m3 in -h..=h {
                let a = c(m2) + c(m3);
                for m4 in -h..=h {
                    let omega = a - (c(m1) + c(m4));
                    if omega.abs() > cutoff {
                        let key = bucket_key(omega, inv_tol);
                        terms.push(Term {
                            key,
                            omega,
                            weight: -phases[params.phase_index(q * (m1 - m3 + m4 - m2))],
                            tuples: 1,
                            structural: 0,
                        });
                    }
                }
            }
        }
        terms
    });
    let poles = finalize(params, buckets)?;
    Ok(SuppressedTail {
        q,
        n_sites: n,
        pole_count: poles.len(),
        tuple_count: poles.iter().map(|p| p.tuple_count).sum(),
        abs_intensity: compensated_sum(poles.iter().map(|p| p.intensity.abs())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::evolve_closed_form;

    fn unit(n: usize) -> ChainParams<f64> {
        ChainParams::<f64>::unit(n, 0.0).unwrap()
    }

    #[test]
    fn five_site_zero_sum_and_bound() {
        let s = enumerate_poles(&unit(5), 0, SpectrumMode::Full).unwrap();
        assert!(s.intensity_sum().abs() <= 1e-12);
        assert!(s.max_abs_omega() < 4.0);
        let tuples: u64 = s.poles.iter().map(|p| p.tuple_count).sum();
        assert_eq!(tuples, 625);
    }

    #[test]
    fn full_mode_is_capped() {
        let p = unit(67);
        assert!(matches!(
            enumerate_poles(&p, 0, SpectrumMode::Full),
            Err(Error::Capability(_))
        ));
        assert!(enumerate_poles(&p, 0, SpectrumMode::DominantOnly).is_ok());
    }

    #[test]
    fn reconstruct_matches_oracle_n9() {
        let p = unit(9);
        let s = enumerate_poles(&p, 1, SpectrumMode::Full).unwrap();
        let times = [0.5, 1.0, 2.0];
        let oracle = evolve_closed_form(&p, 1, &times).unwrap();
        for (t, q) in oracle.iter() {
            assert!((reconstruct(&s, t).unwrap() - q).abs() <= 1e-10);
        }
        assert!(reconstruct(&s, 0.0).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn reconstruct_rejects_dominant_only() {
        let s = enumerate_poles(&unit(9), 1, SpectrumMode::DominantOnly).unwrap();
        assert!(matches!(reconstruct(&s, 1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn classification_is_structural() {
        let s = enumerate_poles(&unit(9), 1, SpectrumMode::Full).unwrap();
        let strongest = s
            .poles
            .iter()
            .max_by(|a, b| a.intensity.abs().partial_cmp(&b.intensity.abs()).unwrap())
            .unwrap();
        assert_eq!(strongest.class, PoleClass::Dominant);
        assert!(s.dominant().count() > 0);
        assert_eq!(s.dominant().count() + s.suppressed().count(), s.poles.len());
        assert!(s.dominant().all(|p| p.omega.abs() <= 2.0 + 1e-12));
    }

    #[test]
    fn dominant_only_matches_structural_share_of_full_mode() {
        // Away from accidental degeneracies, the dominant-only weight of a
        // pole equals its full-mode weight restricted to m₄ = ±m₂ tuples. For
        // q=0 the m₂=m₄ part alone is (N−1)·N⁻⁴ per tuple.
        let p = unit(9);
        let d = enumerate_poles(&p, 0, SpectrumMode::DominantOnly).unwrap();
        let u = (9f64.powi(-3)) - 9f64.powi(-4);
        for pole in &d.poles {
            let k = pole.intensity / u;
            assert!((k - k.round()).abs() * u <= 1e-12);
        }
    }

    #[test]
    fn residuals_are_negligible() {
        let s = enumerate_poles(&unit(13), 3, SpectrumMode::Full).unwrap();
        let bound = RESIDUAL_BOUND * s.total_abs_intensity();
        assert!(s.poles.iter().all(|p| p.raw_complex_residual <= bound));
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let p = unit(21);
        let run = |workers: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap()
                .install(|| enumerate_poles(&p, 2, SpectrumMode::Full).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.poles.len(), b.poles.len());
        for (x, y) in a.poles.iter().zip(&b.poles) {
            assert_eq!(x.omega.to_bits(), y.omega.to_bits());
            assert_eq!(x.intensity.to_bits(), y.intensity.to_bits());
        }
    }

    #[test]
    fn tail_matches_full_enumeration() {
        let p = unit(11);
        let s = enumerate_poles(&p, 2, SpectrumMode::Full).unwrap();
        let direct: f64 = s
            .poles
            .iter()
            .filter(|x| x.omega.abs() > 2.0)
            .map(|x| x.intensity.abs())
            .sum();
        let tail = suppressed_tail(&p, 2).unwrap();
        assert!((tail.abs_intensity - direct).abs() <= 1e-15);
        assert!(s.poles.iter().filter(|x| x.omega.abs() > 2.0).all(|x| x.class == PoleClass::Suppressed));
    }
}
