//! Time-domain ground truth for the single-spin entanglement measure.
//!
//! For a one-magnon state the reduced density matrix of spin `q` is diagonal
//! (magnon number is conserved), so its determinant is `|c_q|² (1 - |c_q|²)`.
//! Three independent routes produce the amplitudes: the plane-wave closed form
//! in [`crate::chain`], direct integration of the sector Hamiltonian in
//! [`dense`], and exact evolution in the full `2^N` space in [`hilbert`].

pub mod dense;
pub mod hilbert;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::chain::{amplitude_unchecked, ChainParams};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub use dense::evolve_dense;
pub use hilbert::{full_hilbert_check, ReducedDensity};

/// Boundary slack for clamping round-off into `[0, 1/4]`.
const CLAMP_SLACK: f64 = 1e-12;

/// Entanglement measure `Q_q(t)` sampled on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    pub q: i64,
    pub params: ChainParams<T>,
    pub times: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// Determinant of the reduced density matrix of a spin carrying amplitude `c`.
pub fn entanglement_from_amplitude<T: Real>(c: Complex<T>) -> Result<T> {
    let slack: T = lit(CLAMP_SLACK);
    let modulus = c.norm();
    if !modulus.is_finite() || modulus > T::one() + slack {
        return Err(Error::InvariantViolation(format!(
            "amplitude modulus {modulus:e} exceeds 1"
        )));
    }
    let p = c.norm_sqr();
    let value = p * (T::one() - p);
    let quarter: T = lit(0.25);
    if value < T::zero() {
        if value >= -slack {
            return Ok(T::zero());
        }
        return Err(Error::InvariantViolation(format!(
            "entanglement {value:e} below zero"
        )));
    }
    if value > quarter {
        if value <= quarter + slack {
            return Ok(quarter);
        }
        return Err(Error::InvariantViolation(format!(
            "entanglement {value:e} above 1/4"
        )));
    }
    Ok(value)
}

pub(crate) fn validate_grid<T: Real>(times: &[T]) -> Result<()> {
    for (i, t) in times.iter().enumerate() {
        if !(t.is_finite() && *t >= T::zero()) {
            return Err(Error::Validation(format!(
                "time grid entry {i} is {t}, expected finite and non-negative"
            )));
        }
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Validation("time grid must be sorted ascending".into()));
    }
    Ok(())
}

/// `Q_q(t)` from the closed-form amplitudes on every grid point.
pub fn evolve_closed_form<T: Real>(
    params: &ChainParams<T>,
    q: i64,
    times: &[T],
) -> Result<TimeSeries<T>> {
    params.check_site(q)?;
    validate_grid(times)?;
    let cos = params.cosine_table();
    let values = times
        .iter()
        .map(|&t| entanglement_from_amplitude(amplitude_unchecked(params, &cos, q, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries {
        q,
        params: *params,
        times: times.to_vec(),
        values,
    })
}

/// Window of values used by [`leading_exponent_fit`].
pub const TRANSIENT_WINDOW: (f64, f64) = (1e-12, 1e-8);

/// Power law `Q ≈ prefactor · t^exponent` fitted on the transient window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<T> {
    pub exponent: T,
    pub prefactor: T,
    pub points: usize,
}

/// Least-squares line through `(ln t, ln Q)` restricted to
/// `Q ∈ [1e-12, 1e-8]`.
pub fn leading_exponent_fit<T: Real>(series: &TimeSeries<T>) -> Result<PowerLawFit<T>> {
    let (lo, hi) = (lit::<T>(TRANSIENT_WINDOW.0), lit::<T>(TRANSIENT_WINDOW.1));
    let pts: Vec<(T, T)> = series
        .iter()
        .filter(|&(t, v)| t > T::zero() && v >= lo && v <= hi)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} points inside the transient window [{lo:e}, {hi:e}], need at least 8",
            pts.len()
        )));
    }
    let (slope, intercept) = least_squares_line(&pts);
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        points: pts.len(),
    })
}

/// Ordinary least squares `y = slope·x + intercept` on centered data.
pub(crate) fn least_squares_line<T: Real>(pts: &[(T, T)]) -> (T, T) {
    let n: T = crate::scalar::from_int(pts.len() as i64);
    let mx = crate::sum::compensated_sum(pts.iter().map(|p| p.0)) / n;
    let my = crate::sum::compensated_sum(pts.iter().map(|p| p.1)) / n;
    let sxy = crate::sum::compensated_sum(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    let sxx = crate::sum::compensated_sum(pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entanglement_of_pure_and_maximal_states() {
        assert_eq!(entanglement_from_amplitude(Complex::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(entanglement_from_amplitude(Complex::new(0.0, 0.0)).unwrap(), 0.0);
        let h = 0.5f64.sqrt();
        let v = entanglement_from_amplitude(Complex::new(h, 0.0)).unwrap();
        assert!((v - 0.25).abs() < 1e-16);
    }

    #[test]
    fn entanglement_rejects_overlong_amplitude() {
        assert!(matches!(
            entanglement_from_amplitude(Complex::new(1.0 + 1e-9, 0.0)),
            Err(Error::InvariantViolation(_))
        ));
        // within the slack: clamped to zero
        assert_eq!(
            entanglement_from_amplitude(Complex::new(1.0 + 2e-13, 0.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn closed_form_series_starts_at_zero() {
        let p = ChainParams::<f64>::unit(33, 0.0).unwrap();
        let s = evolve_closed_form(&p, 0, &[0.0, 0.5, 1.0]).unwrap();
        assert!(s.values[0].abs() <= 1e-14);
        assert!(s.values.iter().all(|v| (0.0..=0.25).contains(v)));
    }

    #[test]
    fn rejects_unsorted_grid() {
        let p = ChainParams::<f64>::unit(9, 0.0).unwrap();
        assert!(matches!(
            evolve_closed_form(&p, 0, &[1.0, 0.5]),
            Err(Error::Validation(_))
        ));
        assert!(evolve_closed_form(&p, 0, &[-1.0]).is_err());
    }

    #[test]
    fn exponent_fit_on_synthetic_power_law() {
        let p = ChainParams::<f64>::unit(9, 0.0).unwrap();
        let times: Vec<f64> = (0..200).map(|i| 10f64.powf(-3.5 + i as f64 * 0.01)).collect();
        let values = times.iter().map(|t| t.powi(4)).collect();
        let s = TimeSeries { q: 0, params: p, times, values };
        let fit = leading_exponent_fit(&s).unwrap();
        assert!((fit.exponent - 4.0).abs() < 1e-9);
        assert!((fit.prefactor - 1.0).abs() < 1e-8);
    }

    #[test]
    fn exponent_fit_needs_points_in_window() {
        let p = ChainParams::<f64>::unit(9, 0.0).unwrap();
        let s = TimeSeries { q: 0, params: p, times: vec![1.0, 2.0], values: vec![0.1, 0.2] };
        assert!(matches!(leading_exponent_fit(&s), Err(Error::InsufficientData(_))));
    }
}
