//! Arrival times of the entanglement front and the fitted edge velocity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{least_squares_line, TimeSeries};
use crate::scalar::{from_int, lit, Real};

/// Arrival of spin `q`: first time `Q_q(t) ≥ 1/(2πq)`.
pub const THRESHOLD_RULE: &str = "first t with Q_q(t) >= 1/(2*pi*q), log-log interpolated";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEstimate<T> {
    pub threshold_rule: String,
    /// `(q, τ̂_q)` in ascending `q`.
    pub per_q: Vec<(i64, T)>,
    /// `1 / slope` of the least-squares line `τ̂_q` vs `q`.
    pub fitted_velocity: T,
    /// Root-mean-square residual of that line.
    pub fit_residual: T,
}

/// Threshold `1/(2πq)`.
pub fn arrival_threshold<T: Real>(q: i64) -> T {
    T::one() / (lit::<T>(2.0) * T::PI() * from_int(q))
}

/// First crossing of the threshold, interpolated between the bracketing grid
/// points (log-log when both values are positive, linear otherwise).
pub fn arrival_time<T: Real>(series: &TimeSeries<T>) -> Result<T> {
    let threshold = arrival_threshold::<T>(series.q);
    let idx = series
        .values
        .iter()
        .position(|&v| v >= threshold)
        .ok_or(Error::IncompleteData { q: series.q })?;
    if idx == 0 {
        return Ok(series.times[0]);
    }
    let (t0, t1) = (series.times[idx - 1], series.times[idx]);
    let (v0, v1) = (series.values[idx - 1], series.values[idx]);
    if v0 > T::zero() && t0 > T::zero() {
        let s = (threshold.ln() - v0.ln()) / (v1.ln() - v0.ln());
        Ok((t0.ln() + s * (t1.ln() - t0.ln())).exp())
    } else {
        Ok(t0 + (threshold - v0) * (t1 - t0) / (v1 - v0))
    }
}

/// Fits the edge velocity from one series per spin.
///
/// Requires `N ≥ 8·max q` and that every series reaches `1.3 · 2q_max ħ/(eJ)`.
pub fn edge_fit<T: Real>(series: &[TimeSeries<T>]) -> Result<EdgeEstimate<T>> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "edge fit needs at least two spins, got {}",
            series.len()
        )));
    }
    let params = series[0].params;
    if series.iter().any(|s| s.params != params) {
        return Err(Error::Validation("edge fit series must share chain parameters".into()));
    }
    let q_max = series.iter().map(|s| s.q).max().unwrap_or(0);
    if series.iter().any(|s| s.q < 1) {
        return Err(Error::Validation("edge fit expects q ≥ 1".into()));
    }
    if (params.n_sites() as i64) < 8 * q_max {
        return Err(Error::Validation(format!(
            "N={} too small for q up to {q_max}; need N ≥ {}",
            params.n_sites(),
            8 * q_max
        )));
    }
    let horizon = lit::<T>(1.3) * lit::<T>(2.0) * from_int(q_max) * params.hbar()
        / (T::E() * params.coupling_j());
    for s in series {
        let end = s.times.last().copied().unwrap_or(T::zero());
        if end < horizon {
            return Err(Error::InsufficientData(format!(
                "series for q={} ends at t={end}, needs to reach {horizon}",
                s.q
            )));
        }
    }

    let mut per_q = series
        .iter()
        .map(|s| arrival_time(s).map(|tau| (s.q, tau)))
        .collect::<Result<Vec<_>>>()?;
    per_q.sort_by_key(|(q, _)| *q);
    if let Some(w) = per_q.windows(2).find(|w| w[1].1 <= w[0].1) {
        return Err(Error::InvariantViolation(format!(
            "arrival times not increasing: q={} at {} then q={} at {}",
            w[0].0, w[0].1, w[1].0, w[1].1
        )));
    }
    let pts: Vec<(T, T)> = per_q.iter().map(|&(q, tau)| (from_int(q), tau)).collect();
    let (slope, intercept) = least_squares_line(&pts);
    let n: T = from_int(pts.len() as i64);
    let rss = pts
        .iter()
        .map(|&(q, tau)| {
            let r = tau - (slope * q + intercept);
            r * r
        })
        .fold(T::zero(), |a, b| a + b);
    Ok(EdgeEstimate {
        threshold_rule: THRESHOLD_RULE.to_string(),
        per_q,
        fitted_velocity: T::one() / slope,
        fit_residual: (rss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainParams;

    fn synthetic(params: &ChainParams<f64>, q: i64, times: &[f64]) -> TimeSeries<f64> {
        let tau = 2.0 * q as f64 / std::f64::consts::E;
        let values = times
            .iter()
            .map(|t| (t / tau).powi(2 * q as i32) / (2.0 * std::f64::consts::PI * q as f64))
            .collect();
        TimeSeries { q, params: *params, times: times.to_vec(), values }
    }

    #[test]
    fn recovers_velocity_from_leading_term() {
        let p = ChainParams::<f64>::unit(201, 0.0).unwrap();
        let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let series: Vec<_> = (10..=24).map(|q| synthetic(&p, q, &times)).collect();
        let est = edge_fit(&series).unwrap();
        assert!((est.fitted_velocity - std::f64::consts::E / 2.0).abs() <= 1e-6);
        for w in est.per_q.windows(2) {
            assert!((w[1].1 - w[0].1 - 2.0 / std::f64::consts::E).abs() < 1e-6);
        }
    }

    #[test]
    fn reports_missing_arrival() {
        let p = ChainParams::<f64>::unit(201, 0.0).unwrap();
        let times: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.01).collect();
        let mut series: Vec<_> = (10..=12).map(|q| synthetic(&p, q, &times)).collect();
        series[1].values.iter_mut().for_each(|v| *v = 0.0);
        assert_eq!(edge_fit(&series).unwrap_err(), Error::IncompleteData { q: 11 });
    }

    #[test]
    fn rejects_short_series_and_small_chains() {
        let p = ChainParams::<f64>::unit(201, 0.0).unwrap();
        let short: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let series: Vec<_> = (10..=12).map(|q| synthetic(&p, q, &short)).collect();
        assert!(matches!(edge_fit(&series), Err(Error::InsufficientData(_))));

        let small = ChainParams::<f64>::unit(51, 0.0).unwrap();
        let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let series: Vec<_> = (10..=12).map(|q| synthetic(&small, q, &times)).collect();
        assert!(matches!(edge_fit(&series), Err(Error::Validation(_))));
    }
}
