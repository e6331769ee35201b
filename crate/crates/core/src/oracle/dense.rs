//! Direct integration of the one-magnon Schrödinger equation in the site basis.
//!
//! The sector Hamiltonian is applied as a stencil (diagonal `JΔ`, periodic
//! nearest-neighbour hopping `-J/2`); no plane-wave basis is used anywhere in
//! this module.

use num_complex::Complex;

use crate::chain::{AmplitudeVector, ChainParams};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Local error tolerance per step (max-norm).
pub const LOCAL_TOLERANCE: f64 = 1e-12;
/// Largest norm drift that is silently renormalized.
pub const NORM_DRIFT_LIMIT: f64 = 1e-10;
const MAX_STEPS: usize = 20_000_000;

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// `dc/dt = -(i/ħ) H c` for the periodic one-magnon Hamiltonian.
struct SectorRhs<T> {
    onsite: T,
    hop: T,
    inv_hbar: T,
}

impl<T: Real> SectorRhs<T> {
    fn new(params: &ChainParams<T>) -> Self {
        let j = params.coupling_j();
        Self {
            onsite: j * params.anisotropy_delta(),
            hop: -j / lit(2.0),
            inv_hbar: T::one() / params.hbar(),
        }
    }

    fn apply(&self, c: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = c.len();
        for p in 0..n {
            let left = c[(p + n - 1) % n];
            let right = c[(p + 1) % n];
            let h = c[p] * self.onsite + (left + right) * self.hop;
            // -i h / ħ
            out[p] = Complex::new(h.im, -h.re) * self.inv_hbar;
        }
    }
}

fn axpy<T: Real>(out: &mut [Complex<T>], base: &[Complex<T>], terms: &[(T, &[Complex<T>])]) {
    for i in 0..out.len() {
        let mut acc = base[i];
        for (w, k) in terms {
            acc = acc + k[i] * *w;
        }
        out[i] = acc;
    }
}

/// Integrates the site-basis Schrödinger equation from `|0⟩` up to time `t`
/// with an adaptive Dormand–Prince 5(4) scheme.
pub fn evolve_dense<T: Real>(params: &ChainParams<T>, t: T) -> Result<AmplitudeVector<T>> {
    if !(t.is_finite() && t >= T::zero()) {
        return Err(Error::Validation(format!("time must be finite and non-negative, got {t}")));
    }
    let n = params.n_sites();
    let zero = Complex::new(T::zero(), T::zero());
    let mut y = vec![zero; n];
    y[params.half_width() as usize] = Complex::new(T::one(), T::zero());
    if t == T::zero() {
        return Ok(AmplitudeVector { time: t, entries: y });
    }

    let rhs = SectorRhs::new(params);
    let tol: T = lit(LOCAL_TOLERANCE);
    let h_norm = params.coupling_j() * (params.anisotropy_delta().abs() + T::one()) / params.hbar();
    let mut h = (lit::<T>(0.01) / h_norm).min(t);
    let mut now = T::zero();
    let mut steps = 0usize;

    let mut k = vec![vec![zero; n]; 7];
    let mut stage = vec![zero; n];
    let mut next = vec![zero; n];
    rhs.apply(&y, &mut k[0]);

    while now < t {
        if steps >= MAX_STEPS {
            return Err(Error::Integrator {
                t: now.to_f64().unwrap_or(f64::NAN),
                step: h.to_f64().unwrap_or(f64::NAN),
                error_estimate: f64::NAN,
                steps,
                reason: "step budget exhausted".into(),
            });
        }
        let last = now + h >= t;
        if last {
            h = t - now;
        }
        let (k1, rest) = k.split_first_mut().unwrap();
        let (k2, rest) = rest.split_first_mut().unwrap();
        let (k3, rest) = rest.split_first_mut().unwrap();
        let (k4, rest) = rest.split_first_mut().unwrap();
        let (k5, rest) = rest.split_first_mut().unwrap();
        let (k6, rest) = rest.split_first_mut().unwrap();
        let k7 = &mut rest[0];

        axpy(&mut stage, &y, &[(h * lit(A21), k1)]);
        rhs.apply(&stage, k2);
        axpy(&mut stage, &y, &[(h * lit(A31), k1), (h * lit(A32), k2)]);
        rhs.apply(&stage, k3);
        axpy(&mut stage, &y, &[(h * lit(A41), k1), (h * lit(A42), k2), (h * lit(A43), k3)]);
        rhs.apply(&stage, k4);
        axpy(
            &mut stage,
            &y,
            &[(h * lit(A51), k1), (h * lit(A52), k2), (h * lit(A53), k3), (h * lit(A54), k4)],
        );
        rhs.apply(&stage, k5);
        axpy(
            &mut stage,
            &y,
            &[
                (h * lit(A61), k1),
                (h * lit(A62), k2),
                (h * lit(A63), k3),
                (h * lit(A64), k4),
                (h * lit(A65), k5),
            ],
        );
        rhs.apply(&stage, k6);
        axpy(
            &mut next,
            &y,
            &[(h * lit(B1), k1), (h * lit(B3), k3), (h * lit(B4), k4), (h * lit(B5), k5), (h * lit(B6), k6)],
        );
        rhs.apply(&next, k7);

        let mut err = T::zero();
        for i in 0..n {
            let e = (k1[i] * lit::<T>(E1)
                + k3[i] * lit::<T>(E3)
                + k4[i] * lit::<T>(E4)
                + k5[i] * lit::<T>(E5)
                + k6[i] * lit::<T>(E6)
                + k7[i] * lit::<T>(E7))
                * h;
            err = err.max(e.norm());
        }

        if err <= tol {
            now = if last { t } else { now + h };
            std::mem::swap(&mut y, &mut next);
            std::mem::swap(k1, k7);
            steps += 1;
        }
        let factor = if err == T::zero() {
            lit(5.0)
        } else {
            (lit::<T>(0.9) * (tol / err).powf(lit(0.2))).max(lit(0.2)).min(lit(5.0))
        };
        h = h * factor;
        if h <= t * T::epsilon() {
            return Err(Error::Integrator {
                t: now.to_f64().unwrap_or(f64::NAN),
                step: h.to_f64().unwrap_or(f64::NAN),
                error_estimate: err.to_f64().unwrap_or(f64::NAN),
                steps,
                reason: "step size underflow".into(),
            });
        }
    }

    let mut state = AmplitudeVector { time: t, entries: y };
    let norm = state.norm_sqr().sqrt();
    let drift = (norm - T::one()).abs();
    if drift >= lit(NORM_DRIFT_LIMIT) {
        return Err(Error::Integrator {
            t: t.to_f64().unwrap_or(f64::NAN),
            step: h.to_f64().unwrap_or(f64::NAN),
            error_estimate: drift.to_f64().unwrap_or(f64::NAN),
            steps,
            reason: "norm drift above renormalization limit".into(),
        });
    }
    for c in &mut state.entries {
        *c = *c / norm;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_initial_state() {
        let p = ChainParams::<f64>::unit(9, 0.3).unwrap();
        let s = evolve_dense(&p, 0.0).unwrap();
        for q in p.site_range() {
            let expected = if q == 0 { 1.0 } else { 0.0 };
            assert_eq!(s.site(q).unwrap(), Complex::new(expected, 0.0));
        }
    }

    #[test]
    fn unitary_evolution() {
        let p = ChainParams::<f64>::unit(17, 1.0).unwrap();
        for t in [0.3, 2.0, 7.5] {
            let s = evolve_dense(&p, t).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn matches_closed_form_at_t5() {
        let p = ChainParams::<f64>::unit(33, 0.0).unwrap();
        let dense = evolve_dense(&p, 5.0).unwrap();
        let exact = AmplitudeVector::closed_form(&p, 5.0).unwrap();
        assert!(dense.max_deviation(&exact) <= 1e-8);
    }

    #[test]
    fn anisotropy_and_units_enter_correctly() {
        let p = ChainParams::<f64>::new(11, 1.7, 0.8, 0.6).unwrap();
        let dense = evolve_dense(&p, 3.0).unwrap();
        let exact = AmplitudeVector::closed_form(&p, 3.0).unwrap();
        assert!(dense.max_deviation(&exact) <= 1e-8);
    }
}
