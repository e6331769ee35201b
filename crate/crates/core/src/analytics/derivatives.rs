use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::special::{hyp2f1_terminating, multinomial, rational_to_real};
use crate::chain::ChainParams;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::spectrum::Spectrum;
use crate::sum::CompensatedSum;

/// `Σ_j I_j ω_j^{2r}`; `(−1)^r` times this is `Q^{(2r)}(0)`.
pub fn moments<T: Real>(spectrum: &Spectrum<T>, r: u32) -> T {
    let mut acc = CompensatedSum::new();
    for p in &spectrum.poles {
        acc.add(p.intensity * p.omega.powi(2 * r as i32));
    }
    acc.value()
}

/// `Q^{(2r)}(0)` recovered from a spectrum.
pub fn derivative_from_spectrum<T: Real>(spectrum: &Spectrum<T>, r: u32) -> T {
    let m = moments(spectrum, r);
    if r % 2 == 0 {
        m
    } else {
        -m
    }
}

/// Closed-form value of `Q_q^{(2(q+k̄))}(0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeRecord<T> {
    pub q: u64,
    pub kbar: u64,
    pub order: u64,
    /// `coefficient · (J/2ħ)^order` for the chain's `J` and `ħ`.
    pub exact_value: T,
    /// `(−1)^k̄ · multinomial · ₂F₁`, the exact factor multiplying `(J/2ħ)^order`.
    #[serde(with = "rational_string")]
    pub coefficient: BigRational,
    pub moment_value: Option<T>,
    /// True where the closed form is exact (`k̄ < q`).
    pub exactness_flag: bool,
}

impl<T: Real> DerivativeRecord<T> {
    /// Fills `moment_value` from a full-mode spectrum of the same spin.
    pub fn with_moment(mut self, spectrum: &Spectrum<T>) -> Self {
        self.moment_value = Some(derivative_from_spectrum(spectrum, self.order as u32 / 2));
        self
    }

    pub fn relative_deviation(&self) -> Option<T> {
        self.moment_value
            .map(|m| ((m - self.exact_value) / self.exact_value).abs())
    }
}

/// `(J/2ħ)^{2(q+k̄)} (−1)^k̄ multinomial(2(q+k̄); k̄, q, q+k̄) ₂F₁(−k̄, −k̄−q; q+1; 1)`.
pub fn derivative_exact<T: Real>(params: &ChainParams<T>, q: u64, kbar: u64) -> Result<DerivativeRecord<T>> {
    if q == 0 {
        return Err(Error::Capability(
            "the closed-form derivative describes q ≥ 1 only".into(),
        ));
    }
    let order = 2 * (q + kbar);
    let sign = if kbar % 2 == 0 { 1 } else { -1 };
    let coefficient = BigRational::from_integer(BigInt::from(sign) * multinomial(order, &[kbar, q, q + kbar]))
        * hyp2f1_terminating(kbar, q);
    let scale = (params.frequency_unit() / lit(2.0)).powi(order as i32);
    Ok(DerivativeRecord {
        q,
        kbar,
        order,
        exact_value: rational_to_real::<T>(&coefficient) * scale,
        coefficient,
        moment_value: None,
        exactness_flag: kbar < q,
    })
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ChainParams<f64> {
        ChainParams::<f64>::unit(33, 0.0).unwrap()
    }

    #[test]
    fn leading_derivatives() {
        let d = derivative_exact(&unit(), 1, 0).unwrap();
        assert_eq!(d.order, 2);
        assert_eq!(d.exact_value, 0.5);
        assert!(d.exactness_flag);

        let d = derivative_exact(&unit(), 2, 0).unwrap();
        assert_eq!(d.exact_value, 6.0 * 0.5f64.powi(4));
    }

    #[test]
    fn first_correction_q2() {
        // multinomial(6;1,2,3)=60, ₂F₁(−1,−3;3;1)=2. Cross-check: the k̄=1 term
        // of the squared-Bessel series, C(6,3)(−1)/(1!·5!) = −1/6, times 6!.
        let d = derivative_exact(&unit(), 2, 1).unwrap();
        assert_eq!(d.exact_value, -120.0 * 0.5f64.powi(6));
        let series_coeff = -20.0 / 120.0 * 720.0;
        assert_eq!(series_coeff, -120.0);
    }

    #[test]
    fn scales_with_coupling_and_hbar() {
        let p = ChainParams::<f64>::new(33, 3.0, 0.0, 1.5).unwrap();
        let d = derivative_exact(&p, 1, 0).unwrap();
        assert!((d.exact_value - 2.0).abs() < 1e-15); // 2 (J/2ħ)² = 2·1
    }

    #[test]
    fn q_zero_rejected() {
        assert!(matches!(derivative_exact(&unit(), 0, 0), Err(Error::Capability(_))));
    }

    #[test]
    fn sign_alternates_with_kbar() {
        for q in 1..6 {
            for kbar in 0..8 {
                let d = derivative_exact(&unit(), q, kbar).unwrap();
                let expected = if kbar % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(d.exact_value.signum(), expected);
                assert_eq!(d.exactness_flag, kbar < q);
            }
        }
    }
}
