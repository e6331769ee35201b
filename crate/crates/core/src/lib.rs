//! Exact single-magnon entanglement dynamics of the periodic spin-1/2 XXZ
//! chain.
//!
//! A single flipped spin on site 0 of an otherwise polarized chain spreads
//! entanglement ballistically. For every spin `q` the determinant of its
//! reduced density matrix, `Q_q(t)`, is available three ways:
//!
//! * as a sum of cosines over merged spectral poles ([`spectrum`]);
//! * from closed-form or directly integrated amplitudes ([`oracle`]);
//! * through closed-form derivatives, Taylor and Bessel transients
//!   ([`analytics`]).
//!
//! All numerics are generic over [`Real`] (`f32`/`f64`); the aliases below
//! fix the scalar to `f64`, which is what the quoted tolerances assume.

pub mod acceptance;
pub mod analytics;
pub mod chain;
pub mod error;
pub mod oracle;
pub mod scalar;
pub mod spectrum;
pub mod sum;

pub use chain::{amplitude, group_velocity, momenta, AmplitudeVector, ChainParams, MomentumMode};
pub use error::{Error, Result};
pub use scalar::Real;
pub use spectrum::{PoleClass, SpectrumMode};

pub type Params = chain::ChainParams<f64>;
pub type Amplitudes = chain::AmplitudeVector<f64>;
pub type Series = oracle::TimeSeries<f64>;
pub type Spectrum = spectrum::Spectrum<f64>;
pub type Pole = spectrum::Pole<f64>;
pub type StringPole = spectrum::StringPole<f64>;
pub type DerivativeRecord = analytics::DerivativeRecord<f64>;
pub type EdgeEstimate = analytics::EdgeEstimate<f64>;
