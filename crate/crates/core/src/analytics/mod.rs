//! Closed-form time-domain results: derivative table, Taylor and Bessel
//! transients, and the entanglement edge velocity.

mod derivatives;
pub mod edge;
mod series;
pub mod special;

pub use derivatives::{derivative_exact, derivative_from_spectrum, moments, DerivativeRecord};
pub use edge::{arrival_threshold, arrival_time, edge_fit, EdgeEstimate};
pub use series::{taylor_series, transient, TaylorSum};
pub use special::{alpha, bessel_j, hyp2f1_terminating};
