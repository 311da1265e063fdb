//! Optimum expected end-to-end distortion (EED) of outage-free wideband MIMO
//! analog transmission.
//!
//! Two independent routes are provided and meant to be cross-checked:
//!
//! * [`montecarlo`] estimates the exact expectation over Rayleigh channel
//!   realizations, together with the ergodic capacity and the
//!   infinite-diversity bound built on it.
//! * [`asymptotic`] evaluates the closed-form high-SNR expansion
//!   `mu * (ln rho)^p * rho^(-delta)` in the low, moderate and high
//!   source-to-channel bandwidth ratio (SCBR) regimes, for uncorrelated and
//!   semicorrelated channels, plus its infinite-diversity limit.
//!
//! [`channel`] holds the system description and regime classification,
//! [`numerics`] the special functions and small complex linear algebra, and
//! [`cli`] the sweep front end behind the `eed` binary.

pub mod asymptotic;
pub mod channel;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod numerics;

pub use asymptotic::AsymptoticEed;
pub use channel::{CorrelationSpec, Regime, RegimeKind, SystemConfig};
pub use error::{Error, Result};
pub use montecarlo::{McEstimate, SampleSpec};
pub use numerics::{ComplexMatrix, LogValue};
