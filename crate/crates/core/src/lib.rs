//! Leak detection for liquid pipelines monitored at two stations.
//!
//! The crate covers four strands of the problem:
//!
//! * [`inventory`]: compensated line inventory and the volume balance
//!   `leak = metered in - metered out - inventory change`.
//! * [`acoustic`]: leak pressure-drop amplitude, detectability, frequency
//!   dependent attenuation and repair-urgency classification.
//! * [`wavelet`], [`detect`] and [`localize`]: orthonormal wavelet filter
//!   banks, onset detection of negative pressure waves at the inlet and
//!   outlet, event pairing, and leak localization from arrival-time
//!   differences (uniform or piecewise wave speed).
//! * [`sim`]: a deterministic seeded telemetry generator used as ground truth
//!   for every detector.
//!
//! All quantities are SI (Pa, m, s, K, m³/s).

pub mod acoustic;
pub mod detect;
pub mod domain;
mod error;
pub mod inventory;
pub mod localize;
pub mod sim;
pub mod wavelet;

pub use error::{Error, Result};
