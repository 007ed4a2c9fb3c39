//! Simulator for a coherently driven quantum dot (G → X → XX ladder) coupled
//! to a single-mode microcavity resonant with the X–XX transition.
//!
//! The crate covers pulsed Lindblad dynamics, two-time joint detection
//! probabilities via the quantum regression theorem, and CW steady-state
//! spectra from the vectorised Liouvillian.

pub mod config;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod model;
pub mod operators;
pub mod output;
pub mod presets;
pub mod run;
pub mod steadystate;

pub use error::{Error, Result};
