//! Simulator for a clock/vacuum quantum circuit threaded through a closed
//! timelike curve.
//!
//! A single quantum clock is spread over `M` chronology-respecting modes
//! and scatters off its own time-travelled copies on `M` looped modes via
//! vacuum-modified swap gates. The crate solves the circuit under the two
//! standard prescriptions — Deutsch fixed points ([`deutsch`]) and
//! postselected teleportation ([`pctc`]) — and evaluates the closed-form
//! loop-count laws they converge to when the mode count grows without
//! bound ([`continuum`]).

pub mod clock;
pub mod continuum;
pub mod deutsch;
pub mod dispersion;
pub mod distribution;
pub mod error;
pub mod gates;
mod linalg;
pub mod pctc;
pub mod state;
pub mod suite;

pub use clock::ClockSpec;
pub use error::{Error, Result};
pub use gates::{CircuitSpec, Gate, SwapVariant};
pub use state::{DensityOperator, ModeBasis, Operator, PureState, WeightProfile};
