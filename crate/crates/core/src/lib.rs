//! Simulator for entangled trapped-ion magnetic gradiometry.
//!
//! A pair (or GHZ chain) of ⁴⁰Ca⁺ ions prepared in a decoherence-free
//! superposition senses the field *difference* produced by a nearby spin,
//! while ignoring any field common to all probe ions. The crate covers the
//! chain from trap parameters to shot statistics:
//!
//! - [`crystal`]: equilibrium positions of a linear ion string.
//! - [`magnetostatics`]: point-dipole fields, differential fields and the
//!   compensating gradient.
//! - [`protocol`]: Bell/GHZ probe states, phase accumulation and parity.
//! - [`estimation`]: Monte Carlo projection-noise statistics and SNR.
//! - [`scenarios`]: end-to-end experiments built from the pieces above.
//! - [`cli`]: config parsing, execution and CSV/text output for the
//!   `iongradim` binary.

pub mod cli;
pub mod crystal;
pub mod error;
pub mod estimation;
pub mod foundation;
pub mod magnetostatics;
pub mod protocol;
pub mod rng;
pub mod scenarios;

pub use error::{Error, Result};
pub use foundation::{constants, PhysicalConstants, Vec3};
