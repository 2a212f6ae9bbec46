//! Spectral laboratory for the periodic modified KdV equation
//! `u_t + u_xxx + (u² - (1/2π)∫u²) u_x = 0` on the 2π-torus.
//!
//! The crate is organised around the Fourier-side picture:
//!
//! * [`spectral`]: fields, trajectories, Sobolev norms, exponent sets.
//! * [`nonlinearity`]: resonant / non-resonant split of the cubic term, the
//!   explicit trilinear form `H` and its denominators.
//! * [`gauge`]: the phase systems `Q` and `P` and the gauge `û = ẑ + f̂e^{iQ}`.
//! * [`norms`]: windowed time-DFT proxies for Bourgain-type norms.
//! * [`picard`]: Duhamel integration and the `z`-iteration.
//! * [`reference`]: ETDRK4 / IFRK4 oracle integrator.
//! * [`probes`]: seeded estimate-ratio probes and smoothing diagnostics.
//! * [`runner`]: JSON-configured experiments writing JSON/CSV artifacts.

pub mod ensemble;
pub mod error;
pub mod gauge;
pub mod nonlinearity;
pub mod norms;
pub mod picard;
pub mod probes;
pub mod reference;
pub mod report;
pub mod runner;
pub mod spectral;
mod transform;

pub use error::{Error, Result};
pub use spectral::{FourierField, GridSpec, SobolevIndex, Trajectory};

/// Version string embedded in every report.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
