//! Lie-bracket dynamics in general coordinates and exact Gaussian
//! propagators, with independent numerical verifiers.
//!
//! * [`poisson`] — bracket structures, observables, coordinate maps, flows.
//! * [`models`] — pendulum, charged particle, rigid body, oscillator algebra.
//! * [`semiclassical`] — free, oscillator and Landau propagators.
//! * [`proper_time`] — constant-field relativistic kernel and its pieces.
//! * [`oracle`] — brute-force checks: sliced path integrals, convolution,
//!   PDE residuals, quadrature.
//! * [`cli`] / [`verify`] — the `liebr` command-line front end.

pub mod cli;
pub mod error;
pub mod models;
pub mod oracle;
pub mod par;
pub mod poisson;
pub mod probe;
pub mod proper_time;
pub mod semiclassical;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use par::Execution;
