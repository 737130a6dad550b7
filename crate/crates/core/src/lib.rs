//! Bell–Ziv–Zakai lower bounds and achievability simulations for estimating
//! an optical phase waveform with a power-law prior spectrum.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod gp;
pub mod quad;
pub mod simulation;
pub mod specfun;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
