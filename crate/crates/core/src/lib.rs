//! Exact state-vector simulation of the periodically kicked XY spin chain:
//! Floquet spectra and localization diagnostics, stroboscopic dynamics,
//! dynamical-decoupling planning and finite-size scaling.

pub mod cli;
pub mod config;
pub mod ddcalc;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod scaling;
pub mod spectral;
pub mod state;

pub use config::ChainConfig;
pub use error::{Error, Result};
pub use state::{StateVector, StatePreset};
