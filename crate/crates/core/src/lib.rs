//! Linear probe response of a driven three-level flux-qubit circuit.
//!
//! Internal units: energies in `E_J`, angular frequencies in `E_J / hbar`
//! (`hbar = 1`), currents in `I_0 = 2 pi E_J / Phi_0`. See [`units`] for the
//! conversions used at I/O boundaries.

pub mod bath;
pub mod current;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rates;
pub mod regime;
pub mod response;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
