//! Unit conversions between laboratory units and the internal unit system.
//!
//! Internally every energy is measured in `E_J` and every angular frequency
//! in `E_J / hbar`, so `hbar = 1`. Conversions to GHz, MHz or kelvin happen
//! only at I/O boundaries and always go through [`EnergyScale`].

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// `k_B / h` in GHz per kelvin (CODATA 2018).
pub const KB_OVER_H_GHZ_PER_K: f64 = 20.836619;

/// The absolute energy scale `E_J / hbar`, stored in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScale {
    ej_rad_per_s: f64,
}

impl EnergyScale {
    pub fn from_rad_per_s(ej_rad_per_s: f64) -> Self {
        Self { ej_rad_per_s }
    }

    /// `E_J / h` given in GHz, i.e. `E_J / hbar = 2 pi * ghz * 1e9`.
    pub fn from_ghz(ghz: f64) -> Self {
        Self::from_rad_per_s(TAU * ghz * 1e9)
    }

    pub fn rad_per_s(&self) -> f64 {
        self.ej_rad_per_s
    }

    pub fn ghz(&self) -> f64 {
        self.ej_rad_per_s / (TAU * 1e9)
    }

    /// Angular frequency in rad/s to internal units.
    pub fn from_angular(&self, w_rad_per_s: f64) -> f64 {
        w_rad_per_s / self.ej_rad_per_s
    }

    pub fn to_angular(&self, w: f64) -> f64 {
        w * self.ej_rad_per_s
    }

    /// A frequency `nu` (not angular) in GHz to internal angular units.
    pub fn from_ghz_freq(&self, ghz: f64) -> f64 {
        TAU * ghz * 1e9 / self.ej_rad_per_s
    }

    pub fn to_ghz_freq(&self, w: f64) -> f64 {
        w * self.ej_rad_per_s / (TAU * 1e9)
    }

    pub fn from_mhz_freq(&self, mhz: f64) -> f64 {
        TAU * mhz * 1e6 / self.ej_rad_per_s
    }

    pub fn to_mhz_freq(&self, w: f64) -> f64 {
        w * self.ej_rad_per_s / (TAU * 1e6)
    }

    /// Thermal angular frequency `k_B T / hbar` in internal units.
    pub fn thermal_from_millikelvin(&self, t_mk: f64) -> f64 {
        TAU * KB_OVER_H_GHZ_PER_K * 1e9 * t_mk * 1e-3 / self.ej_rad_per_s
    }

    /// Internal susceptibility (`I0^2` per internal frequency unit) to
    /// `I0^2` per (rad/ns).
    pub fn chi_to_per_rad_ns(&self, chi: f64) -> f64 {
        chi / (self.ej_rad_per_s * 1e-9)
    }
}
