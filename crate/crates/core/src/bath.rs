//! Ohmic environment: `chi''`, the symmetrized spectral density `S` and the
//! combination `R(w) = chi''(w) [1 + coth(w / 2T)]` that enters the damping
//! rates. Frequencies and temperatures are in internal units (`hbar = k_B = 1`).
//!
//! The point `w = 0` and the zero-temperature case are evaluated through their
//! closed-form limits; `coth` is never evaluated at zero.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    /// Dimensionless coupling `beta = eta I_s^2 / 2 pi`.
    pub beta: f64,
    /// Exponential cutoff `omega_c`.
    pub omega_c: f64,
    /// Normalization current `I_s` in units of `I_0`.
    pub i_s: f64,
    /// Thermal frequency `k_B T / hbar`.
    pub thermal: f64,
}

impl BathParams {
    pub fn new(beta: f64, omega_c: f64, i_s: f64, thermal: f64) -> Result<Self> {
        let b = Self { beta, omega_c, i_s, thermal };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(invalid(format!("bath coupling beta must be positive, got {}", self.beta)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(invalid(format!("cutoff frequency must be positive, got {}", self.omega_c)));
        }
        if !(self.i_s > 0.0 && self.i_s.is_finite()) {
            return Err(invalid(format!("normalization current must be positive, got {}", self.i_s)));
        }
        if !(self.thermal >= 0.0 && self.thermal.is_finite()) {
            return Err(invalid(format!("temperature must be non-negative, got {}", self.thermal)));
        }
        Ok(())
    }

    pub fn with_thermal(&self, thermal: f64) -> Self {
        Self { thermal, ..*self }
    }

    /// Ohmic strength `eta = 2 pi beta / I_s^2`.
    pub fn eta(&self) -> f64 {
        2.0 * PI * self.beta / (self.i_s * self.i_s)
    }

    /// `eta exp(-|w| / omega_c)`, the part shared by all three functions.
    fn envelope(&self, w: f64) -> f64 {
        self.eta() * (-w.abs() / self.omega_c).exp()
    }

    /// Imaginary part of the bath susceptibility; odd in `w`.
    pub fn chi_imag(&self, w: f64) -> f64 {
        self.envelope(w) * w
    }

    /// `S(w) = chi''(w) coth(w / 2T)`; even and non-negative.
    pub fn spectral_density(&self, w: f64) -> f64 {
        let env = self.envelope(w);
        if self.thermal == 0.0 {
            return env * w.abs();
        }
        // w coth(w/2T) = 2T x coth(x), x = w/2T, with x coth x -> 1
        let x = w / (2.0 * self.thermal);
        let x_coth_x = if x.abs() < 1e-4 { 1.0 + x * x / 3.0 } else { x / x.tanh() };
        env * 2.0 * self.thermal * x_coth_x
    }

    /// `R(w) = chi''(w) [1 + coth(w / 2T)]`; non-negative, with detailed balance
    /// `R(w) / R(-w) = exp(w / T)`.
    pub fn r_function(&self, w: f64) -> f64 {
        let env = self.envelope(w);
        if self.thermal == 0.0 {
            return if w > 0.0 { 2.0 * env * w } else { 0.0 };
        }
        // w [1 + coth(w/2T)] = 2w / (1 - exp(-w/T)) = -2w / expm1(-w/T)
        let y = w / self.thermal;
        let ratio = if y.abs() < 1e-8 { 2.0 * self.thermal * (1.0 + 0.5 * y) } else { -2.0 * w / (-y).exp_m1() };
        env * ratio
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bath(thermal: f64) -> BathParams {
        BathParams::new(1e-4, 10.0, 0.6, thermal).unwrap()
    }

    #[test]
    fn chi_imag_is_odd_and_zero_at_origin() {
        let b = bath(0.01);
        assert_eq!(b.chi_imag(0.0), 0.0);
        for w in [1e-6, 0.03, 1.7, 40.0] {
            assert_eq!(b.chi_imag(-w), -b.chi_imag(w));
        }
    }

    #[test]
    fn chi_imag_at_cutoff() {
        let b = bath(0.0);
        let want = 2.0 * PI * 1e-4 / 0.36 * 10.0 * (-1.0f64).exp();
        assert!((b.chi_imag(10.0) - want).abs() < 1e-15 * want);
    }

    #[test]
    fn zero_temperature_branches() {
        let b = bath(0.0);
        assert_eq!(b.spectral_density(0.2), b.chi_imag(0.2));
        assert_eq!(b.spectral_density(-0.2), b.chi_imag(0.2));
        assert_eq!(b.r_function(-0.2), 0.0);
        assert_eq!(b.r_function(0.2), 2.0 * b.chi_imag(0.2));
        assert_eq!(b.r_function(0.0), 0.0);
    }

    #[test]
    fn limits_at_zero_frequency() {
        let b = bath(0.004);
        let want = 2.0 * b.eta() * 0.004;
        assert!((b.spectral_density(0.0) - want).abs() < 1e-15 * want);
        assert!((b.r_function(0.0) - want).abs() < 1e-15 * want);
    }

    #[test]
    fn invalid_bath() {
        assert!(BathParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(BathParams::new(1e-4, 1.0, 1.0, -1e-3).is_err());
        assert!(BathParams::new(1e-4, -1.0, 1.0, 0.0).is_err());
    }
}
