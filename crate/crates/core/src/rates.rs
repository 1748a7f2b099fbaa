//! Drive-dressed damping rates of the probed coherences.
//!
//! The drive couples `|1>` and `|2>` with Rabi frequency `Omega_D` at
//! detuning `Delta = omega_3 - omega_0`. In the rotating frame the pair is
//! mixed into dressed states split by `Omega = sqrt(Delta^2 + 4|Omega_D|^2)`
//! with mixing angle `tan(theta) = sqrt((Omega - Delta)/(Omega + Delta))`.
//! The four rates are sums of current weights times bath coefficients
//! evaluated at the dressed frequencies
//!
//! ```text
//! w0(+-) = w0 +- Omega,  w1(+-) = w1 + (Delta +- Omega)/2,  w'(+-) = w' + (Delta +- Omega)/2
//! ```
//!
//! with `w0 = w3 - Delta` the drive frequency and `w' = w0 + w1`.
//! Lamb shifts (real parts of the complex coefficients) are dropped.

use serde::{Deserialize, Serialize};

use crate::bath::BathParams;
use crate::current::ThreeLevelCurrents;
use crate::error::{invalid, Result};
use crate::spectrum::TransitionFrequencies;

/// Drive acting on the `|1> <-> |2>` transition, in internal frequency units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Rabi frequency `|Omega_D|`.
    pub rabi: f64,
    /// Detuning `Delta = omega_3 - omega_0`.
    pub detuning: f64,
    /// Drive phase; `nu = exp(i phase)` must be real.
    pub phase: f64,
}

impl DriveConfig {
    pub fn new(rabi: f64, detuning: f64) -> Result<Self> {
        let d = Self { rabi, detuning, phase: 0.0 };
        d.validate()?;
        Ok(d)
    }

    pub fn with_phase(self, phase: f64) -> Result<Self> {
        let d = Self { phase, ..self };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi >= 0.0 && self.rabi.is_finite()) {
            return Err(invalid(format!("Rabi frequency must be non-negative, got {}", self.rabi)));
        }
        if !self.detuning.is_finite() {
            return Err(invalid("detuning must be finite"));
        }
        if self.phase.sin().abs() > 1e-12 {
            return Err(invalid(format!("drive phase {} gives a complex nu; only nu = +1 or -1 is supported", self.phase)));
        }
        Ok(())
    }

    /// `nu = Omega_D / |Omega_D|` as a real sign.
    pub fn nu(&self) -> f64 {
        self.phase.cos().signum()
    }

    /// Complex drive coupling `Omega_D = nu |Omega_D|`.
    pub fn coupling(&self) -> f64 {
        self.nu() * self.rabi
    }

    pub fn dressed(&self) -> DressedParams {
        dressed_params(self.detuning, self.rabi, self.nu())
    }
}

/// Dressed-state parameters of the driven `|1>, |2>` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedParams {
    /// Generalized Rabi frequency `Omega`; equals the dressed splitting.
    pub omega: f64,
    pub theta: f64,
    pub nu: f64,
    /// `sin^2 theta`, `cos^2 theta`, `sin 2 theta`, `cos 2 theta` in closed
    /// form, so the drive-off limit is exact.
    pub sin2: f64,
    pub cos2: f64,
    pub sin_2theta: f64,
    pub cos_2theta: f64,
}

/// Dressed parameters for detuning `delta` and Rabi frequency `rabi`.
///
/// Without drive `theta = 0` for `delta >= 0`; for `delta < 0` the undriven
/// limit of the mixing-angle formula is `pi / 2`, which labels the same
/// dressed states with their roles exchanged.
pub fn dressed_params(delta: f64, rabi: f64, nu: f64) -> DressedParams {
    let omega = (delta * delta + 4.0 * rabi * rabi).sqrt();
    if omega == 0.0 {
        return DressedParams { omega, theta: 0.0, nu, sin2: 0.0, cos2: 1.0, sin_2theta: 0.0, cos_2theta: 1.0 };
    }
    let theta = (omega - delta).max(0.0).sqrt().atan2((omega + delta).max(0.0).sqrt());
    DressedParams {
        omega,
        theta,
        nu,
        sin2: (omega - delta) / (2.0 * omega),
        cos2: (omega + delta) / (2.0 * omega),
        sin_2theta: 2.0 * rabi / omega,
        cos_2theta: delta / omega,
    }
}

/// Damping rates `gamma_lm`, internal frequency units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingRates {
    pub g11: f64,
    pub g22: f64,
    pub g12: f64,
    pub g21: f64,
}

/// One current weight times its bath coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTerm {
    pub weight: f64,
    pub coefficient: f64,
}

impl RateTerm {
    pub fn value(&self) -> f64 {
        self.weight * self.coefficient
    }
}

/// Term-by-term decomposition of the four rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    /// Weights `|I01|^2, |I02|^2, |I12|^2, (I00-I11)I00, (I00-I11)I11, (I00-I11)I22`.
    pub g11: [RateTerm; 6],
    /// Weights `|I01|^2, |I12|^2, (I00-I11)I11, (I00-I11)I22`.
    pub g12: [RateTerm; 4],
    /// Weights `|I02|^2, |I12|^2, (I00-I22)I11, (I00-I22)I22`.
    pub g21: [RateTerm; 4],
    /// Weights `|I01|^2, |I02|^2, |I12|^2, (I00-I22)I00, (I00-I22)I11, (I00-I22)I22`.
    pub g22: [RateTerm; 6],
}

impl RateBreakdown {
    pub fn rates(&self) -> DampingRates {
        let sum = |t: &[RateTerm]| t.iter().map(RateTerm::value).sum::<f64>();
        DampingRates { g11: sum(&self.g11), g22: sum(&self.g22), g12: sum(&self.g12), g21: sum(&self.g21) }
    }
}

/// Conditions under which the rate expressions are outside their regime of validity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ValidityWarning {
    /// `max(|Omega_D|, |Delta|) / min(omega_1, omega_3)` above 5%.
    RotatingWave { ratio: f64 },
    /// `k_B T / hbar omega_1` above 0.2; thermal populations are neglected.
    Thermal { ratio: f64 },
}

pub fn validity_warnings(freqs: &TransitionFrequencies, drive: &DriveConfig, bath: &BathParams) -> Vec<ValidityWarning> {
    let mut out = Vec::new();
    let rwa = drive.rabi.max(drive.detuning.abs()) / freqs.omega1.min(freqs.omega3);
    if rwa > 0.05 {
        out.push(ValidityWarning::RotatingWave { ratio: rwa });
    }
    let thermal = bath.thermal / freqs.omega1;
    if thermal > 0.2 {
        out.push(ValidityWarning::Thermal { ratio: thermal });
    }
    out
}

/// Current weights and bath coefficients of every rate term.
pub fn rate_terms(
    cur: &ThreeLevelCurrents,
    freqs: &TransitionFrequencies,
    drive: &DriveConfig,
    bath: &BathParams,
) -> Result<RateBreakdown> {
    drive.validate()?;
    bath.validate()?;
    if !(freqs.omega1 > 0.0 && freqs.omega3 > 0.0) {
        return Err(invalid("transition frequencies must be positive"));
    }
    let d = drive.dressed();
    let (s2, c2, sin2t, cos2t, nu) = (d.sin2, d.cos2, d.sin_2theta, d.cos_2theta, d.nu);
    let big = d.omega;
    let delta = drive.detuning;

    let w0 = freqs.omega3 - delta;
    let w1 = freqs.omega1;
    let wp = w0 + w1;
    let (w0p, w0m) = (w0 + big, w0 - big);
    let (w1p, w1m) = (w1 + (delta + big) / 2.0, w1 + (delta - big) / 2.0);
    let (wpp, wpm) = (wp + (delta + big) / 2.0, wp + (delta - big) / 2.0);

    let r = |w: f64| bath.r_function(w);
    let s = |w: f64| bath.spectral_density(w);
    let sq = sin2t * sin2t;

    let a11 = s2 * s(w1p) + c2 * s(w1m);
    let a12 = c2 / 2.0 * r(-wpp) + s2 / 2.0 * r(-wpm);
    let a13 = c2 * c2 / 2.0 * r(-w0p) + s2 * s2 / 2.0 * r(-w0m) + sq / 4.0 * r(-w0);
    let a14 = r(0.0) / 2.0;
    let a15 = -sq / 8.0 * r(big) - sq / 8.0 * r(-big) - (1.0 + cos2t * cos2t) / 4.0 * r(0.0);
    let a16 = sq / 8.0 * r(big) + sq / 8.0 * r(-big) - sq / 4.0 * r(0.0);

    let k = nu * sin2t / 4.0;
    let a21 = k * r(w1p) - k * r(w1m);
    let a22 = -k * c2 * r(-w0p) + k * s2 * r(-w0m) + k * cos2t * r(-w0);
    let a23 = -k * c2 * r(big) + k * s2 * r(-big) + k * cos2t * r(0.0);
    let a24 = k * c2 * r(big) - k * s2 * r(-big) - k * cos2t * r(0.0);

    let b11 = k * r(wpp) - k * r(wpm);
    let b12 = k * c2 * r(w0p) - k * s2 * r(w0m) - k * cos2t * r(w0);
    let b13 = k * s2 * r(big) - k * c2 * r(-big) + k * cos2t * r(0.0);
    let b14 = -k * s2 * r(big) + k * c2 * r(-big) - k * cos2t * r(0.0);

    let b21 = s2 / 2.0 * r(-w1p) + c2 / 2.0 * r(-w1m);
    let b22 = c2 * s(wpp) + s2 * s(wpm);
    let b23 = c2 * c2 / 2.0 * r(w0p) + s2 * s2 / 2.0 * r(w0m) + sq / 4.0 * r(w0);
    let b24 = r(0.0) / 2.0;
    let b25 = sq / 8.0 * r(big) + sq / 8.0 * r(-big) - sq / 4.0 * r(0.0);
    let b26 = -sq / 8.0 * r(big) - sq / 8.0 * r(-big) - (1.0 + cos2t * cos2t) / 4.0 * r(0.0);

    let (p01, p02, p12) = (cur.i01 * cur.i01, cur.i02 * cur.i02, cur.i12 * cur.i12);
    let d1 = cur.i00 - cur.i11;
    let d2 = cur.i00 - cur.i22;
    let t = |weight: f64, coefficient: f64| RateTerm { weight, coefficient };
    Ok(RateBreakdown {
        g11: [t(p01, a11), t(p02, a12), t(p12, a13), t(d1 * cur.i00, a14), t(d1 * cur.i11, a15), t(d1 * cur.i22, a16)],
        g12: [t(p01, a21), t(p12, a22), t(d1 * cur.i11, a23), t(d1 * cur.i22, a24)],
        g21: [t(p02, b11), t(p12, b12), t(d2 * cur.i11, b13), t(d2 * cur.i22, b14)],
        g22: [t(p01, b21), t(p02, b22), t(p12, b23), t(d2 * cur.i00, b24), t(d2 * cur.i11, b25), t(d2 * cur.i22, b26)],
    })
}

pub fn damping_rates(
    cur: &ThreeLevelCurrents,
    freqs: &TransitionFrequencies,
    drive: &DriveConfig,
    bath: &BathParams,
) -> Result<DampingRates> {
    Ok(rate_terms(cur, freqs, drive, bath)?.rates())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn resonant_drive_mixes_evenly() {
        let d = dressed_params(0.0, 0.3, 1.0);
        assert!((d.omega - 0.6).abs() < 1e-15);
        assert!((d.theta - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn undriven_positive_detuning() {
        let d = dressed_params(0.2, 0.0, 1.0);
        assert_eq!(d.omega, 0.2);
        assert_eq!(d.theta, 0.0);
        assert_eq!(d.sin_2theta, 0.0);
    }

    #[test]
    fn three_four_five() {
        let d = dressed_params(3.0, 2.0, 1.0);
        assert!((d.omega - 5.0).abs() < 1e-15);
        assert!((d.theta.tan() - 0.5).abs() < 1e-15);
        assert!((d.sin2 - d.theta.sin().powi(2)).abs() < 1e-15);
        assert!((d.sin_2theta - (2.0 * d.theta).sin()).abs() < 1e-15);
    }

    #[test]
    fn complex_nu_rejected() {
        let d = DriveConfig::new(0.1, 0.0).unwrap();
        assert!(d.with_phase(0.3).is_err());
        assert_eq!(d.with_phase(std::f64::consts::PI).unwrap().nu(), -1.0);
    }

    #[test]
    fn optimal_point_surviving_terms() {
        let cur = ThreeLevelCurrents { i01: 0.6, i02: 0.0, i12: 0.45, i00: 0.0, i11: 0.0, i22: 0.0 };
        let freqs = TransitionFrequencies::from_levels(0.0, 0.0257, 0.1576);
        let bath = BathParams::new(1e-4, 15.0, 0.6, 0.0).unwrap();
        let drive = DriveConfig::new(0.0, 0.0).unwrap();
        let g = damping_rates(&cur, &freqs, &drive, &bath).unwrap();
        assert_eq!(g.g12, 0.0);
        assert_eq!(g.g21, 0.0);
        assert!((g.g11 - 0.36 * bath.spectral_density(freqs.omega1)).abs() < 1e-18);
        assert!((g.g22 - 0.45 * 0.45 / 2.0 * bath.r_function(freqs.omega3)).abs() < 1e-18);
    }

    #[test]
    fn warnings() {
        let freqs = TransitionFrequencies::from_levels(0.0, 0.02, 0.15);
        let bath = BathParams::new(1e-4, 15.0, 0.6, 0.002).unwrap();
        assert!(validity_warnings(&freqs, &DriveConfig::new(1e-4, 0.0).unwrap(), &bath).is_empty());
        let w = validity_warnings(&freqs, &DriveConfig::new(0.002, 0.0).unwrap(), &bath.with_thermal(0.01));
        assert_eq!(w.len(), 2);
    }
}
