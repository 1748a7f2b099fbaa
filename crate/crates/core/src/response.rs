//! Linear probe susceptibility of the driven three-level system.
//!
//! With `hbar = 1` and currents in `I_0`, the susceptibility is in units of
//! `I_0^2 / (E_J / hbar)`. Only the rotating (`omega > 0`) branch is modelled:
//!
//! ```text
//! chi01 = |I01|^2 (d1 - Delta + i g22) / D1(d1),   d1 = omega - omega_1
//! chi02 = |I02|^2 (d2 + i g11) / D1(d2),           d2 = omega - omega'
//! D1(d) = -(d + i g11)(d - Delta + i g22) + (i g12 - Omega_D)(i g21 - Omega_D*)
//! ```

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::{DampingRates, DriveConfig};

const I: C64 = C64::new(0.0, 1.0);

/// Relative separation below which the two poles are treated as coincident.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// The two probe windows: near `omega_1` (`|0> <-> |1>`) and near `omega'`
/// (`|0> <-> |2>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Window {
    W01,
    W02,
}

impl Window {
    pub fn label(&self) -> &'static str {
        match self {
            Window::W01 => "01",
            Window::W02 => "02",
        }
    }
}

/// `D1(delta)` for complex `delta`.
pub fn d1(delta: C64, rates: &DampingRates, drive: &DriveConfig) -> C64 {
    let od = C64::from(drive.coupling());
    -(delta + I * rates.g11) * (delta - drive.detuning + I * rates.g22)
        + (I * rates.g12 - od) * (I * rates.g21 - od.conj())
}

fn numerator(window: Window, delta: C64, rates: &DampingRates, drive: &DriveConfig) -> C64 {
    match window {
        Window::W01 => delta - drive.detuning + I * rates.g22,
        Window::W02 => delta + I * rates.g11,
    }
}

pub fn chi01(delta1: f64, rates: &DampingRates, drive: &DriveConfig, i01_abs: f64) -> C64 {
    let d = C64::from(delta1);
    i01_abs * i01_abs * numerator(Window::W01, d, rates, drive) / d1(d, rates, drive)
}

pub fn chi02(delta2: f64, rates: &DampingRates, drive: &DriveConfig, i02_abs: f64) -> C64 {
    let d = C64::from(delta2);
    i02_abs * i02_abs * numerator(Window::W02, d, rates, drive) / d1(d, rates, drive)
}

/// Everything the susceptibility needs at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseContext {
    pub rates: DampingRates,
    pub drive: DriveConfig,
    pub omega1: f64,
    /// `omega' = omega_0 + omega_1 = omega_2 - Delta`.
    pub omega_prime: f64,
    pub i01_abs: f64,
    pub i02_abs: f64,
}

impl ResponseContext {
    pub fn window_center(&self, window: Window) -> f64 {
        match window {
            Window::W01 => self.omega1,
            Window::W02 => self.omega_prime,
        }
    }

    pub fn strength(&self, window: Window) -> f64 {
        match window {
            Window::W01 => self.i01_abs * self.i01_abs,
            Window::W02 => self.i02_abs * self.i02_abs,
        }
    }

    /// `chi_q` at probe frequency `omega_p`. Negative frequencies are mapped
    /// through `chi(-omega) = -chi(omega)` and flagged as extrapolated.
    pub fn chi_q(&self, omega_p: f64) -> ResponsePoint {
        if omega_p < 0.0 {
            let p = self.chi_q(-omega_p);
            return ResponsePoint {
                omega_p,
                chi01: -p.chi01,
                chi02: -p.chi02,
                chi_q: -p.chi_q,
                extrapolated: true,
                ..p
            };
        }
        let delta1 = omega_p - self.omega1;
        let delta2 = omega_p - self.omega_prime;
        let c1 = chi01(delta1, &self.rates, &self.drive, self.i01_abs);
        let c2 = chi02(delta2, &self.rates, &self.drive, self.i02_abs);
        ResponsePoint { omega_p, delta1, delta2, chi01: c1, chi02: c2, chi_q: c1 + c2, extrapolated: false }
    }

    pub fn decompose(&self, window: Window) -> Result<ResonancePair> {
        decompose(window, &self.rates, &self.drive, self.strength(window))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub omega_p: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub chi01: C64,
    pub chi02: C64,
    pub chi_q: C64,
    pub extrapolated: bool,
}

/// Which way the two poles are separated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitKind {
    /// Poles separated mostly along the real axis (split resonances).
    Real,
    /// Poles separated mostly along the imaginary axis (same center, different widths).
    Imaginary,
}

/// Two-pole decomposition `chi(d) = c+ / (d - d+) + c- / (d - d-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonancePair {
    pub window: Window,
    pub delta_plus: C64,
    pub delta_minus: C64,
    /// Residues `c+-`.
    pub residue_plus: C64,
    pub residue_minus: C64,
    pub split: SplitKind,
}

impl ResonancePair {
    pub fn r_plus(&self, delta: f64) -> C64 {
        self.residue_plus / (delta - self.delta_plus)
    }

    pub fn r_minus(&self, delta: f64) -> C64 {
        self.residue_minus / (delta - self.delta_minus)
    }

    pub fn eval(&self, delta: f64) -> C64 {
        self.r_plus(delta) + self.r_minus(delta)
    }
}

/// Roots of `D1(delta) = 0`, ordered by descending real part and then by
/// descending imaginary part.
pub fn resonance_roots(rates: &DampingRates, drive: &DriveConfig) -> (C64, C64) {
    // D1 = -(d^2 + b d + e)
    let od = C64::from(drive.coupling());
    let c = (I * rates.g12 - od) * (I * rates.g21 - od.conj());
    let b = I * (rates.g11 + rates.g22) - drive.detuning;
    let e = I * rates.g11 * (I * rates.g22 - drive.detuning) - c;
    let (r1, r2) = quadratic_roots(b, e);
    let first = match r1.re.total_cmp(&r2.re) {
        std::cmp::Ordering::Equal => r1.im >= r2.im,
        o => o.is_gt(),
    };
    if first {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Roots of `z^2 + b z + e`, avoiding cancellation.
fn quadratic_roots(b: C64, e: C64) -> (C64, C64) {
    let sq = (b * b - 4.0 * e).sqrt();
    let s = if (b.conj() * sq).re >= 0.0 { sq } else { -sq };
    let q = -(b + s) / 2.0;
    if q == C64::from(0.0) {
        return (q, q);
    }
    (q, e / q)
}

pub fn decompose(window: Window, rates: &DampingRates, drive: &DriveConfig, strength: f64) -> Result<ResonancePair> {
    let (dp, dm) = resonance_roots(rates, drive);
    let scale = dp.norm().max(dm.norm()).max(rates.g11.abs() + rates.g22.abs()).max(f64::MIN_POSITIVE);
    let sep = dp - dm;
    if sep.norm() < DEGENERACY_TOL * scale {
        return Err(Error::Bifurcation { separation: sep.norm() });
    }
    let residue_plus = strength * numerator(window, dp, rates, drive) / (dm - dp);
    let residue_minus = strength * numerator(window, dm, rates, drive) / (dp - dm);
    let split = if sep.re.abs() > sep.im.abs() { SplitKind::Real } else { SplitKind::Imaginary };
    Ok(ResonancePair { window, delta_plus: dp, delta_minus: dm, residue_plus, residue_minus, split })
}

/// Frequency-domain Green functions with `Gamma_lm -> i gamma_lm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenFunctions {
    pub g11: C64,
    pub g12: C64,
    pub g21: C64,
    pub g22: C64,
}

pub fn green_functions(omega: C64, rates: &DampingRates, drive: &DriveConfig) -> GreenFunctions {
    let od = C64::from(drive.coupling());
    let d = d1(omega, rates, drive);
    GreenFunctions {
        g11: I * (omega + I * rates.g11) / d,
        g12: I * (I * rates.g12 - od) / d,
        g21: I * (I * rates.g21 - od.conj()) / d,
        g22: I * (omega - drive.detuning + I * rates.g22) / d,
    }
}
