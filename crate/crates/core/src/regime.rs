//! EIT / ATS classification of the two probe windows.
//!
//! Two Rabi-frequency thresholds organize the response:
//! `Omega_W = |g11 - g22| / 2` separates weak from strong driving (poles
//! split along the imaginary or the real axis), and
//! `Omega_M01 = g22 sqrt(g22 / (g11 + 2 g22))` (window 01; window 02 swaps
//! `g11` and `g22`) separates a local maximum of the absorption at the window
//! center from a local minimum. The conditions are exact for `Delta = 0`,
//! `g12 = g21 = 0`; otherwise they are applied as an approximation and the
//! report says so.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rates::{DampingRates, DriveConfig};
use crate::response::{chi01, chi02, Window};

/// Relative half-width of the band around `Omega_W` labelled as bifurcation.
pub const BIFURCATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub omega_w: f64,
    pub omega_m01: f64,
    pub omega_m02: f64,
}

impl Thresholds {
    pub fn omega_m(&self, window: Window) -> f64 {
        match window {
            Window::W01 => self.omega_m01,
            Window::W02 => self.omega_m02,
        }
    }
}

pub fn thresholds(rates: &DampingRates) -> Result<Thresholds> {
    let (a, b) = (rates.g11, rates.g22);
    if !(a > 0.0 && b > 0.0) {
        return Err(invalid(format!("thresholds need positive g11, g22, got {a}, {b}")));
    }
    Ok(Thresholds {
        omega_w: (a - b).abs() / 2.0,
        omega_m01: b * (b / (a + 2.0 * b)).sqrt(),
        omega_m02: a * (a / (b + 2.0 * a)).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    Eit,
    Ats,
    Neither,
    Bifurcation,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::Eit => "EIT",
            RegimeLabel::Ats => "ATS",
            RegimeLabel::Neither => "NEITHER",
            RegimeLabel::Bifurcation => "BIFURCATION",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Driving {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extremum {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub window: Window,
    pub label: RegimeLabel,
    pub omega_w: f64,
    pub omega_m: f64,
    pub driving: Driving,
    pub extremum: Extremum,
    /// Set when `Delta`, `g12` or `g21` is nonzero and the conditions hold
    /// only approximately.
    pub approximate: bool,
}

pub fn classify(window: Window, rates: &DampingRates, drive: &DriveConfig) -> Result<RegimeReport> {
    let th = thresholds(rates)?;
    let rabi = drive.rabi;
    let (own, other) = match window {
        Window::W01 => (rates.g11, rates.g22),
        Window::W02 => (rates.g22, rates.g11),
    };
    let omega_m = th.omega_m(window);
    let omega_w = th.omega_w;
    let eit_possible = own > 2.0 * other;

    let label = if (rabi - omega_w).abs() < BIFURCATION_TOL * omega_w {
        RegimeLabel::Bifurcation
    } else if eit_possible && omega_m < rabi && rabi < omega_w {
        RegimeLabel::Eit
    } else if (eit_possible && rabi > omega_w) || (!eit_possible && rabi > omega_m) {
        RegimeLabel::Ats
    } else {
        RegimeLabel::Neither
    };
    Ok(RegimeReport {
        window,
        label,
        omega_w,
        omega_m,
        driving: if rabi < omega_w { Driving::Weak } else { Driving::Strong },
        extremum: if rabi > omega_m { Extremum::Minimum } else { Extremum::Maximum },
        approximate: drive.detuning != 0.0 || rates.g12 != 0.0 || rates.g21 != 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCheck {
    pub rabi: f64,
    pub classifier: Extremum,
    pub numerical: Extremum,
    /// Second difference of `Im chi` at the window center.
    pub curvature: f64,
    /// `|Omega_D|` lies within 5% of `Omega_M`.
    pub near_threshold: bool,
}

impl CurvatureCheck {
    pub fn agrees(&self) -> bool {
        self.classifier == self.numerical
    }
}

/// Compares the classifier's maximum/minimum regime with the sign of the
/// second difference of `Im chi` at the window center, with `Delta = 0` and
/// `g12 = g21 = 0`.
pub fn verify_against_spectrum(window: Window, rates: &DampingRates, rabi_grid: &[f64]) -> Result<Vec<CurvatureCheck>> {
    let clean = DampingRates { g12: 0.0, g21: 0.0, ..*rates };
    let th = thresholds(&clean)?;
    let h = 1e-3 * clean.g11.min(clean.g22);
    rabi_grid
        .iter()
        .map(|&rabi| {
            let drive = DriveConfig::new(rabi, 0.0)?;
            let chi = |d: f64| -> C64 {
                match window {
                    Window::W01 => chi01(d, &clean, &drive, 1.0),
                    Window::W02 => chi02(d, &clean, &drive, 1.0),
                }
            };
            let curvature = chi(h).im + chi(-h).im - 2.0 * chi(0.0).im;
            let report = classify(window, &clean, &drive)?;
            let omega_m = th.omega_m(window);
            Ok(CurvatureCheck {
                rabi,
                classifier: report.extremum,
                numerical: if curvature > 0.0 { Extremum::Minimum } else { Extremum::Maximum },
                curvature,
                near_threshold: (rabi - omega_m).abs() <= 0.05 * omega_m,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(g11: f64, g22: f64) -> DampingRates {
        DampingRates { g11, g22, g12: 0.0, g21: 0.0 }
    }

    fn label(window: Window, g11: f64, g22: f64, rabi: f64) -> RegimeLabel {
        classify(window, &rates(g11, g22), &DriveConfig::new(rabi, 0.0).unwrap()).unwrap().label
    }

    #[test]
    fn threshold_values() {
        let t = thresholds(&rates(3.0, 1.0)).unwrap();
        assert_eq!(t.omega_w, 1.0);
        assert!((t.omega_m01 - 0.2f64.sqrt()).abs() < 1e-15);
        let t = thresholds(&rates(2.0, 2.0)).unwrap();
        assert_eq!(t.omega_w, 0.0);
        assert!((t.omega_m01 - 2.0 / 3.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.omega_m01, t.omega_m02);
        let t = thresholds(&rates(1.0, 3.0)).unwrap();
        assert!((t.omega_m02 - 0.2f64.sqrt()).abs() < 1e-15 && t.omega_m02 < t.omega_w);
    }

    #[test]
    fn nonpositive_rates_rejected() {
        assert!(thresholds(&rates(0.0, 1.0)).is_err());
        assert!(thresholds(&rates(1.0, -1.0)).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(label(Window::W01, 3.0, 1.0, 0.7), RegimeLabel::Eit);
        assert_eq!(label(Window::W01, 3.0, 1.0, 2.0), RegimeLabel::Ats);
        assert_eq!(label(Window::W01, 1.0, 1.0, 0.3), RegimeLabel::Neither);
        assert_eq!(label(Window::W01, 3.0, 1.0, 1.0 + 1e-8), RegimeLabel::Bifurcation);
        assert_eq!(label(Window::W02, 1.0, 3.0, 0.7), RegimeLabel::Eit);
    }

    #[test]
    fn approximate_flag() {
        let r = DampingRates { g11: 1.0, g22: 1.0, g12: 0.01, g21: 0.0 };
        assert!(classify(Window::W01, &r, &DriveConfig::new(1.0, 0.0).unwrap()).unwrap().approximate);
        assert!(classify(Window::W01, &rates(1.0, 1.0), &DriveConfig::new(1.0, 0.1).unwrap()).unwrap().approximate);
        assert!(!classify(Window::W01, &rates(1.0, 1.0), &DriveConfig::new(1.0, 0.0).unwrap()).unwrap().approximate);
    }

    #[test]
    fn curvature_limits() {
        let checks = verify_against_spectrum(Window::W01, &rates(3.0, 1.0), &[1e-3, 50.0]).unwrap();
        assert_eq!(checks[0].numerical, Extremum::Maximum);
        assert_eq!(checks[1].numerical, Extremum::Minimum);
        assert!(checks.iter().all(CurvatureCheck::agrees));
    }
}
