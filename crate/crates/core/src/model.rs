//! A circuit together with its bath normalization, and helpers that chain
//! spectrum, currents, rates and response at an operating point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::BathParams;
use crate::current::{currents_at, ThreeLevelCurrents};
use crate::error::{invalid, Result};
use crate::rates::{damping_rates, rate_terms, validity_warnings, DampingRates, DriveConfig, RateBreakdown, ValidityWarning};
use crate::response::ResponseContext;
use crate::spectrum::{transition_frequencies, BasisTruncation, CircuitParams, TransitionFrequencies, OPTIMAL_FLUX};
use crate::units::EnergyScale;

/// Circuit parameters without the flux, plus the cached bath normalization
/// `I_s = |I01|` and `omega_s = (E2 - E0) / hbar`, both taken at `f = 0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub circuit: CircuitParams,
    pub scale: EnergyScale,
    pub trunc: BasisTruncation,
    pub i_s: f64,
    pub omega_s: f64,
}

impl Device {
    pub fn new(alpha: f64, ej_over_ec: f64, ej_ghz: f64, trunc: BasisTruncation) -> Result<Self> {
        let scale = EnergyScale::from_ghz(ej_ghz);
        let circuit = CircuitParams::new(alpha, ej_over_ec, scale.rad_per_s(), OPTIMAL_FLUX)?;
        let opt = flux_point(&circuit, trunc, OPTIMAL_FLUX)?;
        Ok(Self { circuit, scale, trunc, i_s: opt.currents.i01.abs(), omega_s: opt.freqs.omega2 })
    }

    /// `alpha = 0.7`, `E_J / E_c = 48`, `E_J / h = 144 GHz`.
    pub fn reference() -> Result<Self> {
        Self::new(0.7, 48.0, 144.0, BasisTruncation::default())
    }

    pub fn flux_point(&self, f: f64) -> Result<FluxPoint> {
        flux_point(&self.circuit, self.trunc, f)
    }

    /// Ohmic bath with cutoff `cutoff_multiplier * omega_s` at temperature `t_mk`.
    pub fn bath(&self, beta: f64, cutoff_multiplier: f64, t_mk: f64) -> Result<BathParams> {
        if !(t_mk >= 0.0) {
            return Err(invalid(format!("temperature must be non-negative, got {t_mk} mK")));
        }
        BathParams::new(beta, cutoff_multiplier * self.omega_s, self.i_s, self.scale.thermal_from_millikelvin(t_mk))
    }
}

/// Three-level data of the circuit at one flux value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxPoint {
    pub f: f64,
    pub levels: [f64; 3],
    pub freqs: TransitionFrequencies,
    pub currents: ThreeLevelCurrents,
}

pub fn flux_point(circuit: &CircuitParams, trunc: BasisTruncation, f: f64) -> Result<FluxPoint> {
    let (spec, cur) = currents_at(&circuit.with_flux(f), trunc, 3)?;
    let e = &spec.eigenvalues;
    Ok(FluxPoint { f, levels: [e[0], e[1], e[2]], freqs: transition_frequencies(&spec)?, currents: cur.three_level()? })
}

impl FluxPoint {
    pub fn rates(&self, drive: &DriveConfig, bath: &BathParams) -> Result<DampingRates> {
        damping_rates(&self.currents, &self.freqs, drive, bath)
    }

    pub fn rate_terms(&self, drive: &DriveConfig, bath: &BathParams) -> Result<RateBreakdown> {
        rate_terms(&self.currents, &self.freqs, drive, bath)
    }

    pub fn warnings(&self, drive: &DriveConfig, bath: &BathParams) -> Vec<ValidityWarning> {
        validity_warnings(&self.freqs, drive, bath)
    }

    pub fn response(&self, drive: &DriveConfig, bath: &BathParams) -> Result<ResponseContext> {
        Ok(self.response_with(self.rates(drive, bath)?, drive))
    }

    /// Response context with externally supplied rates.
    pub fn response_with(&self, rates: DampingRates, drive: &DriveConfig) -> ResponseContext {
        ResponseContext {
            rates,
            drive: *drive,
            omega1: self.freqs.omega1,
            omega_prime: self.freqs.omega2 - drive.detuning,
            i01_abs: self.currents.i01.abs(),
            i02_abs: self.currents.i02.abs(),
        }
    }
}

/// Parameters of one damping-rate evaluation. Rabi frequency and detuning
/// are in internal units, the temperature in millikelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub f: f64,
    pub t_mk: f64,
    pub rabi: f64,
    pub detuning: f64,
    pub beta: f64,
    pub cutoff_multiplier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateAxis {
    Flux,
    Temperature,
    Rabi,
}

#[derive(Debug, Clone)]
pub struct RateRow {
    pub x: f64,
    pub rates: Result<DampingRates>,
}

/// Damping rates along one axis with the other parameters fixed at `base`.
/// Rows are independent; a failing row is reported and the sweep continues.
pub fn sweep_rates(device: &Device, axis: RateAxis, grid: &[f64], base: RatePoint) -> Result<Vec<RateRow>> {
    if grid.is_empty() {
        return Err(invalid("sweep grid is empty"));
    }
    let bad = grid.iter().find(|&&x| match axis {
        RateAxis::Flux => !(0.4..=0.6).contains(&x),
        RateAxis::Temperature | RateAxis::Rabi => !(x >= 0.0 && x.is_finite()),
    });
    if let Some(x) = bad {
        return Err(invalid(format!("grid value {x} is outside the physical range of the {axis:?} axis")));
    }
    let fixed = match axis {
        RateAxis::Flux => None,
        _ => Some(device.flux_point(base.f)?),
    };
    let eval = |x: f64| -> Result<DampingRates> {
        let mut p = base;
        match axis {
            RateAxis::Flux => p.f = x,
            RateAxis::Temperature => p.t_mk = x,
            RateAxis::Rabi => p.rabi = x,
        }
        let fp = match fixed {
            Some(fp) => fp,
            None => device.flux_point(p.f)?,
        };
        let bath = device.bath(p.beta, p.cutoff_multiplier, p.t_mk)?;
        fp.rates(&DriveConfig::new(p.rabi, p.detuning)?, &bath)
    };
    Ok(grid.par_iter().map(|&x| RateRow { x, rates: eval(x) }).collect())
}
