//! Devices and flux points cached across the curves of a run. Sweeps that
//! share a flux value (several temperatures, drives or panels at the same
//! `f`) diagonalize it once.

use std::collections::HashMap;
use std::sync::Mutex;

use flux_eit::current::{currents_at, ThreeLevelCurrents};
use flux_eit::model::{Device, FluxPoint};
use flux_eit::rates::DriveConfig;
use flux_eit::spectrum::{BasisTruncation, SWEEP_LEVELS};

use crate::config::{Circuit, RunConfig};
use crate::Result;

type DeviceKey = [u64; 5];

fn key(c: &Circuit) -> DeviceKey {
    [c.alpha.to_bits(), c.ej_over_ec.to_bits(), c.ej_ghz.to_bits(), c.n_p as u64, c.n_m as u64]
}

/// Six lowest levels and the three-level currents at one flux value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelPoint {
    pub f: f64,
    pub levels: [f64; SWEEP_LEVELS],
    pub currents: ThreeLevelCurrents,
}

#[derive(Default)]
pub struct Lab {
    devices: Mutex<HashMap<DeviceKey, Device>>,
    points: Mutex<HashMap<(DeviceKey, u64), FluxPoint>>,
    levels: Mutex<HashMap<(DeviceKey, u64), LevelPoint>>,
}

impl Lab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn device(&self, c: &Circuit) -> Result<Device> {
        let mut map = self.devices.lock().unwrap();
        if let Some(d) = map.get(&key(c)) {
            return Ok(*d);
        }
        let d = Device::new(c.alpha, c.ej_over_ec, c.ej_ghz, BasisTruncation::new(c.n_p, c.n_m))?;
        map.insert(key(c), d);
        Ok(d)
    }

    pub fn flux_point(&self, c: &Circuit, f: f64) -> Result<FluxPoint> {
        let k = (key(c), f.to_bits());
        if let Some(p) = self.points.lock().unwrap().get(&k) {
            return Ok(*p);
        }
        let p = self.device(c)?.flux_point(f)?;
        self.points.lock().unwrap().insert(k, p);
        Ok(p)
    }

    pub fn level_point(&self, c: &Circuit, f: f64) -> Result<LevelPoint> {
        let k = (key(c), f.to_bits());
        if let Some(p) = self.levels.lock().unwrap().get(&k) {
            return Ok(*p);
        }
        let d = self.device(c)?;
        let (spec, cur) = currents_at(&d.circuit.with_flux(f), d.trunc, SWEEP_LEVELS)?;
        let mut levels = [0.0; SWEEP_LEVELS];
        levels.copy_from_slice(&spec.eigenvalues[..SWEEP_LEVELS]);
        let p = LevelPoint { f, levels, currents: cur.three_level()? };
        self.levels.lock().unwrap().insert(k, p);
        Ok(p)
    }
}

/// Drive of a configuration in internal units.
pub fn drive(d: &Device, cfg: &RunConfig) -> Result<DriveConfig> {
    Ok(DriveConfig::new(d.scale.from_mhz_freq(cfg.drive.rabi_mhz), d.scale.from_mhz_freq(cfg.drive.detuning_mhz))?)
}
