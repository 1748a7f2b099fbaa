//! Time-domain check of the susceptibility.
//!
//! Integrates the linearized coherence equations in the rotating frame,
//!
//! ```text
//! ds01/dt = -g11 s01 - (g12 + i Omega_D) s02 + i I10 Phi exp(-i d1 t)
//! ds02/dt = -(g21 + i Omega_D*) s01 - (g22 + i Delta) s02 + i I20 Phi exp(-i d2 t)
//! ```
//!
//! with populations frozen at the ground state and the `s12`, `s21` probe
//! couplings set to zero. The equations are the same ones the closed forms
//! solve; this module solves them by a different route (explicit time
//! stepping from rest, then lock-in projection of the settled signal), so it
//! checks the algebra and the transcription rather than the physics.
//!
//! The two probe components are run separately. The system is linear, so the
//! sum of the two runs is the response to both, minus cross terms oscillating
//! at `omega_0` that the rotating-wave susceptibility drops anyway.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::response::{resonance_roots, ResponseContext, Window};

const I: C64 = C64::new(0.0, 1.0);

/// Probe drive and integration controls, internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Coupling amplitude `Phi` of the `exp(-i omega_p t)` probe component.
    pub amplitude: f64,
    pub omega_p: f64,
    pub duration: f64,
    /// Leading fraction of the run discarded as transient.
    pub settle_fraction: f64,
    /// RK4 steps per period of the fastest frequency in the problem.
    pub steps_per_cycle: usize,
}

impl ProbeConfig {
    /// Weak probe at `1e-3 min(g11, g22)`, run long enough for the slowest
    /// pole to decay by `exp(-10)` before the settle point.
    pub fn for_context(ctx: &ResponseContext, omega_p: f64) -> Self {
        let g_min = ctx.rates.g11.min(ctx.rates.g22);
        let (dp, dm) = resonance_roots(&ctx.rates, &ctx.drive);
        let slowest = dp.im.abs().min(dm.im.abs()).min(g_min);
        Self {
            amplitude: 1e-3 * g_min,
            omega_p,
            duration: (10.0 / g_min).max(20.0 / slowest),
            settle_fraction: 0.5,
            steps_per_cycle: 128,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("probe amplitude must be non-negative"));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(invalid("integration time must be positive"));
        }
        if !(0.0..1.0).contains(&self.settle_fraction) {
            return Err(invalid("settle fraction must lie in [0, 1)"));
        }
        if self.steps_per_cycle < 40 {
            return Err(invalid("need at least 40 steps per oscillation period"));
        }
        Ok(())
    }
}

/// Coherences driven by one probe component, sampled after the settle point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceTrajectory {
    pub channel: Window,
    /// Probe detuning in the driven channel (`d1` or `d2`).
    pub detuning: f64,
    pub times: Vec<f64>,
    pub s01: Vec<C64>,
    pub s02: Vec<C64>,
    /// Largest `|s01|`, `|s02|` seen over the whole run.
    pub peak: f64,
}

/// Integrates the coherences with only the `channel` probe component on,
/// starting from `s01 = s02 = 0`.
pub fn integrate_coherences(ctx: &ResponseContext, probe: &ProbeConfig, channel: Window) -> Result<CoherenceTrajectory> {
    integrate_from(ctx, probe, channel, [C64::from(0.0); 2])
}

/// As [`integrate_coherences`] from an arbitrary initial `(s01, s02)`.
pub fn integrate_from(
    ctx: &ResponseContext,
    probe: &ProbeConfig,
    channel: Window,
    initial: [C64; 2],
) -> Result<CoherenceTrajectory> {
    probe.validate()?;
    let (dp, dm) = resonance_roots(&ctx.rates, &ctx.drive);
    if dp.im >= 0.0 || dm.im >= 0.0 {
        return Err(Error::NumericalFailure(format!(
            "coherence equations are not damped (poles {dp}, {dm})"
        )));
    }
    let r = ctx.rates;
    let od = C64::from(ctx.drive.coupling());
    let delta = ctx.drive.detuning;
    let (detuning, force) = match channel {
        Window::W01 => (probe.omega_p - ctx.omega1, [I * ctx.i01_abs * probe.amplitude, C64::from(0.0)]),
        Window::W02 => (probe.omega_p - ctx.omega_prime, [C64::from(0.0), I * ctx.i02_abs * probe.amplitude]),
    };
    let a = [
        [C64::from(-r.g11), -(r.g12 + I * od)],
        [-(r.g21 + I * od.conj()), -(r.g22 + I * delta)],
    ];
    let rhs = |t: f64, s: [C64; 2]| -> [C64; 2] {
        let ph = C64::from_polar(1.0, -detuning * t);
        [
            a[0][0] * s[0] + a[0][1] * s[1] + force[0] * ph,
            a[1][0] * s[0] + a[1][1] * s[1] + force[1] * ph,
        ]
    };

    let fastest = [detuning.abs(), dp.norm(), dm.norm(), r.g11 + r.g22].into_iter().fold(0.0, f64::max);
    let n_steps = ((probe.duration * fastest * probe.steps_per_cycle as f64 / TAU).ceil() as usize).max(1000);
    let h = probe.duration / n_steps as f64;
    let settle_step = (probe.settle_fraction * n_steps as f64) as usize;
    // keep ~16 samples per period of the fastest frequency for the projection
    let stride = (probe.steps_per_cycle / 16).max(1);

    let mut s = initial;
    let mut peak = 0.0_f64;
    let cap = (n_steps - settle_step) / stride + 2;
    let (mut times, mut s01, mut s02) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    for k in 0..=n_steps {
        let t = k as f64 * h;
        if k >= settle_step && (k - settle_step) % stride == 0 {
            times.push(t);
            s01.push(s[0]);
            s02.push(s[1]);
        }
        peak = peak.max(s[0].norm()).max(s[1].norm());
        if k == n_steps {
            break;
        }
        let k1 = rhs(t, s);
        let k2 = rhs(t + h / 2.0, [s[0] + k1[0] * (h / 2.0), s[1] + k1[1] * (h / 2.0)]);
        let k3 = rhs(t + h / 2.0, [s[0] + k2[0] * (h / 2.0), s[1] + k2[1] * (h / 2.0)]);
        let k4 = rhs(t + h, [s[0] + k3[0] * h, s[1] + k3[1] * h]);
        for i in 0..2 {
            s[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    if !s[0].is_finite() || !s[1].is_finite() {
        return Err(Error::NumericalFailure("coherence integration diverged".into()));
    }
    let traj = CoherenceTrajectory { channel, detuning, times, s01, s02, peak };

    // steady oscillation: both halves of the settled window give the same amplitude
    let n = traj.times.len();
    if n < 8 {
        return Err(Error::OracleTimeout("too few samples after the settle point".into()));
    }
    let first = project(&traj.times[..n / 2], &traj.s01[..n / 2], &traj.s02[..n / 2], detuning);
    let second = project(&traj.times[n / 2..], &traj.s01[n / 2..], &traj.s02[n / 2..], detuning);
    let size = second[0].norm().max(second[1].norm()).max(1e-3 * traj.peak).max(f64::MIN_POSITIVE);
    let drift = (first[0] - second[0]).norm().max((first[1] - second[1]).norm()) / size;
    if drift > 1e-3 {
        return Err(Error::OracleTimeout(format!(
            "no steady oscillation within duration {:e} (half-window drift {drift:e})",
            probe.duration
        )));
    }
    Ok(traj)
}

/// Trapezoidal average of `s(t) exp(i d t)` for both coherences.
fn project(times: &[f64], s01: &[C64], s02: &[C64], detuning: f64) -> [C64; 2] {
    let n = times.len();
    let mut acc = [C64::from(0.0); 2];
    for k in 1..n {
        let w = 0.5 * (times[k] - times[k - 1]);
        let (p0, p1) = (C64::from_polar(1.0, detuning * times[k - 1]), C64::from_polar(1.0, detuning * times[k]));
        acc[0] += (s01[k - 1] * p0 + s01[k] * p1) * w;
        acc[1] += (s02[k - 1] * p0 + s02[k] * p1) * w;
    }
    let span = times[n - 1] - times[0];
    [acc[0] / span, acc[1] / span]
}

/// Susceptibility of one probe channel read off a settled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    pub channel: Window,
    /// Complex amplitudes of `s01`, `s02` at the probe frequency.
    pub amplitudes: [C64; 2],
    /// Induced current at the probe frequency per unit probe amplitude.
    pub chi: C64,
    /// RMS deviation from a pure tone, relative to the tone.
    pub residual: f64,
}

/// Projects the settled coherences onto the probe tone and forms
/// `(I01 s01 + I02 s02) / Phi`. Only the probed channel's coherence enters
/// the matching window; the other coherence is reported but belongs to the
/// dropped cross terms.
pub fn extract_susceptibility(
    traj: &CoherenceTrajectory,
    probe: &ProbeConfig,
    ctx: &ResponseContext,
) -> Result<ChannelEstimate> {
    let n = traj.times.len();
    if n < 2 {
        return Err(Error::OracleExtraction("empty trajectory".into()));
    }
    if probe.amplitude == 0.0 {
        return Err(Error::OracleExtraction("probe amplitude is zero".into()));
    }
    let amps = project(&traj.times, &traj.s01, &traj.s02, traj.detuning);
    let (k, weight) = match traj.channel {
        Window::W01 => (0, ctx.i01_abs),
        Window::W02 => (1, ctx.i02_abs),
    };
    let series = if k == 0 { &traj.s01 } else { &traj.s02 };
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, z) in traj.times.iter().zip(series) {
        let tone = amps[k] * C64::from_polar(1.0, -traj.detuning * t);
        num += (z - tone).norm_sqr();
        den += tone.norm_sqr();
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
    if residual > 1e-2 {
        return Err(Error::OracleExtraction(format!(
            "projection residual {residual:e} exceeds 1% of the signal"
        )));
    }
    Ok(ChannelEstimate { channel: traj.channel, amplitudes: amps, chi: weight * amps[k] / probe.amplitude, residual })
}

/// Oracle estimate of `chi_q` at one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub omega_p: f64,
    pub chi01: C64,
    pub chi02: C64,
    pub chi_q: C64,
}

/// Channels whose current element is below this fraction of the larger one
/// are treated as closed and not integrated.
const CLOSED_CHANNEL: f64 = 1e-10;

/// Runs both probe channels; a closed channel (such as `02` at the optimal
/// point) contributes zero.
pub fn oracle_chi(ctx: &ResponseContext, probe: &ProbeConfig) -> Result<OracleEstimate> {
    let cut = CLOSED_CHANNEL * ctx.i01_abs.max(ctx.i02_abs);
    let c01 = if ctx.i01_abs > cut {
        let t = integrate_coherences(ctx, probe, Window::W01)?;
        extract_susceptibility(&t, probe, ctx)?.chi
    } else {
        C64::from(0.0)
    };
    let c02 = if ctx.i02_abs > cut {
        let t = integrate_coherences(ctx, probe, Window::W02)?;
        extract_susceptibility(&t, probe, ctx)?.chi
    } else {
        C64::from(0.0)
    };
    Ok(OracleEstimate { omega_p: probe.omega_p, chi01: c01, chi02: c02, chi_q: c01 + c02 })
}
