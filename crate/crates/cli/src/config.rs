//! Run configuration: a flat key-value text format with optional
//! `[section]` headers.
//!
//! ```text
//! # comment
//! circuit.alpha = 0.7
//! [bath]
//! T_mK = 25
//! drive.rabi_MHz = 40, drive.detuning_MHz = 20
//! sweep.flux = 0.45:0.55:201      # start:stop:count
//! sweep.grid = 0, 10, 25, 50      # explicit list
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub alpha: f64,
    pub ej_over_ec: f64,
    /// `E_J / h` in GHz.
    pub ej_ghz: f64,
    /// Operating flux for point commands.
    pub f: f64,
    pub n_p: usize,
    pub n_m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bath {
    pub beta: f64,
    /// `omega_c / omega_s`.
    pub cutoff_multiplier: f64,
    pub t_mk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    /// `|Omega_D| / 2 pi` in MHz.
    pub rabi_mhz: f64,
    /// `Delta / 2 pi` in MHz.
    pub detuning_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    Linspace { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, count: usize) -> Self {
        Grid::Linspace { start, stop, count }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Linspace { start, stop, count } => {
                if *count == 1 {
                    return vec![*start];
                }
                let step = (stop - start) / (*count - 1) as f64;
                (0..*count).map(|i| if i + 1 == *count { *stop } else { start + step * i as f64 }).collect()
            }
            Grid::List(v) => v.clone(),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Linspace { start, stop, count } => write!(f, "{start:?}:{stop:?}:{count}"),
            Grid::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                write!(f, "{}", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Flux,
    Temperature,
    Rabi,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Flux => "flux",
            Axis::Temperature => "temperature",
            Axis::Rabi => "rabi",
        }
    }

    /// Default grid: flux over `[0.45, 0.55]`, temperature in mK, Rabi in MHz.
    pub fn default_grid(&self) -> Grid {
        match self {
            Axis::Flux => Grid::linspace(0.45, 0.55, 101),
            Axis::Temperature => Grid::linspace(0.0, 100.0, 11),
            Axis::Rabi => Grid::linspace(0.0, 50.0, 51),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowSel {
    W01,
    W02,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    /// Flux grid of `spectrum` and `currents`.
    pub flux: Grid,
    /// Axis of the `rates` sweep.
    pub axis: Axis,
    /// Grid of the `rates` axis; the axis default when absent.
    pub grid: Option<Grid>,
    /// Probe offsets from the window center in MHz; chosen from the
    /// resonance positions when absent.
    pub probe_mhz: Option<Grid>,
    pub window: WindowSel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub dir: String,
    pub format: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub circuit: Circuit,
    pub bath: Bath,
    pub drive: Drive,
    pub sweep: Sweep,
    pub output: Output,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            circuit: Circuit { alpha: 0.7, ej_over_ec: 48.0, ej_ghz: 144.0, f: 0.5, n_p: 12, n_m: 20 },
            bath: Bath { beta: 1e-4, cutoff_multiplier: 100.0, t_mk: 25.0 },
            drive: Drive { rabi_mhz: 0.37, detuning_mhz: 0.0 },
            sweep: Sweep {
                flux: Grid::linspace(0.45, 0.55, 201),
                axis: Axis::Flux,
                grid: None,
                probe_mhz: None,
                window: WindowSel::Both,
            },
            output: Output { dir: ".".into(), format: "csv".into() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based; 0 for whole-document checks.
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { line, key: key.to_string(), message: message.into() }
}

fn number(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(err(line, key, format!("not a finite number: '{}'", v.trim()))),
    }
}

fn count(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim().parse::<usize>().map_err(|_| err(line, key, format!("not a non-negative integer: '{}'", v.trim())))
}

fn grid(line: usize, key: &str, v: &str) -> Result<Grid, ConfigError> {
    let v = v.trim();
    let g = if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err(err(line, key, "range must be start:stop:count"));
        }
        let g = Grid::Linspace { start: number(line, key, parts[0])?, stop: number(line, key, parts[1])?, count: count(line, key, parts[2])? };
        if let Grid::Linspace { count: 0, .. } = g {
            return Err(err(line, key, "range needs at least one point"));
        }
        g
    } else {
        Grid::List(v.split(',').map(|p| number(line, key, p)).collect::<Result<_, _>>()?)
    };
    let vals = g.values();
    if vals.is_empty() {
        return Err(err(line, key, "grid is empty"));
    }
    if vals.windows(2).any(|w| w[1] <= w[0]) {
        return Err(err(line, key, "grid must be strictly increasing"));
    }
    Ok(g)
}

/// Splits a line into `key = value` assignments. Commas separate
/// assignments only when the next piece contains its own `=`, so list
/// values keep their commas.
fn assignments(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in text.split(',') {
        match out.last_mut() {
            Some(last) if !piece.contains('=') => {
                last.push(',');
                last.push_str(piece);
            }
            _ => out.push(piece.to_string()),
        }
    }
    out
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| err(line, body, "unterminated section header"))?.trim();
            if !["circuit", "bath", "drive", "sweep", "output"].contains(&name) {
                return Err(err(line, name, "unknown section"));
            }
            section = name.to_string();
            continue;
        }
        for assignment in assignments(body) {
            let (k, v) = assignment.split_once('=').ok_or_else(|| err(line, assignment.trim(), "expected key = value"))?;
            let k = k.trim();
            let key = if k.contains('.') || section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            set(&mut cfg, line, &key, v.trim())?;
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn set(cfg: &mut RunConfig, line: usize, key: &str, v: &str) -> Result<(), ConfigError> {
    let num = || number(line, key, v);
    match key {
        "circuit.alpha" => cfg.circuit.alpha = num()?,
        "circuit.ej_over_ec" => cfg.circuit.ej_over_ec = num()?,
        "circuit.ej_GHz" => cfg.circuit.ej_ghz = num()?,
        "circuit.f" => cfg.circuit.f = num()?,
        "circuit.n_p" => cfg.circuit.n_p = count(line, key, v)?,
        "circuit.n_m" => cfg.circuit.n_m = count(line, key, v)?,
        "bath.beta" => cfg.bath.beta = num()?,
        "bath.cutoff_multiplier" => cfg.bath.cutoff_multiplier = num()?,
        "bath.T_mK" => cfg.bath.t_mk = num()?,
        "drive.rabi_MHz" => cfg.drive.rabi_mhz = num()?,
        "drive.detuning_MHz" => cfg.drive.detuning_mhz = num()?,
        "sweep.flux" => cfg.sweep.flux = grid(line, key, v)?,
        "sweep.grid" => cfg.sweep.grid = Some(grid(line, key, v)?),
        "sweep.probe_MHz" => cfg.sweep.probe_mhz = Some(grid(line, key, v)?),
        "sweep.axis" => {
            cfg.sweep.axis = match v {
                "flux" => Axis::Flux,
                "temperature" => Axis::Temperature,
                "rabi" => Axis::Rabi,
                _ => return Err(err(line, key, format!("expected flux, temperature or rabi, got '{v}'"))),
            }
        }
        "sweep.window" => {
            cfg.sweep.window = match v {
                "01" => WindowSel::W01,
                "02" => WindowSel::W02,
                "both" => WindowSel::Both,
                _ => return Err(err(line, key, format!("expected 01, 02 or both, got '{v}'"))),
            }
        }
        "output.dir" => cfg.output.dir = v.to_string(),
        "output.format" => {
            if v != "csv" {
                return Err(err(line, key, format!("unsupported format '{v}' (only csv)")));
            }
            cfg.output.format = v.to_string();
        }
        _ => return Err(err(line, key, "unknown key")),
    }
    // field-level invariants are reported on the line that set them
    validate_key(cfg, key).map_err(|m| err(line, key, m))
}

fn validate_key(cfg: &RunConfig, key: &str) -> Result<(), String> {
    let c = &cfg.circuit;
    let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(msg.to_string()) };
    match key {
        "circuit.alpha" => check(c.alpha > 0.5 && c.alpha < 1.0, "must lie in (0.5, 1)"),
        "circuit.ej_over_ec" => check(c.ej_over_ec > 0.0, "must be positive"),
        "circuit.ej_GHz" => check(c.ej_ghz > 0.0, "must be positive"),
        "circuit.f" => check((0.4..=0.6).contains(&c.f), "must lie in [0.4, 0.6]"),
        "circuit.n_p" => check(c.n_p >= 4, "must be at least 4"),
        "circuit.n_m" => check(c.n_m >= 4, "must be at least 4"),
        "bath.beta" => check(cfg.bath.beta > 0.0, "must be positive"),
        "bath.cutoff_multiplier" => check(cfg.bath.cutoff_multiplier > 0.0, "must be positive"),
        "bath.T_mK" => check(cfg.bath.t_mk >= 0.0, "must be non-negative"),
        "drive.rabi_MHz" => check(cfg.drive.rabi_mhz >= 0.0, "must be non-negative"),
        "sweep.flux" => check(cfg.sweep.flux.values().iter().all(|f| (0.4..=0.6).contains(f)), "values must lie in [0.4, 0.6]"),
        _ => Ok(()),
    }
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    if let Some(g) = &cfg.sweep.grid {
        let vals = g.values();
        let ok = match cfg.sweep.axis {
            Axis::Flux => vals.iter().all(|f| (0.4..=0.6).contains(f)),
            Axis::Temperature | Axis::Rabi => vals.iter().all(|x| *x >= 0.0),
        };
        if !ok {
            return Err(err(0, "sweep.grid", format!("values outside the range of the {} axis", cfg.sweep.axis.name())));
        }
    }
    Ok(())
}

impl RunConfig {
    /// Canonical text form; `parse_config(cfg.to_text()) == cfg`.
    pub fn to_text(&self) -> String {
        let c = &self.circuit;
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("circuit.alpha", format!("{:?}", c.alpha));
        line("circuit.ej_over_ec", format!("{:?}", c.ej_over_ec));
        line("circuit.ej_GHz", format!("{:?}", c.ej_ghz));
        line("circuit.f", format!("{:?}", c.f));
        line("circuit.n_p", c.n_p.to_string());
        line("circuit.n_m", c.n_m.to_string());
        line("bath.beta", format!("{:?}", self.bath.beta));
        line("bath.cutoff_multiplier", format!("{:?}", self.bath.cutoff_multiplier));
        line("bath.T_mK", format!("{:?}", self.bath.t_mk));
        line("drive.rabi_MHz", format!("{:?}", self.drive.rabi_mhz));
        line("drive.detuning_MHz", format!("{:?}", self.drive.detuning_mhz));
        line("sweep.flux", self.sweep.flux.to_string());
        line("sweep.axis", self.sweep.axis.name().to_string());
        if let Some(g) = &self.sweep.grid {
            line("sweep.grid", g.to_string());
        }
        if let Some(g) = &self.sweep.probe_mhz {
            line("sweep.probe_MHz", g.to_string());
        }
        let w = match self.sweep.window {
            WindowSel::W01 => "01",
            WindowSel::W02 => "02",
            WindowSel::Both => "both",
        };
        line("sweep.window", w.to_string());
        line("output.dir", self.output.dir.clone());
        line("output.format", self.output.format.clone());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn negative_temperature_names_key_and_line() {
        let e = parse_config("bath.beta = 1e-4\nbath.T_mK = -1\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (2, "bath.T_mK"));
    }

    #[test]
    fn several_assignments_on_one_line() {
        let c = parse_config("drive.rabi_MHz = 40, drive.detuning_MHz = 20").unwrap();
        assert_eq!((c.drive.rabi_mhz, c.drive.detuning_mhz), (40.0, 20.0));
    }

    #[test]
    fn sections_and_lists() {
        let c = parse_config("[sweep]\naxis = temperature\ngrid = 0, 10, 25.5\n[bath]\nT_mK = 50").unwrap();
        assert_eq!(c.sweep.axis, Axis::Temperature);
        assert_eq!(c.sweep.grid.unwrap().values(), vec![0.0, 10.0, 25.5]);
        assert_eq!(c.bath.t_mk, 50.0);
    }

    #[test]
    fn rejects() {
        let cases = [
            ("circuit.beta = 1", "circuit.beta"),
            ("bath.beta = x", "bath.beta"),
            ("sweep.flux = 0.5, 0.45", "sweep.flux"),
            ("sweep.flux = 0.3:0.5:3", "sweep.flux"),
            ("[nowhere]", "nowhere"),
            ("circuit.n_p = -2", "circuit.n_p"),
            ("output.format = json", "output.format"),
            ("sweep.axis = rabi\nsweep.grid = -1, 2", "sweep.grid"),
        ];
        for (text, key) in cases {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.key, key, "{text}");
        }
    }

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::default();
        c.drive.rabi_mhz = 1.4;
        c.bath.t_mk = 0.1 + 0.2;
        c.sweep.axis = Axis::Temperature;
        c.sweep.grid = Some(Grid::List(vec![0.0, 1.0 / 3.0]));
        c.sweep.probe_mhz = Some(Grid::linspace(-7.25, 7.25, 801));
        c.sweep.window = WindowSel::W02;
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn linspace_endpoints_exact() {
        let v = Grid::linspace(0.45, 0.55, 201).values();
        assert_eq!((v[0], v[200], v.len()), (0.45, 0.55, 201));
    }
}
