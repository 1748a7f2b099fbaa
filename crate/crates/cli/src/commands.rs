//! The CLI subcommands. Each turns a configuration into tables; `run`
//! writes them.

use std::path::{Path, PathBuf};

use flux_eit::model::FluxPoint;
use flux_eit::oracle::{oracle_chi, ProbeConfig};
use flux_eit::rates::DampingRates;
use flux_eit::regime::{classify, Driving, Extremum};
use flux_eit::response::{ResponseContext, Window};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Axis, RunConfig, WindowSel};
use crate::lab::{drive, Lab};
use crate::recipes::Figure;
use crate::table::{Cell, Table};
use crate::{CliError, Result};

pub const CHI_UNIT: &str = "I0^2 hbar/E_J";

/// Relative error allowed between the time-domain and the analytic
/// susceptibility in `oracle-check`.
pub const ORACLE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Currents,
    Rates,
    Susceptibility,
    Classify,
    OracleCheck,
    Reproduce(Figure),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Spectrum => "spectrum".into(),
            Command::Currents => "currents".into(),
            Command::Rates => "rates".into(),
            Command::Susceptibility => "susceptibility".into(),
            Command::Classify => "classify".into(),
            Command::OracleCheck => "oracle-check".into(),
            Command::Reproduce(fig) => format!("reproduce {}", fig.name()),
        }
    }
}

/// Everything a command produces. `failure` is set when the command ran to
/// completion but its own check failed; the files are still written.
#[derive(Debug, Clone)]
pub struct Output {
    pub tables: Vec<Table>,
    /// Non-CSV files: name and contents.
    pub files: Vec<(String, String)>,
    pub failure: Option<String>,
}

impl Output {
    fn tables(tables: Vec<Table>) -> Self {
        Self { tables, files: Vec::new(), failure: None }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

pub fn compute(cmd: Command, cfg: &RunConfig, lab: &Lab) -> Result<Output> {
    match cmd {
        Command::Spectrum => Ok(Output::tables(vec![spectrum(cfg, lab)?])),
        Command::Currents => Ok(Output::tables(vec![currents(cfg, lab)?])),
        Command::Rates => Ok(Output::tables(vec![rates(cfg, lab)?])),
        Command::Susceptibility => Ok(Output::tables(vec![susceptibility(cfg, lab)?])),
        Command::Classify => classify_cmd(cfg, lab),
        Command::OracleCheck => oracle_check(cfg, lab),
        Command::Reproduce(fig) => Ok(Output::tables(fig.recipe().render(lab)?)),
    }
}

/// Computes and writes; returns the written paths.
pub fn run(cmd: Command, cfg: &RunConfig, lab: &Lab, out: &Path) -> Result<Vec<PathBuf>> {
    let o = compute(cmd, cfg, lab)?;
    let mut paths = Vec::new();
    for t in &o.tables {
        paths.push(t.write(out)?);
    }
    for (name, text) in &o.files {
        let p = out.join(name);
        std::fs::write(&p, text).map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?;
        paths.push(p);
    }
    match o.failure {
        Some(m) => Err(CliError::Check(m)),
        None => Ok(paths),
    }
}

fn meta(t: Table, cmd: &str, cfg: &RunConfig) -> Table {
    t.with_meta("command", json!(cmd)).with_meta("config", serde_json::to_value(cfg).expect("config serializes"))
}

fn status(r: &Result<()>) -> Cell {
    match r {
        Ok(()) => "ok".into(),
        Err(e) => e.to_json().into(),
    }
}

fn spectrum(cfg: &RunConfig, lab: &Lab) -> Result<Table> {
    let d = lab.device(&cfg.circuit)?;
    let cols = [
        ("f", "Phi0"),
        ("E0", "E_J"),
        ("E1", "E_J"),
        ("E2", "E_J"),
        ("E3", "E_J"),
        ("E4", "E_J"),
        ("E5", "E_J"),
        ("omega1_GHz", "GHz"),
        ("omega2_GHz", "GHz"),
        ("omega3_GHz", "GHz"),
        ("status", ""),
    ];
    let mut t = meta(Table::new("spectrum", cols), "spectrum", cfg);
    let rows: Vec<_> = cfg.sweep.flux.values().par_iter().map(|&f| (f, lab.level_point(&cfg.circuit, f))).collect();
    for (f, r) in rows {
        let mut row: Vec<Cell> = vec![f.into()];
        match &r {
            Ok(p) => {
                row.extend(p.levels.iter().map(|&e| Cell::Num(e)));
                let e = p.levels;
                row.extend([e[1] - e[0], e[2] - e[0], e[2] - e[1]].map(|w| Cell::Num(d.scale.to_ghz_freq(w))));
            }
            Err(_) => row.extend((0..9).map(|_| Cell::Num(f64::NAN))),
        }
        row.push(status(&r.map(|_| ())));
        t.push(row);
    }
    Ok(t)
}

fn currents(cfg: &RunConfig, lab: &Lab) -> Result<Table> {
    lab.device(&cfg.circuit)?;
    let cols = [("f", "Phi0"), ("I01", "I0"), ("I02", "I0"), ("I12", "I0"), ("I00", "I0"), ("I11", "I0"), ("I22", "I0"), ("status", "")];
    let mut t = meta(Table::new("currents", cols), "currents", cfg);
    let rows: Vec<_> = cfg.sweep.flux.values().par_iter().map(|&f| (f, lab.level_point(&cfg.circuit, f))).collect();
    for (f, r) in rows {
        let mut row: Vec<Cell> = vec![f.into()];
        match &r {
            Ok(p) => {
                let c = p.currents;
                row.extend([c.i01, c.i02, c.i12, c.i00, c.i11, c.i22].map(Cell::Num));
            }
            Err(_) => row.extend((0..6).map(|_| Cell::Num(f64::NAN))),
        }
        row.push(status(&r.map(|_| ())));
        t.push(row);
    }
    Ok(t)
}

/// The configuration with the sweep axis set to `x`.
pub fn at_axis(cfg: &RunConfig, axis: Axis, x: f64) -> RunConfig {
    let mut c = cfg.clone();
    match axis {
        Axis::Flux => c.circuit.f = x,
        Axis::Temperature => c.bath.t_mk = x,
        Axis::Rabi => c.drive.rabi_mhz = x,
    }
    c
}

pub fn axis_column(axis: Axis) -> (&'static str, &'static str) {
    match axis {
        Axis::Flux => ("f", "Phi0"),
        Axis::Temperature => ("T_mK", "mK"),
        Axis::Rabi => ("rabi_MHz", "MHz"),
    }
}

/// Flux point, drive and bath of a configuration's operating point.
pub fn operating_point(cfg: &RunConfig, lab: &Lab) -> Result<(FluxPoint, flux_eit::rates::DriveConfig, flux_eit::bath::BathParams)> {
    let d = lab.device(&cfg.circuit)?;
    let fp = lab.flux_point(&cfg.circuit, cfg.circuit.f)?;
    let bath = d.bath(cfg.bath.beta, cfg.bath.cutoff_multiplier, cfg.bath.t_mk)?;
    Ok((fp, drive(&d, cfg)?, bath))
}

pub fn rates_at(cfg: &RunConfig, lab: &Lab) -> Result<DampingRates> {
    let (fp, dr, bath) = operating_point(cfg, lab)?;
    Ok(fp.rates(&dr, &bath)?)
}

pub fn response_at(cfg: &RunConfig, lab: &Lab) -> Result<ResponseContext> {
    let (fp, dr, bath) = operating_point(cfg, lab)?;
    Ok(fp.response(&dr, &bath)?)
}

/// Rates in MHz (`gamma / 2 pi`), in the order g11, g22, g12, g21.
pub fn rates_mhz(cfg: &RunConfig, lab: &Lab) -> Result<[f64; 4]> {
    let s = lab.device(&cfg.circuit)?.scale;
    let g = rates_at(cfg, lab)?;
    Ok([g.g11, g.g22, g.g12, g.g21].map(|x| s.to_mhz_freq(x)))
}

fn rates(cfg: &RunConfig, lab: &Lab) -> Result<Table> {
    lab.device(&cfg.circuit)?;
    let axis = cfg.sweep.axis;
    let grid = cfg.sweep.grid.clone().unwrap_or_else(|| axis.default_grid()).values();
    let (xc, xu) = axis_column(axis);
    let cols = [(xc, xu), ("g11_MHz", "MHz"), ("g22_MHz", "MHz"), ("g12_MHz", "MHz"), ("g21_MHz", "MHz"), ("status", "")];
    let mut t = meta(Table::new("rates", cols), "rates", cfg).with_meta("rate_convention", json!("gamma/2pi"));
    let rows: Vec<_> = grid.par_iter().map(|&x| (x, rates_mhz(&at_axis(cfg, axis, x), lab))).collect();
    for (x, r) in rows {
        let mut row: Vec<Cell> = vec![x.into()];
        match &r {
            Ok(g) => row.extend(g.map(Cell::Num)),
            Err(_) => row.extend((0..4).map(|_| Cell::Num(f64::NAN))),
        }
        row.push(status(&r.map(|_| ())));
        t.push(row);
    }
    Ok(t)
}

pub fn windows(sel: WindowSel) -> Vec<Window> {
    match sel {
        WindowSel::W01 => vec![Window::W01],
        WindowSel::W02 => vec![Window::W02],
        WindowSel::Both => vec![Window::W01, Window::W02],
    }
}

/// Default probe offsets (MHz from the window center): five times the
/// larger resonance distance on each side, plus the detuning.
pub fn auto_probe_mhz(ctx: &ResponseContext, to_mhz: impl Fn(f64) -> f64) -> Vec<f64> {
    let (dp, dm) = flux_eit::response::resonance_roots(&ctx.rates, &ctx.drive);
    let half = 5.0 * to_mhz(dp.norm().max(dm.norm())) + to_mhz(ctx.drive.detuning.abs());
    crate::config::Grid::linspace(-half, half, 801).values()
}

fn cplx(z: C64) -> [Cell; 2] {
    [Cell::Num(z.re), Cell::Num(z.im)]
}

fn susceptibility(cfg: &RunConfig, lab: &Lab) -> Result<Table> {
    let s = lab.device(&cfg.circuit)?.scale;
    let ctx = response_at(cfg, lab)?;
    let offsets = match &cfg.sweep.probe_mhz {
        Some(g) => g.values(),
        None => auto_probe_mhz(&ctx, |w| s.to_mhz_freq(w)),
    };
    let mut cols: Vec<(String, &str)> = vec![("window".into(), ""), ("omega_p_GHz".into(), "GHz"), ("offset_MHz".into(), "MHz")];
    for c in ["chi01", "chi02", "chi_q", "r_plus", "r_minus"] {
        cols.push((format!("re_{c}"), CHI_UNIT));
        cols.push((format!("im_{c}"), CHI_UNIT));
    }
    let mut t = meta(Table::new("susceptibility", cols), "susceptibility", cfg);
    for w in windows(cfg.sweep.window) {
        let pair = ctx.decompose(w)?;
        let center = ctx.window_center(w);
        for &off in &offsets {
            let wp = center + s.from_mhz_freq(off);
            let p = ctx.chi_q(wp);
            let delta = match w {
                Window::W01 => p.delta1,
                Window::W02 => p.delta2,
            };
            let mut row: Vec<Cell> = vec![w.label().into(), s.to_ghz_freq(wp).into(), off.into()];
            for z in [p.chi01, p.chi02, p.chi_q, pair.r_plus(delta), pair.r_minus(delta)] {
                row.extend(cplx(z));
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn driving(d: Driving) -> &'static str {
    match d {
        Driving::Weak => "weak",
        Driving::Strong => "strong",
    }
}

fn extremum(e: Extremum) -> &'static str {
    match e {
        Extremum::Maximum => "maximum",
        Extremum::Minimum => "minimum",
    }
}

fn classify_cmd(cfg: &RunConfig, lab: &Lab) -> Result<Output> {
    let s = lab.device(&cfg.circuit)?.scale;
    let (fp, dr, bath) = operating_point(cfg, lab)?;
    let g = fp.rates(&dr, &bath)?;
    let mhz = |x: f64| s.to_mhz_freq(x);
    let cols = [
        ("window", ""),
        ("label", ""),
        ("driving", ""),
        ("extremum", ""),
        ("rabi_MHz", "MHz"),
        ("omega_w_MHz", "MHz"),
        ("omega_m_MHz", "MHz"),
        ("approximate", ""),
    ];
    let mut t = meta(Table::new("classify", cols), "classify", cfg);
    let mut reports = Vec::new();
    for w in windows(cfg.sweep.window) {
        let r = classify(w, &g, &dr)?;
        t.push(vec![
            w.label().into(),
            r.label.as_str().into(),
            driving(r.driving).into(),
            extremum(r.extremum).into(),
            cfg.drive.rabi_mhz.into(),
            mhz(r.omega_w).into(),
            mhz(r.omega_m).into(),
            r.approximate.to_string().into(),
        ]);
        reports.push(json!({
            "window": w.label(),
            "label": r.label.as_str(),
            "driving": driving(r.driving),
            "extremum": extremum(r.extremum),
            "omega_w_MHz": mhz(r.omega_w),
            "omega_m_MHz": mhz(r.omega_m),
            "approximate": r.approximate,
        }));
    }
    let warnings: Vec<String> = fp.warnings(&dr, &bath).iter().map(|w| format!("{w:?}")).collect();
    let report = json!({
        "f": cfg.circuit.f,
        "T_mK": cfg.bath.t_mk,
        "rabi_MHz": cfg.drive.rabi_mhz,
        "detuning_MHz": cfg.drive.detuning_mhz,
        "rates_MHz": {"g11": mhz(g.g11), "g22": mhz(g.g22), "g12": mhz(g.g12), "g21": mhz(g.g21)},
        "reports": reports,
        "warnings": warnings,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    Ok(Output { tables: vec![t], files: vec![("classify.json".into(), text)], failure: None })
}

/// One point of the oracle suite.
#[derive(Debug, Clone)]
pub struct OraclePoint {
    pub set: String,
    pub config: RunConfig,
    pub window: Window,
    /// Probe offset from the window center, MHz.
    pub offset_mhz: f64,
}

/// The parameter sets of the susceptibility figures:
/// `(f, rabi MHz, [(T mK, detuning MHz)])`.
pub const FIGURE_SETS: [(f64, f64, [(f64, f64); 3]); 4] = [
    (0.5, 0.37, [(25.0, 0.0), (25.0, 0.37), (50.0, 0.0)]),
    (0.5, 40.0, [(25.0, 0.0), (25.0, 20.0), (50.0, 0.0)]),
    (0.525, 1.4, [(25.0, 0.0), (25.0, 1.4), (50.0, 0.0)]),
    (0.525, 40.0, [(25.0, 0.0), (25.0, 20.0), (50.0, 0.0)]),
];

/// Thirty points over the twelve figure parameter sets: the window-01
/// center and one resonance of every set, plus the window-02 center of the
/// six sets away from the optimal point (where window 02 is closed).
pub fn oracle_suite(base: &RunConfig, lab: &Lab) -> Result<Vec<OraclePoint>> {
    let mut out = Vec::new();
    for (f, rabi, cases) in FIGURE_SETS {
        for (t_mk, det) in cases {
            let mut c = base.clone();
            c.circuit.f = f;
            c.bath.t_mk = t_mk;
            c.drive.rabi_mhz = rabi;
            c.drive.detuning_mhz = det;
            let set = format!("f={f} rabi={rabi}MHz T={t_mk}mK detuning={det}MHz");
            let s = lab.device(&c.circuit)?.scale;
            let ctx = response_at(&c, lab)?;
            let (dp, _) = flux_eit::response::resonance_roots(&ctx.rates, &ctx.drive);
            // weak driving puts both poles on the center line; step off by a half-width instead
            let off = if dp.re.abs() > 0.1 * dp.im.abs() { dp.re } else { dp.im.abs() };
            let mut push = |window, offset_mhz| out.push(OraclePoint { set: set.clone(), config: c.clone(), window, offset_mhz });
            push(Window::W01, 0.0);
            push(Window::W01, s.to_mhz_freq(off));
            if f != 0.5 {
                push(Window::W02, 0.0);
            }
        }
    }
    Ok(out)
}

/// Analytic and time-domain `chi_q` at one suite point.
pub fn oracle_compare(p: &OraclePoint, lab: &Lab) -> Result<(f64, C64, C64)> {
    let s = lab.device(&p.config.circuit)?.scale;
    let ctx = response_at(&p.config, lab)?;
    let wp = ctx.window_center(p.window) + s.from_mhz_freq(p.offset_mhz);
    let analytic = ctx.chi_q(wp).chi_q;
    let oracle = oracle_chi(&ctx, &ProbeConfig::for_context(&ctx, wp))?.chi_q;
    Ok((wp, analytic, oracle))
}

fn oracle_check(cfg: &RunConfig, lab: &Lab) -> Result<Output> {
    let s = lab.device(&cfg.circuit)?.scale;
    let suite = oracle_suite(cfg, lab)?;
    let results: Vec<_> = suite.par_iter().map(|p| oracle_compare(p, lab)).collect();
    let cols = [
        ("set", ""),
        ("window", ""),
        ("offset_MHz", "MHz"),
        ("omega_p_GHz", "GHz"),
        ("re_chi_analytic", CHI_UNIT),
        ("im_chi_analytic", CHI_UNIT),
        ("re_chi_oracle", CHI_UNIT),
        ("im_chi_oracle", CHI_UNIT),
        ("rel_error", "1"),
    ];
    let mut t = meta(Table::new("oracle_check", cols), "oracle-check", cfg).with_meta("tolerance", json!(ORACLE_TOL));
    let mut worst = 0.0_f64;
    for (p, r) in suite.iter().zip(results) {
        let (wp, a, o) = r?;
        let rel = (o - a).norm() / a.norm();
        worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
        let mut row: Vec<Cell> = vec![p.set.clone().into(), p.window.label().into(), p.offset_mhz.into(), s.to_ghz_freq(wp).into()];
        row.extend(cplx(a));
        row.extend(cplx(o));
        row.push(rel.into());
        t.push(row);
    }
    let failure = (worst >= ORACLE_TOL).then(|| format!("largest relative error {worst:e} exceeds {ORACLE_TOL:e}"));
    let summary: Value = json!({"points": suite.len(), "max_rel_error": worst});
    Ok(Output { tables: vec![t.with_meta("summary", summary)], files: Vec::new(), failure })
}
