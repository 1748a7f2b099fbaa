//! Figure recipes. A panel is a kind plus one or more labelled curves, each a
//! complete [`RunConfig`]; the panel is written into its CSV header, so any
//! panel can be rebuilt from its own file with [`rerender`].

use flux_eit::response::Window;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::{at_axis, auto_probe_mhz, axis_column, rates_mhz, response_at, windows, CHI_UNIT};
use crate::config::{Axis, Grid, RunConfig, WindowSel};
use crate::lab::Lab;
use crate::table::{read_metadata, Cell, Table};
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Figure {
    pub const ALL: [Figure; 6] = [Figure::Fig2, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Fig8];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn recipe(&self) -> Recipe {
        let panels = match self {
            Figure::Fig2 => fig2(),
            Figure::Fig4 => fig4(),
            Figure::Fig5 => response_figure("fig5", 0.5, 0.37, 0.37, 15.0, false),
            Figure::Fig6 => response_figure("fig6", 0.5, 40.0, 20.0, 100.0, false),
            Figure::Fig7 => response_figure("fig7", 0.525, 1.4, 1.4, 15.0, true),
            Figure::Fig8 => response_figure("fig8", 0.525, 40.0, 20.0, 100.0, true),
        };
        Recipe { figure: *self, panels }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rate {
    G11,
    G22,
    G12,
    G21,
}

impl Rate {
    fn name(&self) -> &'static str {
        match self {
            Rate::G11 => "g11",
            Rate::G22 => "g22",
            Rate::G12 => "g12",
            Rate::G21 => "g21",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PanelKind {
    /// Six lowest levels over the flux grid.
    Levels,
    /// `|I01|, |I02|, |I12|` over the flux grid.
    CurrentModuli,
    /// `I00, I11, I22` over the flux grid.
    CurrentDiagonals,
    /// Rates (`gamma / 2 pi`, MHz) along the sweep axis, one column per rate and curve.
    Rates(Vec<Rate>),
    /// One part of `chi_q` for every curve, evaluated at probe frequencies
    /// placed around the window centers of the first curve. `decomposed`
    /// adds the two resonance terms; `absolute` labels rows by the probe
    /// frequency instead of its offset from the center.
    Response { part: Part, decomposed: bool, absolute: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub name: String,
    pub kind: PanelKind,
    pub curves: Vec<Curve>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub figure: Figure,
    pub panels: Vec<Panel>,
}

impl Recipe {
    pub fn render(&self, lab: &Lab) -> Result<Vec<Table>> {
        self.panels.iter().map(|p| p.render(lab, &format!("reproduce {}", self.figure.name()))).collect()
    }
}

fn curve(label: &str, config: RunConfig) -> Curve {
    Curve { label: label.to_string(), config }
}

fn suffix(label: &str) -> String {
    if label.is_empty() {
        String::new()
    } else {
        format!("_{label}")
    }
}

impl Panel {
    pub fn render(&self, lab: &Lab, command: &str) -> Result<Table> {
        let first = &self.curves.first().ok_or_else(|| CliError::Check(format!("panel {} has no curves", self.name)))?.config;
        let mut t = match &self.kind {
            PanelKind::Levels | PanelKind::CurrentModuli | PanelKind::CurrentDiagonals => self.flux_panel(first, lab)?,
            PanelKind::Rates(rates) => self.rates_panel(rates, first, lab)?,
            PanelKind::Response { part, decomposed, absolute } => self.response_panel(*part, *decomposed, *absolute, first, lab)?,
        };
        t.meta.insert("command".into(), json!(command));
        t.meta.insert("panel".into(), serde_json::to_value(self).expect("panel serializes"));
        Ok(t)
    }

    fn flux_panel(&self, cfg: &RunConfig, lab: &Lab) -> Result<Table> {
        let (names, unit): (&[&str], &str) = match self.kind {
            PanelKind::Levels => (&["E0", "E1", "E2", "E3", "E4", "E5"], "E_J"),
            PanelKind::CurrentModuli => (&["abs_I01", "abs_I02", "abs_I12"], "I0"),
            _ => (&["I00", "I11", "I22"], "I0"),
        };
        let mut cols = vec![("f", "Phi0")];
        cols.extend(names.iter().map(|n| (*n, unit)));
        let mut t = Table::new(&self.name, cols);
        let points: Vec<_> = cfg.sweep.flux.values().par_iter().map(|&f| lab.level_point(&cfg.circuit, f)).collect();
        for p in points {
            let p = p?;
            let c = p.currents;
            let vals: Vec<f64> = match self.kind {
                PanelKind::Levels => p.levels.to_vec(),
                PanelKind::CurrentModuli => vec![c.i01.abs(), c.i02.abs(), c.i12.abs()],
                _ => vec![c.i00, c.i11, c.i22],
            };
            let mut row: Vec<Cell> = vec![p.f.into()];
            row.extend(vals.into_iter().map(Cell::Num));
            t.push(row);
        }
        Ok(t)
    }

    fn rates_panel(&self, rates: &[Rate], first: &RunConfig, lab: &Lab) -> Result<Table> {
        let axis = first.sweep.axis;
        let grid_of = |c: &RunConfig| c.sweep.grid.clone().unwrap_or_else(|| c.sweep.axis.default_grid()).values();
        let grid = grid_of(first);
        if self.curves.iter().any(|c| c.config.sweep.axis != axis || grid_of(&c.config) != grid) {
            return Err(CliError::Check(format!("curves of panel {} do not share one sweep axis and grid", self.name)));
        }
        let (xc, xu) = axis_column(axis);
        let mut cols = vec![(xc.to_string(), xu)];
        for r in rates {
            for c in &self.curves {
                cols.push((format!("{}{}_MHz", r.name(), suffix(&c.label)), "MHz"));
            }
        }
        let mut t = Table::new(&self.name, cols).with_meta("rate_convention", json!("gamma/2pi"));
        let jobs: Vec<(usize, f64)> = (0..self.curves.len()).flat_map(|k| grid.iter().map(move |&x| (k, x))).collect();
        let values: Vec<[f64; 4]> =
            jobs.par_iter().map(|&(k, x)| rates_mhz(&at_axis(&self.curves[k].config, axis, x), lab)).collect::<Result<_>>()?;
        let n = grid.len();
        for (i, &x) in grid.iter().enumerate() {
            let mut row: Vec<Cell> = vec![x.into()];
            for r in rates {
                for k in 0..self.curves.len() {
                    row.push(values[k * n + i][r.index()].into());
                }
            }
            t.push(row);
        }
        Ok(t)
    }

    fn response_panel(&self, part: Part, decomposed: bool, absolute: bool, first: &RunConfig, lab: &Lab) -> Result<Table> {
        if decomposed && self.curves.len() != 1 {
            return Err(CliError::Check(format!("decomposed panel {} needs exactly one curve", self.name)));
        }
        let s = lab.device(&first.circuit)?.scale;
        let ctxs: Vec<_> = self.curves.iter().map(|c| response_at(&c.config, lab)).collect::<Result<_>>()?;
        let reference = &ctxs[0];
        let offsets = match &first.sweep.probe_mhz {
            Some(g) => g.values(),
            None => auto_probe_mhz(reference, |w| s.to_mhz_freq(w)),
        };
        let p = match part {
            Part::Re => "re",
            Part::Im => "im",
        };
        let mut cols: Vec<(String, &str)> = vec![("window".into(), "")];
        cols.push(if absolute { ("omega_p_GHz".into(), "GHz") } else { ("probe_detuning_MHz".into(), "MHz") });
        for c in &self.curves {
            cols.push((format!("{p}_chi_q{}", suffix(&c.label)), CHI_UNIT));
        }
        if decomposed {
            cols.push((format!("{p}_r_plus"), CHI_UNIT));
            cols.push((format!("{p}_r_minus"), CHI_UNIT));
        }
        let pick = |z: num_complex::Complex64| match part {
            Part::Re => z.re,
            Part::Im => z.im,
        };
        let mut t = Table::new(&self.name, cols);
        for w in windows(first.sweep.window) {
            let center = reference.window_center(w);
            let pair = if decomposed { Some(reference.decompose(w)?) } else { None };
            for &off in &offsets {
                let wp = center + s.from_mhz_freq(off);
                let mut row: Vec<Cell> = vec![w.label().into(), if absolute { s.to_ghz_freq(wp) } else { off }.into()];
                for ctx in &ctxs {
                    row.push(pick(ctx.chi_q(wp).chi_q).into());
                }
                if let Some(pair) = &pair {
                    let delta = match w {
                        Window::W01 => wp - reference.omega1,
                        Window::W02 => wp - reference.omega_prime,
                    };
                    row.push(pick(pair.r_plus(delta)).into());
                    row.push(pick(pair.r_minus(delta)).into());
                }
                t.push(row);
            }
        }
        Ok(t)
    }
}

/// Rebuilds a panel from the metadata line of its CSV.
pub fn rerender(csv_text: &str, lab: &Lab) -> Result<Table> {
    let meta = read_metadata(csv_text).ok_or_else(|| CliError::Check("no metadata line".into()))?;
    let panel: Panel = serde_json::from_value(meta["panel"].clone()).map_err(|e| CliError::Check(format!("bad panel metadata: {e}")))?;
    let command = meta["command"].as_str().unwrap_or_default().to_string();
    panel.render(lab, &command)
}

fn base() -> RunConfig {
    RunConfig::default()
}

fn fig2() -> Vec<Panel> {
    let mut c = base();
    c.sweep.flux = Grid::linspace(0.45, 0.55, 201);
    [("fig2a", PanelKind::Levels), ("fig2b", PanelKind::CurrentModuli), ("fig2c", PanelKind::CurrentDiagonals)]
        .into_iter()
        .map(|(name, kind)| Panel { name: name.into(), kind, curves: vec![curve("", c.clone())] })
        .collect()
}

fn fig4() -> Vec<Panel> {
    let undriven = |axis: Axis, grid: Grid| {
        let mut c = base();
        c.drive.rabi_mhz = 0.0;
        c.drive.detuning_mhz = 0.0;
        c.sweep.axis = axis;
        c.sweep.grid = Some(grid);
        c
    };
    let fluxes = [("f0.5", 0.5), ("f0.51", 0.51), ("f0.525", 0.525)];

    let a = [("T0", 0.0), ("T25", 25.0), ("T50", 50.0)]
        .into_iter()
        .map(|(label, t)| {
            let mut c = undriven(Axis::Flux, Grid::linspace(0.45, 0.55, 101));
            c.bath.t_mk = t;
            curve(label, c)
        })
        .collect();
    let b = fluxes
        .into_iter()
        .map(|(label, f)| {
            let mut c = undriven(Axis::Temperature, Grid::linspace(0.0, 100.0, 101));
            c.circuit.f = f;
            curve(label, c)
        })
        .collect();
    let by_rabi: Vec<Curve> = fluxes
        .into_iter()
        .map(|(label, f)| {
            let mut c = undriven(Axis::Rabi, Grid::linspace(0.0, 50.0, 51));
            c.circuit.f = f;
            c.bath.t_mk = 25.0;
            curve(label, c)
        })
        .collect();

    let mut panels = vec![
        Panel { name: "fig4a".into(), kind: PanelKind::Rates(vec![Rate::G11, Rate::G22]), curves: a },
        Panel { name: "fig4b".into(), kind: PanelKind::Rates(vec![Rate::G11, Rate::G22]), curves: b },
    ];
    for (name, rate) in [("fig4c", Rate::G11), ("fig4d", Rate::G22), ("fig4e", Rate::G12), ("fig4f", Rate::G21)] {
        panels.push(Panel { name: name.into(), kind: PanelKind::Rates(vec![rate]), curves: by_rabi.clone() });
    }
    panels
}

/// Susceptibility figures: panels a, b show the real and imaginary parts
/// with the two resonance terms at `T = 25 mK`, `Delta = 0`; panels c, d
/// compare that curve with a detuned drive and with `T = 50 mK`.
fn response_figure(fig: &str, f: f64, rabi_mhz: f64, detuning_mhz: f64, half_span_mhz: f64, both: bool) -> Vec<Panel> {
    let point = |t_mk: f64, det: f64| {
        let mut c = base();
        c.circuit.f = f;
        c.bath.t_mk = t_mk;
        c.drive.rabi_mhz = rabi_mhz;
        c.drive.detuning_mhz = det;
        c.sweep.probe_mhz = Some(Grid::linspace(-half_span_mhz, half_span_mhz, 801));
        c.sweep.window = if both { WindowSel::Both } else { WindowSel::W01 };
        c
    };
    let reference = curve("", point(25.0, 0.0));
    let compared = vec![curve("i", point(25.0, 0.0)), curve("ii", point(25.0, detuning_mhz)), curve("iii", point(50.0, 0.0))];
    let mut panels = Vec::new();
    for (suffix, part) in [("a", Part::Re), ("b", Part::Im)] {
        panels.push(Panel {
            name: format!("{fig}{suffix}"),
            kind: PanelKind::Response { part, decomposed: true, absolute: both },
            curves: vec![reference.clone()],
        });
    }
    for (suffix, part) in [("c", Part::Re), ("d", Part::Im)] {
        panels.push(Panel {
            name: format!("{fig}{suffix}"),
            kind: PanelKind::Response { part, decomposed: false, absolute: both },
            curves: compared.clone(),
        });
    }
    panels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn every_curve_config_survives_text() {
        for fig in Figure::ALL {
            for p in fig.recipe().panels {
                for c in p.curves {
                    assert_eq!(parse_config(&c.config.to_text()).unwrap(), c.config, "{}", p.name);
                }
            }
        }
    }

    #[test]
    fn panel_counts() {
        let n: Vec<usize> = Figure::ALL.iter().map(|f| f.recipe().panels.len()).collect();
        assert_eq!(n, vec![3, 6, 4, 4, 4, 4]);
    }
}
