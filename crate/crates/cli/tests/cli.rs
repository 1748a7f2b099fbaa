use std::process::Command as Proc;

use flux_eit_cli::commands::{compute, Command};
use flux_eit_cli::config::{Axis, Grid, WindowSel};
use flux_eit_cli::lab::Lab;
use flux_eit_cli::recipes::{rerender, Figure};
use flux_eit_cli::table::read_metadata;
use flux_eit_cli::{parse_config, RunConfig};
use proptest::prelude::*;

const BIN: &str = env!("CARGO_BIN_EXE_flux-eit");

fn grid() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (0.0..10.0f64, 0.1..10.0f64, 1usize..500).prop_map(|(a, w, n)| Grid::linspace(a, a + w, n)),
        prop::collection::vec(0.001..1.0f64, 1..6).prop_map(|steps| {
            let mut x = 0.0;
            Grid::List(steps.into_iter().map(|s| { x += s; x }).collect())
        }),
    ]
}

fn config() -> impl Strategy<Value = RunConfig> {
    (
        (0.51..0.99f64, 10.0..100.0f64, 50.0..300.0f64, 0.4..0.6f64, 4usize..20, 4usize..30),
        (1e-6..1e-2f64, 10.0..200.0f64, 0.0..100.0f64, 0.0..50.0f64, -30.0..30.0f64),
        (prop::option::of(grid()), prop::option::of(grid()), 0usize..3, 0usize..3),
    )
        .prop_map(|((alpha, ejec, ghz, f, np, nm), (beta, cut, t, rabi, det), (g, probe, ax, win))| {
            let mut c = RunConfig::default();
            c.circuit.alpha = alpha;
            c.circuit.ej_over_ec = ejec;
            c.circuit.ej_ghz = ghz;
            c.circuit.f = f;
            c.circuit.n_p = np;
            c.circuit.n_m = nm;
            c.bath.beta = beta;
            c.bath.cutoff_multiplier = cut;
            c.bath.t_mk = t;
            c.drive.rabi_mhz = rabi;
            c.drive.detuning_mhz = det;
            c.sweep.axis = [Axis::Flux, Axis::Temperature, Axis::Rabi][ax];
            // flux grids must stay inside [0.4, 0.6]
            c.sweep.grid = if c.sweep.axis == Axis::Flux { None } else { g };
            c.sweep.probe_mhz = probe;
            c.sweep.window = [WindowSel::W01, WindowSel::W02, WindowSel::Both][win];
            c
        })
}

proptest! {
    #[test]
    fn config_text_round_trip(c in config()) {
        prop_assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }
}

#[test]
fn figure_panels_rebuild_from_their_own_files() {
    let lab = Lab::new();
    for fig in [Figure::Fig5, Figure::Fig7] {
        for t in fig.recipe().render(&lab).unwrap() {
            let bytes = t.to_bytes();
            let text = String::from_utf8(bytes.clone()).unwrap();
            // through a fresh lab, so nothing cached is reused
            let again = rerender(&text, &Lab::new()).unwrap();
            assert_eq!(again.to_bytes(), bytes, "{}", t.name);
        }
    }
}

#[test]
fn recipe_configs_survive_the_text_format() {
    // every curve written as a config file, read back and rerun gives the same panel
    let lab = Lab::new();
    let mut recipe = Figure::Fig6.recipe();
    let before: Vec<Vec<u8>> = recipe.render(&lab).unwrap().iter().map(|t| t.to_bytes()).collect();
    for p in &mut recipe.panels {
        for c in &mut p.curves {
            c.config = parse_config(&c.config.to_text()).unwrap();
        }
    }
    let after: Vec<Vec<u8>> = recipe.render(&Lab::new()).unwrap().iter().map(|t| t.to_bytes()).collect();
    assert_eq!(before, after);
}

#[test]
fn metadata_carries_the_config() {
    let mut c = RunConfig::default();
    c.circuit.f = 0.525;
    c.drive.rabi_mhz = 1.4;
    let out = compute(Command::Susceptibility, &c, &Lab::new()).unwrap();
    let text = String::from_utf8(out.tables[0].to_bytes()).unwrap();
    let meta = read_metadata(&text).unwrap();
    let back: RunConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    assert_eq!(back, c);
    assert_eq!(meta["kb_over_h_GHz_per_K"], 20.836619);
    assert_eq!(meta["units"]["omega_p_GHz"], "GHz");
}

#[test]
fn classify_at_the_optimal_point() {
    let out = compute(Command::Classify, &RunConfig::default(), &Lab::new()).unwrap();
    let t = out.table("classify").unwrap();
    let text = String::from_utf8(t.to_bytes()).unwrap();
    let row01 = text.lines().find(|l| l.starts_with("01,")).unwrap();
    assert!(row01.starts_with("01,NEITHER,"), "{row01}");
    let report: serde_json::Value = serde_json::from_str(&out.files[0].1).unwrap();
    assert_eq!(report["reports"][0]["label"], "NEITHER");
}

#[test]
fn rate_sweep_rows_follow_the_axis() {
    let mut c = RunConfig::default();
    c.sweep.axis = Axis::Temperature;
    c.sweep.grid = Some(Grid::List(vec![0.0, 50.0, 100.0]));
    let out = compute(Command::Rates, &c, &Lab::new()).unwrap();
    let t = &out.tables[0];
    assert_eq!(t.column("T_mK").unwrap(), vec![0.0, 50.0, 100.0]);
    let g11 = t.column("g11_MHz").unwrap();
    assert!(g11[0] < g11[1] && g11[1] < g11[2], "{g11:?}");
}

#[test]
fn sweeps_are_deterministic_across_thread_counts() {
    let mut c = RunConfig::default();
    c.sweep.flux = Grid::linspace(0.48, 0.52, 5);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| compute(Command::Currents, &c, &Lab::new()).unwrap().tables[0].to_bytes())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn bad_config_reports_key_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[bath]\nbeta = 1e-4\nT_mK = -1\n").unwrap();
    let out = Proc::new(BIN).args(["classify", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    let v: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!((v["error"].as_str(), v["key"].as_str(), v["line"].as_u64()), (Some("config"), Some("bath.T_mK"), Some(3)));
}

#[test]
fn unknown_subcommand_is_a_json_usage_error() {
    let out = Proc::new(BIN).arg("plot").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(v["error"], "usage");
}

#[test]
fn binary_writes_the_classify_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "circuit.f = 0.525\ndrive.rabi_MHz = 40, drive.detuning_MHz = 0\n").unwrap();
    let out = Proc::new(BIN).args(["--jobs", "2", "classify", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("classify.json")).unwrap()).unwrap();
    let labels: Vec<&str> = report["reports"].as_array().unwrap().iter().map(|r| r["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["ATS", "ATS"]);
}
