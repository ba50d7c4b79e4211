use std::path::Path;
use std::process::{Command, Output};

use wpnoma::cli::config::{EvalMethod, Scale, SweepParam};
use wpnoma::cli::csv::{parse_csv, to_csv_string, HEADER};
use wpnoma::cli::plot::{render_svg, CurveRows};
use wpnoma::cli::sweep::ResultRow;
use wpnoma::cli::{load_preset, run_experiment, PRESET_NAMES};
use wpnoma::Scheme;

const CONFIG: &str = r#"
[params]
p_s_db = 15.0
noise_db = -30.0
delta = 0.8
m = 1
d = 1.0
d1 = 1.0
d2 = 10.0
alpha = 2.0
r1 = 1.5
r2 = 0.5
sigma_e2 = 0.001

[sweep]
param = "p_s_db"
values = [5.0, 15.0]
schemes = ["FPA", "DPA", "OMA"]
users = [1, 2]
methods = ["analytic", "mc"]
trials = 5000
seed = 3
"#;

fn wpnoma(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("exp.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_wpnoma"))
        .arg("run")
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn run_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = wpnoma(dir.path(), CONFIG, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/exp.csv")).unwrap();
    assert!(csv.starts_with(HEADER));
    assert!(!csv.contains('\r'));
    // 2 points x (FPA 4 + DPA 4 + OMA 2 mc)
    let rows = parse_csv(&csv).unwrap();
    assert_eq!(rows.len(), 20);
    let svg = std::fs::read_to_string(dir.path().join("out/exp.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("OMA user 2 mc"));
}

#[test]
fn overrides_and_format_selection() {
    let dir = tempfile::tempdir().unwrap();
    let out = wpnoma(dir.path(), CONFIG, &["--methods", "analytic", "--format", "csv", "--seed", "9"]);
    assert!(out.status.success());
    assert!(!dir.path().join("out/exp.svg").exists());
    let rows = parse_csv(&std::fs::read_to_string(dir.path().join("out/exp.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.method == EvalMethod::Analytic));
    assert!(rows.iter().all(|r| r.scheme != Scheme::Oma));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let read = || std::fs::read(dir.path().join("out/exp.csv")).unwrap();
    assert!(wpnoma(dir.path(), CONFIG, &["--workers", "1"]).status.success());
    let a = read();
    assert!(wpnoma(dir.path(), CONFIG, &["--workers", "3"]).status.success());
    assert_eq!(a, read());
}

#[test]
fn invalid_delta_exits_1_and_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = wpnoma(dir.path(), &CONFIG.replace("delta = 0.8", "delta = 1.5"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta"));
}

#[test]
fn unknown_key_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = wpnoma(dir.path(), &CONFIG.replace("m = 1", "m = 1\nbeamwidth = 2.0"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beamwidth"));
}

#[test]
fn missing_file_exits_1() {
    let out = Command::new(env!("CARGO_BIN_EXE_wpnoma"))
        .args(["run", "--config", "/nonexistent/exp.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nakagami_dpa_rows_are_left_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = wpnoma(dir.path(), &CONFIG.replace("m = 1", "m = 2"), &["--methods", "analytic"]);
    assert!(out.status.success());
    let rows = parse_csv(&std::fs::read_to_string(dir.path().join("out/exp.csv")).unwrap()).unwrap();
    for r in rows {
        assert_eq!(r.outage.is_none(), r.scheme == Scheme::Dpa, "{r:?}");
    }
}

#[test]
fn presets_load() {
    for name in PRESET_NAMES {
        let cfg = load_preset(name).unwrap();
        assert_eq!(cfg.sweep.trials, 100_000, "{name}");
    }
    let fig3 = load_preset("fig3").unwrap();
    assert_eq!(fig3.sweep.param, SweepParam::PsDb);
    assert_eq!(fig3.sweep.grid.len(), 13);
    assert_eq!((fig3.params.r1, fig3.params.r2, fig3.params.sigma_e2), (1.5, 0.5, 0.001));

    let fig5 = load_preset("fig5").unwrap();
    assert_eq!(fig5.params.p_s, 1000.0);
    assert!(fig5.sweep.schemes.contains(&Scheme::FpaIsic));
    assert!(fig5.sweep.curves.len() >= 2);
}

#[test]
fn fig3_rows_cover_grid() {
    let mut cfg = load_preset("fig3").unwrap();
    cfg.sweep.trials = 2000;
    let r = run_experiment(&cfg, None).unwrap();
    assert_eq!(r.len(), 1);
    // 13 points x 2 schemes x 2 users x 2 methods
    assert_eq!(r[0].rows.len(), 13 * 8);
}

fn row(value: f64, outage: Option<f64>, method: EvalMethod) -> ResultRow {
    ResultRow {
        sweep_param: SweepParam::SigmaE2,
        value,
        scheme: Scheme::Fpa,
        user: 1,
        method,
        outage,
        stderr: outage.map(|p| (p * (1.0 - p) / 1e5).sqrt()),
        trials: Some(100_000),
        seed: Some(u64::MAX),
        chebyshev_order: None,
    }
}

#[test]
fn csv_round_trips_exactly() {
    let rows = vec![
        row(1e-4, Some(0.1 + 0.2), EvalMethod::Mc),
        row(std::f64::consts::PI, Some(4.9e-324), EvalMethod::Mc),
        row(0.5, None, EvalMethod::Analytic),
        row(-0.0, Some(1.0), EvalMethod::Analytic),
    ];
    let text = to_csv_string(&rows);
    assert_eq!(parse_csv(&text).unwrap(), rows);
}

#[test]
fn plot_flags_clamped_points() {
    let rows = vec![
        row(1e-3, Some(0.2), EvalMethod::Analytic),
        row(1e-2, Some(1e-12), EvalMethod::Analytic),
        row(1e-2, Some(0.0), EvalMethod::Mc),
    ];
    let svg = render_svg(&[CurveRows { label: "", rows: &rows }], SweepParam::SigmaE2, Scale::Log);
    assert_eq!(svg.matches("class=\"clamped\"").count(), 2);
    assert!(svg.contains("outage probability"));
    assert!(svg.trim_end().ends_with("</svg>"));
}
