//! Configuration-driven sweeps and their CSV/SVG output.

pub mod config;
pub mod csv;
pub mod plot;
pub mod sweep;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use config::{EvalMethod, ExperimentConfig};
use plot::CurveRows;
use sweep::{run_sweep, ResultRow, RowError};

pub use config::{load_config, parse_config};
pub use csv::emit_csv;
pub use plot::emit_plot;

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

/// Text of a bundled figure preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => include_str!("../../presets/fig2.toml"),
        "fig3" => include_str!("../../presets/fig3.toml"),
        "fig4" => include_str!("../../presets/fig4.toml"),
        "fig5" => include_str!("../../presets/fig5.toml"),
        "fig6" => include_str!("../../presets/fig6.toml"),
        _ => return None,
    })
}

pub fn load_preset(name: &str) -> Result<ExperimentConfig> {
    let text = preset_text(name).ok_or_else(|| {
        Error::Validation(vec![format!(
            "unknown preset `{name}` (expected one of {})",
            PRESET_NAMES.join(", ")
        )])
    })?;
    parse_config(text, Path::new(&format!("<preset {name}>")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub methods: Option<Vec<EvalMethod>>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(t) = self.trials {
            cfg.sweep.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.sweep.seed = s;
        }
        if let Some(m) = &self.methods {
            let mut m = m.clone();
            m.sort();
            m.dedup();
            cfg.sweep.methods = m;
        }
        cfg.sweep.validate()
    }
}

#[derive(Debug, Clone)]
pub struct CurveResult {
    pub label: String,
    pub rows: Vec<ResultRow>,
    pub errors: Vec<RowError>,
}

/// Runs every curve of the config's sweep.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<CurveResult>> {
    cfg.sweep
        .curves
        .iter()
        .map(|curve| {
            let params = curve.apply(&cfg.params);
            let out = run_sweep(&params, &cfg.sweep, workers)?;
            Ok(CurveResult {
                label: curve.label.clone(),
                rows: out.rows,
                errors: out.errors,
            })
        })
        .collect()
}

fn file_stem(name: &str, label: &str) -> String {
    if label.is_empty() {
        name.to_string()
    } else {
        format!("{name}_{}", label.replace('=', "-"))
    }
}

/// Writes one CSV per curve and one SVG for the whole family. Returns the
/// paths written.
pub fn write_outputs(
    name: &str,
    cfg: &ExperimentConfig,
    results: &[CurveResult],
    out_dir: &Path,
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    if formats.contains(&OutputFormat::Csv) {
        for r in results {
            let path = out_dir.join(format!("{}.csv", file_stem(name, &r.label)));
            emit_csv(&r.rows, &path)?;
            written.push(path);
        }
    }
    if formats.contains(&OutputFormat::Svg) {
        let curves: Vec<CurveRows> = results
            .iter()
            .map(|r| CurveRows { label: &r.label, rows: &r.rows })
            .collect();
        let path = out_dir.join(format!("{name}.svg"));
        emit_plot(&curves, cfg.sweep.param, cfg.sweep.scale, &path)?;
        written.push(path);
    }
    Ok(written)
}
