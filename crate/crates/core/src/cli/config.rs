//! Experiment configuration files.
//!
//! A config is flat TOML with a `[params]` section, a `[sweep]` section and an
//! optional `[curves]` section. Powers are given in dB (`p_s_db`, `noise_db`)
//! and converted once with `linear = 10^(dB/10)`; every other quantity is
//! linear. Unknown keys anywhere are rejected.
//!
//! ```toml
//! [params]
//! p_s_db = 15.0        # source power, dB
//! noise_db = -30.0     # noise variance, dB
//! eta = 0.7            # optional, defaults to 0.7
//! delta = 0.8
//! xi = 0.5             # optional, reported only
//! m = 1
//! d = 1.0
//! d1 = 1.0
//! d2 = 10.0
//! alpha = 2.0
//! r1 = 1.5
//! r2 = 0.5
//! sigma_e2 = 0.001
//! sigma_ic2 = 0.0      # optional, defaults to 0
//!
//! [sweep]
//! param = "p_s_db"     # sigma_e2 | p_s_db | noise_db | delta | sigma_ic2 | eta | r1 | r2
//! start = 0.0          # or: values = [...]
//! stop = 30.0
//! step = 2.5           # or: points = N (with scale = "linear" | "log")
//! schemes = ["FPA", "DPA"]
//! users = [1, 2]
//! methods = ["analytic", "mc"]
//! trials = 100000
//! seed = 1
//! chebyshev_order = 30
//!
//! [curves]             # optional; equal-length lists, one curve per index
//! r1 = [1.5, 1.0]
//! r2 = [0.5, 0.5]
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::analytic::DEFAULT_CHEBYSHEV_ORDER;
use crate::error::{Error, Result};
use crate::model::{db_to_linear, SystemParams, DEFAULT_ETA};
use crate::scheme::Scheme;

/// Parameters a sweep (or a curve family) may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    SigmaE2,
    PsDb,
    NoiseDb,
    Delta,
    SigmaIc2,
    Eta,
    R1,
    R2,
}

impl SweepParam {
    pub const ALL: [SweepParam; 8] = [
        SweepParam::SigmaE2,
        SweepParam::PsDb,
        SweepParam::NoiseDb,
        SweepParam::Delta,
        SweepParam::SigmaIc2,
        SweepParam::Eta,
        SweepParam::R1,
        SweepParam::R2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::SigmaE2 => "sigma_e2",
            SweepParam::PsDb => "p_s_db",
            SweepParam::NoiseDb => "noise_db",
            SweepParam::Delta => "delta",
            SweepParam::SigmaIc2 => "sigma_ic2",
            SweepParam::Eta => "eta",
            SweepParam::R1 => "r1",
            SweepParam::R2 => "r2",
        }
    }

    /// Axis label for plots.
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::SigmaE2 => "channel estimation error variance",
            SweepParam::PsDb => "source power P_s (dB)",
            SweepParam::NoiseDb => "noise power (dB)",
            SweepParam::Delta => "relay power split delta",
            SweepParam::SigmaIc2 => "residual SIC power",
            SweepParam::Eta => "harvesting efficiency eta",
            SweepParam::R1 => "R1 (bits/s/Hz)",
            SweepParam::R2 => "R2 (bits/s/Hz)",
        }
    }

    pub fn apply(self, params: &mut SystemParams, value: f64) {
        match self {
            SweepParam::SigmaE2 => params.sigma_e2 = value,
            SweepParam::PsDb => params.p_s = db_to_linear(value),
            SweepParam::NoiseDb => params.sigma2 = db_to_linear(value),
            SweepParam::Delta => params.delta = value,
            SweepParam::SigmaIc2 => params.sigma_ic2 = value,
            SweepParam::Eta => params.eta = value,
            SweepParam::R1 => params.r1 = value,
            SweepParam::R2 => params.r2 = value,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown sweep parameter `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvalMethod {
    Analytic,
    Mc,
}

impl EvalMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMethod::Analytic => "analytic",
            EvalMethod::Mc => "mc",
        }
    }
}

impl fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(EvalMethod::Analytic),
            "mc" => Ok(EvalMethod::Mc),
            _ => Err(format!("unknown method `{s}` (expected analytic or mc)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// A named set of parameter overrides producing one family member.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub overrides: Vec<(SweepParam, f64)>,
}

impl Curve {
    pub fn apply(&self, base: &SystemParams) -> SystemParams {
        let mut p = base.clone();
        for &(param, v) in &self.overrides {
            param.apply(&mut p, v);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Vec<f64>,
    pub scale: Scale,
    pub schemes: Vec<Scheme>,
    pub users: Vec<u8>,
    pub methods: Vec<EvalMethod>,
    pub trials: u64,
    pub seed: u64,
    pub chebyshev_order: usize,
    /// Always non-empty; a single unlabeled curve when the config has none.
    pub curves: Vec<Curve>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.grid.is_empty() {
            bad.push("sweep grid is empty".to_string());
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            bad.push("sweep grid contains non-finite values".to_string());
        }
        let inc = self.grid.windows(2).all(|w| w[1] > w[0]);
        let dec = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            bad.push("sweep grid must be strictly monotone".to_string());
        }
        if self.scale == Scale::Log && self.grid.iter().any(|&v| v <= 0.0) {
            bad.push("log-scaled sweep grid must be positive".to_string());
        }
        if self.schemes.is_empty() {
            bad.push("schemes must not be empty".to_string());
        }
        if self.users.is_empty() || self.users.iter().any(|u| !matches!(u, 1 | 2)) {
            bad.push(format!("users {:?} must be a non-empty subset of [1, 2]", self.users));
        }
        if self.methods.is_empty() {
            bad.push("methods must not be empty".to_string());
        }
        if self.methods.contains(&EvalMethod::Mc) && self.trials < 1 {
            bad.push("trials must be >= 1 when mc is selected".to_string());
        }
        if self.chebyshev_order < 1 {
            bad.push("chebyshev_order must be >= 1".to_string());
        }
        if self.curves.is_empty() {
            bad.push("at least one curve is required".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: SystemParams,
    pub sweep: SweepSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    sweep: RawSweep,
    curves: Option<RawCurves>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    p_s_db: f64,
    noise_db: f64,
    eta: Option<f64>,
    delta: f64,
    xi: Option<f64>,
    m: i64,
    d: f64,
    d1: f64,
    d2: f64,
    alpha: f64,
    r1: f64,
    r2: f64,
    sigma_e2: f64,
    sigma_ic2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: String,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    points: Option<usize>,
    scale: Option<String>,
    schemes: Vec<String>,
    users: Vec<u8>,
    methods: Vec<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    chebyshev_order: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCurves {
    r1: Option<Vec<f64>>,
    r2: Option<Vec<f64>>,
    sigma_e2: Option<Vec<f64>>,
    sigma_ic2: Option<Vec<f64>>,
    delta: Option<Vec<f64>>,
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

/// Parses config text; `origin` only labels error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let config_err = |msg: String| Error::Config {
        path: origin.to_path_buf(),
        msg,
    };
    let raw: RawConfig = toml::from_str(text).map_err(|e| config_err(e.message().to_string()))?;

    let p = raw.params;
    let eta = p.eta.unwrap_or_else(|| {
        log::info!("{}: eta not set, using default {DEFAULT_ETA}", origin.display());
        DEFAULT_ETA
    });
    let m = u32::try_from(p.m)
        .ok()
        .filter(|&m| m >= 1)
        .ok_or_else(|| Error::Validation(vec![format!("m = {} must be an integer >= 1", p.m)]))?;
    let params = SystemParams {
        p_s: db_to_linear(p.p_s_db),
        sigma2: db_to_linear(p.noise_db),
        eta,
        delta: p.delta,
        xi: p.xi.unwrap_or(0.5),
        m,
        d: p.d,
        d1: p.d1,
        d2: p.d2,
        alpha: p.alpha,
        r1: p.r1,
        r2: p.r2,
        sigma_e2: p.sigma_e2,
        sigma_ic2: p.sigma_ic2.unwrap_or(0.0),
    };
    params.validate()?;

    let s = raw.sweep;
    let param = s.param.parse::<SweepParam>().map_err(config_err)?;
    let scale = match s.scale.as_deref() {
        None | Some("linear") => Scale::Linear,
        Some("log") => Scale::Log,
        Some(other) => return Err(config_err(format!("scale `{other}` must be linear or log"))),
    };
    let grid = build_grid(&s, scale).map_err(config_err)?;
    let schemes = s
        .schemes
        .iter()
        .map(|x| x.parse::<Scheme>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(config_err)?;
    let methods = s
        .methods
        .iter()
        .map(|x| x.parse::<EvalMethod>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(config_err)?;
    let curves = build_curves(raw.curves.unwrap_or_default()).map_err(config_err)?;

    let sweep = SweepSpec {
        param,
        grid,
        scale,
        schemes: dedup_sorted(schemes),
        users: dedup_sorted(s.users),
        methods: dedup_sorted(methods),
        trials: s.trials.unwrap_or(DEFAULT_TRIALS),
        seed: s.seed.unwrap_or(DEFAULT_SEED),
        chebyshev_order: s.chebyshev_order.unwrap_or(DEFAULT_CHEBYSHEV_ORDER),
        curves,
    };
    sweep.validate()?;
    // every curve must yield valid parameters at every grid point
    for curve in &sweep.curves {
        for &v in &sweep.grid {
            let mut cp = curve.apply(&params);
            sweep.param.apply(&mut cp, v);
            cp.validate().map_err(|e| match e {
                Error::Validation(msgs) => Error::Validation(
                    msgs.into_iter()
                        .map(|m| format!("{m} (at {} = {v}, curve `{}`)", sweep.param, curve.label))
                        .collect(),
                ),
                other => other,
            })?;
        }
    }
    Ok(ExperimentConfig { params, sweep })
}

fn dedup_sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

fn build_grid(s: &RawSweep, scale: Scale) -> Result<Vec<f64>, String> {
    if let Some(values) = &s.values {
        if s.start.is_some() || s.stop.is_some() || s.step.is_some() || s.points.is_some() {
            return Err("give either `values` or a start/stop range, not both".into());
        }
        return Ok(values.clone());
    }
    let (Some(start), Some(stop)) = (s.start, s.stop) else {
        return Err("sweep needs `values` or both `start` and `stop`".into());
    };
    match (s.step, s.points, scale) {
        (Some(step), None, Scale::Linear) => {
            if !(step > 0.0) {
                return Err("step must be > 0".into());
            }
            let n = ((stop - start).abs() / step + 1e-9).floor() as usize + 1;
            let dir = if stop >= start { 1.0 } else { -1.0 };
            Ok((0..n).map(|i| start + dir * step * i as f64).collect())
        }
        (None, Some(points), _) if points >= 1 => {
            if points == 1 {
                return Ok(vec![start]);
            }
            let last = (points - 1) as f64;
            Ok(match scale {
                Scale::Linear => (0..points)
                    .map(|i| start + (stop - start) * i as f64 / last)
                    .collect(),
                Scale::Log => {
                    if !(start > 0.0 && stop > 0.0) {
                        return Err("log range needs positive start and stop".into());
                    }
                    let (a, b) = (start.log10(), stop.log10());
                    (0..points)
                        .map(|i| 10f64.powf(a + (b - a) * i as f64 / last))
                        .collect()
                }
            })
        }
        (Some(_), None, Scale::Log) => Err("log ranges take `points`, not `step`".into()),
        _ => Err("range needs exactly one of `step` or `points` (>= 1)".into()),
    }
}

fn build_curves(raw: RawCurves) -> Result<Vec<Curve>, String> {
    let columns: Vec<(SweepParam, Vec<f64>)> = [
        (SweepParam::R1, raw.r1),
        (SweepParam::R2, raw.r2),
        (SweepParam::SigmaE2, raw.sigma_e2),
        (SweepParam::SigmaIc2, raw.sigma_ic2),
        (SweepParam::Delta, raw.delta),
    ]
    .into_iter()
    .filter_map(|(p, v)| v.map(|v| (p, v)))
    .collect();
    if columns.is_empty() {
        return Ok(vec![Curve {
            label: String::new(),
            overrides: Vec::new(),
        }]);
    }
    let n = columns[0].1.len();
    if n == 0 || columns.iter().any(|(_, v)| v.len() != n) {
        return Err("all [curves] lists must be non-empty and of equal length".into());
    }
    Ok((0..n)
        .map(|i| {
            let overrides: Vec<_> = columns.iter().map(|(p, v)| (*p, v[i])).collect();
            let label = overrides
                .iter()
                .map(|(p, v)| format!("{p}={v}"))
                .collect::<Vec<_>>()
                .join("_");
            Curve { label, overrides }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
[params]
p_s_db = 15.0
noise_db = -30.0
eta = 0.7
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
start = 0.0
stop = 30.0
step = 2.5
schemes = ["FPA", "DPA"]
users = [1, 2]
methods = ["analytic", "mc"]
"#;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_config(text, Path::new("test.toml"))
    }

    #[test]
    fn reference_file() {
        let cfg = parse(REFERENCE).unwrap();
        assert_eq!(cfg.params, SystemParams::default());
        assert_eq!(cfg.sweep.grid.len(), 13);
        assert_eq!(cfg.sweep.grid[12], 30.0);
        assert_eq!(cfg.sweep.trials, DEFAULT_TRIALS);
        assert_eq!(cfg.sweep.curves.len(), 1);
    }

    #[test]
    fn out_of_range_delta_is_named() {
        let text = REFERENCE.replace("delta = 0.8", "delta = 1.5");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("delta"), "{err}");
    }

    #[test]
    fn unknown_key_is_named() {
        let text = REFERENCE.replace("m = 1", "m = 1\nbandwidth = 3.0");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("bandwidth"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = REFERENCE.replace("d2 = 10.0\n", "");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("d2"), "{err}");
    }

    #[test]
    fn eta_defaults() {
        let text = REFERENCE.replace("eta = 0.7\n", "");
        assert_eq!(parse(&text).unwrap().params.eta, DEFAULT_ETA);
    }

    #[test]
    fn empty_schemes_rejected() {
        let text = REFERENCE.replace(r#"schemes = ["FPA", "DPA"]"#, "schemes = []");
        assert!(matches!(parse(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn non_monotone_grid_rejected() {
        let text = REFERENCE
            .replace("start = 0.0\nstop = 30.0\nstep = 2.5", "values = [0.0, 5.0, 5.0]");
        assert!(matches!(parse(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn log_points_and_curves() {
        let text = REFERENCE
            .replace(r#"param = "p_s_db""#, r#"param = "sigma_e2""#)
            .replace("start = 0.0\nstop = 30.0\nstep = 2.5", "start = 1e-4\nstop = 1e-2\npoints = 5\nscale = \"log\"")
            + "\n[curves]\nr1 = [1.5, 2.0]\nr2 = [0.5, 1.0]\n";
        let cfg = parse(&text).unwrap();
        assert_eq!(cfg.sweep.scale, Scale::Log);
        assert!((cfg.sweep.grid[2] - 1e-3).abs() < 1e-15);
        assert_eq!(cfg.sweep.curves.len(), 2);
        assert_eq!(cfg.sweep.curves[1].label, "r1=2_r2=1");
        let p = cfg.sweep.curves[1].apply(&cfg.params);
        assert_eq!((p.r1, p.r2), (2.0, 1.0));
    }

    #[test]
    fn ragged_curves_rejected() {
        let text = REFERENCE.to_string() + "\n[curves]\nr1 = [1.5, 2.0]\nr2 = [0.5]\n";
        assert!(parse(&text).is_err());
    }
}
