//! Grid evaluation of analytic and Monte Carlo outage probabilities.

use rayon::prelude::*;

use crate::analytic::{
    dpa_outage_user1, dpa_outage_user2, fpa_outage_user1, fpa_outage_user1_isic, fpa_outage_user2,
};
use crate::cli::config::{EvalMethod, SweepParam, SweepSpec};
use crate::error::{Error, Result};
use crate::mc::{RngSpec, Simulator};
use crate::model::SystemParams;
use crate::scheme::Scheme;

/// One output line. `outage` is `None` when the point could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_param: SweepParam,
    pub value: f64,
    pub scheme: Scheme,
    pub user: u8,
    pub method: EvalMethod,
    pub outage: Option<f64>,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub chebyshev_order: Option<usize>,
}

/// A point that was skipped, with the reason. The sweep itself continues.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub value: f64,
    pub scheme: Scheme,
    pub user: u8,
    pub method: EvalMethod,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub errors: Vec<RowError>,
}

fn analytic(params: &SystemParams, scheme: Scheme, user: u8, order: usize) -> Result<f64> {
    let est = match (scheme, user) {
        (Scheme::Fpa, 1) => fpa_outage_user1(params),
        (Scheme::Fpa, 2) => fpa_outage_user2(params),
        (Scheme::FpaIsic, 1) => fpa_outage_user1_isic(params),
        (Scheme::Dpa, 1) => dpa_outage_user1(params, order),
        (Scheme::Dpa, 2) => dpa_outage_user2(params),
        _ => unreachable!("filtered before evaluation"),
    }?;
    Ok(est.value)
}

fn eval_point(params: &SystemParams, spec: &SweepSpec, value: f64, workers: Option<usize>) -> Result<SweepOutput> {
    let mut p = params.clone();
    spec.param.apply(&mut p, value);

    let counters = if spec.methods.contains(&EvalMethod::Mc) {
        Some(Simulator::new(&p)?.run(spec.trials, &RngSpec::new(spec.seed), workers)?)
    } else {
        None
    };

    let mut out = SweepOutput::default();
    for &scheme in &spec.schemes {
        for &user in spec.users.iter().filter(|u| scheme.users().contains(u)) {
            for &method in &spec.methods {
                let mut row = ResultRow {
                    sweep_param: spec.param,
                    value,
                    scheme,
                    user,
                    method,
                    outage: None,
                    stderr: None,
                    trials: None,
                    seed: None,
                    chebyshev_order: None,
                };
                match method {
                    EvalMethod::Analytic => {
                        if !scheme.has_closed_form() {
                            continue;
                        }
                        row.chebyshev_order = Some(spec.chebyshev_order);
                        match analytic(&p, scheme, user, spec.chebyshev_order) {
                            Ok(v) => row.outage = Some(v),
                            Err(Error::Unsupported(msg)) => {
                                log::warn!("{scheme} user {user} at {} = {value}: {msg}", spec.param);
                                out.errors.push(RowError { value, scheme, user, method, message: msg });
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    EvalMethod::Mc => {
                        let c = counters.as_ref().expect("mc counters present");
                        let est = c.estimate(scheme, user).expect("scheme reports this user");
                        row.outage = Some(est.value);
                        row.stderr = est.detail.map(|d| d.std_error);
                        row.trials = Some(spec.trials);
                        row.seed = Some(spec.seed);
                    }
                }
                out.rows.push(row);
            }
        }
    }
    Ok(out)
}

/// Evaluates every grid point. Rows come out ordered by grid position, then
/// scheme, user and method, independent of the worker count.
pub fn run_sweep(params: &SystemParams, spec: &SweepSpec, workers: Option<usize>) -> Result<SweepOutput> {
    spec.validate()?;
    let work = || -> Result<Vec<SweepOutput>> {
        spec.grid
            .par_iter()
            .map(|&v| eval_point(params, spec, v, None))
            .collect()
    };
    let parts = match workers {
        None => work()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::domain("run_sweep", format!("thread pool: {e}")))?
            .install(work)?,
    };
    let mut out = SweepOutput::default();
    for part in parts {
        out.rows.extend(part.rows);
        out.errors.extend(part.errors);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{Curve, Scale};

    fn spec(methods: Vec<EvalMethod>) -> SweepSpec {
        SweepSpec {
            param: SweepParam::PsDb,
            grid: vec![10.0, 20.0],
            scale: Scale::Linear,
            schemes: vec![Scheme::Fpa, Scheme::FpaIsic, Scheme::Dpa, Scheme::Oma],
            users: vec![1, 2],
            methods,
            trials: 2000,
            seed: 4,
            chebyshev_order: 30,
            curves: vec![Curve { label: String::new(), overrides: vec![] }],
        }
    }

    #[test]
    fn row_layout() {
        let out = run_sweep(&SystemParams::default(), &spec(vec![EvalMethod::Analytic, EvalMethod::Mc]), Some(2)).unwrap();
        // per point: FPA 2x2, FPA_ISIC 1x2, DPA 2x2, OMA 2x1
        assert_eq!(out.rows.len(), 2 * 12);
        assert!(out.errors.is_empty());
        assert!(out.rows[..12].iter().all(|r| r.value == 10.0));
        let first = &out.rows[0];
        assert_eq!((first.scheme, first.user, first.method), (Scheme::Fpa, 1, EvalMethod::Analytic));
        assert!(out.rows.iter().all(|r| r.outage.is_some()));
    }

    #[test]
    fn dpa_nakagami_is_a_row_error() {
        let p = SystemParams { m: 2, ..SystemParams::default() };
        let out = run_sweep(&p, &spec(vec![EvalMethod::Analytic]), None).unwrap();
        assert_eq!(out.errors.len(), 4);
        let dpa: Vec<_> = out.rows.iter().filter(|r| r.scheme == Scheme::Dpa).collect();
        assert!(dpa.iter().all(|r| r.outage.is_none()));
        let fpa: Vec<_> = out.rows.iter().filter(|r| r.scheme == Scheme::Fpa).collect();
        assert!(fpa.iter().all(|r| r.outage.is_some()));
    }
}
