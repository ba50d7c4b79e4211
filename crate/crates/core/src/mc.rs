//! Seeded, parallel Monte Carlo simulation of the relay network.
//!
//! Each trial draws the source-relay gain and the two estimated relay-user
//! gains, then decides outage for every scheme directly from the SINR
//! expressions. Trials are split into fixed-size chunks; chunk `c` draws from
//! ChaCha8 stream `c` of the master seed, so the counters depend only on
//! `(seed, trials, chunk_size)` and never on the number of worker threads.

use std::ops::Add;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma};
use rayon::prelude::*;

use crate::analytic::{McDetail, Method, OutageEstimate};
use crate::error::{Error, Result};
use crate::model::{Derived, SystemParams};
use crate::scheme::Scheme;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// One realization of the channel state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialDraw {
    /// Source-relay gain `|h|² d^{-α}`.
    pub g: f64,
    /// Larger estimated relay-user gain.
    pub g1: f64,
    /// Smaller estimated relay-user gain.
    pub g2: f64,
    /// Harvested relay SNR `η(Pg - τ₀)`; zero when the relay cannot decode.
    pub p_prime: f64,
    /// Whether `g > τ₀/P`, i.e. the relay decodes both symbols.
    pub relay_decodes: bool,
}

/// Per-scheme outage counts over `trials` draws.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutageCounters {
    pub trials: u64,
    pub outage_fpa_u1: u64,
    pub outage_fpa_u2: u64,
    pub outage_fpa_u1_isic: u64,
    pub outage_dpa_u1: u64,
    pub outage_dpa_u2: u64,
    pub outage_oma_u1: u64,
    pub outage_oma_u2: u64,
    /// Trials where the strong user succeeds under DPA only because its own
    /// gain clears the per-trial threshold while the weak gain sits between
    /// `τ₂(σ_e² + 1/P')` and `τ₀(σ_e² + 1/P')`; its mean is Υ_II.
    pub dpa_u1_marginal_success: u64,
}

impl Add for OutageCounters {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        OutageCounters {
            trials: self.trials + o.trials,
            outage_fpa_u1: self.outage_fpa_u1 + o.outage_fpa_u1,
            outage_fpa_u2: self.outage_fpa_u2 + o.outage_fpa_u2,
            outage_fpa_u1_isic: self.outage_fpa_u1_isic + o.outage_fpa_u1_isic,
            outage_dpa_u1: self.outage_dpa_u1 + o.outage_dpa_u1,
            outage_dpa_u2: self.outage_dpa_u2 + o.outage_dpa_u2,
            outage_oma_u1: self.outage_oma_u1 + o.outage_oma_u1,
            outage_oma_u2: self.outage_oma_u2 + o.outage_oma_u2,
            dpa_u1_marginal_success: self.dpa_u1_marginal_success + o.dpa_u1_marginal_success,
        }
    }
}

impl OutageCounters {
    pub fn count(&self, scheme: Scheme, user: u8) -> Option<u64> {
        Some(match (scheme, user) {
            (Scheme::Fpa, 1) => self.outage_fpa_u1,
            (Scheme::Fpa, 2) => self.outage_fpa_u2,
            (Scheme::FpaIsic, 1) => self.outage_fpa_u1_isic,
            (Scheme::Dpa, 1) => self.outage_dpa_u1,
            (Scheme::Dpa, 2) => self.outage_dpa_u2,
            (Scheme::Oma, 1) => self.outage_oma_u1,
            (Scheme::Oma, 2) => self.outage_oma_u2,
            _ => return None,
        })
    }

    /// Binomial estimate of the outage probability for `(scheme, user)`.
    pub fn estimate(&self, scheme: Scheme, user: u8) -> Option<OutageEstimate> {
        self.count(scheme, user).map(|c| binomial_estimate(c, self.trials))
    }
}

/// `p̂ = count/trials` with standard error `sqrt(p̂(1-p̂)/trials)`.
pub fn binomial_estimate(count: u64, trials: u64) -> OutageEstimate {
    let p = count as f64 / trials as f64;
    OutageEstimate {
        value: p,
        method: Method::MonteCarlo,
        detail: Some(McDetail {
            trials,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            degenerate: count == 0 || count == trials,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: u64,
    /// Trials per independently seeded chunk.
    pub chunk_size: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec {
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    /// Generator for chunk `index`: stream `index` of the master seed.
    pub fn chunk_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Precomputed constants and samplers for one parameter set.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: SystemParams,
    derived: Derived,
    fading: Gamma<f64>,
    path_gain: f64,
    near_link: Exp<f64>,
    far_link: Exp<f64>,
    oma_tau1: f64,
    oma_tau2: f64,
}

impl Simulator {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let derived = params.derive()?;
        let m = f64::from(params.m);
        let fading = Gamma::new(m, 1.0 / m)
            .map_err(|e| Error::Validation(vec![format!("m = {}: {e}", params.m)]))?;
        let exp = |mean: f64| {
            Exp::new(1.0 / mean).map_err(|e| Error::Validation(vec![format!("channel mean {mean}: {e}")]))
        };
        Ok(Simulator {
            params: params.clone(),
            derived,
            fading,
            path_gain: params.d.powf(-params.alpha),
            near_link: exp(derived.omegas.omega3)?,
            far_link: exp(derived.omegas.omega1)?,
            oma_tau1: (4.0 * params.r1).exp2() - 1.0,
            oma_tau2: (4.0 * params.r2).exp2() - 1.0,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn derived(&self) -> &Derived {
        &self.derived
    }

    /// Draws `|h|² ~ Gamma(m, 1/m)` for the source-relay link and independent
    /// exponential estimated powers with means `Ω₃` (user 1's link) and `Ω₁`
    /// (user 2's link), ordered so that `g1 >= g2`.
    pub fn draw_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialDraw {
        let g = self.fading.sample(rng) * self.path_gain;
        let near = self.near_link.sample(rng);
        let far = self.far_link.sample(rng);
        // ties resolve to the first-drawn link
        let (g1, g2) = if near >= far { (near, far) } else { (far, near) };
        let th = &self.derived.thresholds;
        let excess = th.snr * g - th.tau0;
        let relay_decodes = excess > 0.0;
        TrialDraw {
            g,
            g1,
            g2,
            p_prime: if relay_decodes { self.params.eta * excess } else { 0.0 },
            relay_decodes,
        }
    }

    /// Fixed-δ decisions `(outage_u1, outage_u2)` with perfect SIC.
    pub fn eval_fpa(&self, t: &TrialDraw) -> (bool, bool) {
        if !t.relay_decodes {
            return (true, true);
        }
        let th = &self.derived.thresholds;
        let delta = self.params.delta;
        let pp = t.p_prime;
        let noise = pp * self.params.sigma_e2 + 1.0;
        let gamma_12 = delta * pp * t.g1 / ((1.0 - delta) * pp * t.g1 + noise);
        let gamma_1 = (1.0 - delta) * pp * t.g1 / noise;
        let gamma_2 = delta * pp * t.g2 / ((1.0 - delta) * pp * t.g2 + noise);
        let ok1 = gamma_12 > th.tau2 && gamma_1 > th.tau1;
        let ok2 = gamma_2 > th.tau2;
        (!ok1, !ok2)
    }

    /// Fixed-δ outage of user 1 when SIC leaves residual power `σ_ic²`.
    pub fn eval_fpa_isic(&self, t: &TrialDraw) -> bool {
        if !t.relay_decodes {
            return true;
        }
        let th = &self.derived.thresholds;
        let p = &self.params;
        let pp = t.p_prime;
        let noise = pp * p.sigma_e2 + 1.0;
        let gamma_12 = p.delta * pp * t.g1 / ((1.0 - p.delta) * pp * t.g1 + noise);
        let gamma_1 = (1.0 - p.delta) * pp * t.g1 / (noise + pp * p.delta * t.g1 * p.sigma_ic2);
        !(gamma_12 > th.tau2 && gamma_1 > th.tau1)
    }

    /// Per-trial δ that puts the weak user's SINR exactly at `τ₂`, or 1 when
    /// that is impossible.
    pub fn dpa_delta(&self, t: &TrialDraw) -> f64 {
        let tau2 = self.derived.thresholds.tau2;
        let pp = t.p_prime;
        let spare = (pp * t.g2 - tau2 * (self.params.sigma_e2 * pp + 1.0)) / ((1.0 + tau2) * pp * t.g2);
        1.0 - spare.max(0.0)
    }

    /// Dynamic-δ decisions `(outage_u1, outage_u2)`.
    pub fn eval_dpa(&self, t: &TrialDraw) -> (bool, bool) {
        self.eval_dpa_detail(t).0
    }

    /// As [`Self::eval_dpa`], plus whether user 1 succeeded through the
    /// marginal weak-gain band that defines Υ_II.
    fn eval_dpa_detail(&self, t: &TrialDraw) -> ((bool, bool), bool) {
        if !t.relay_decodes {
            return ((true, true), false);
        }
        let th = &self.derived.thresholds;
        let pp = t.p_prime;
        let se = self.params.sigma_e2;
        let ok2 = t.g2 > th.tau2 * (se + 1.0 / pp);
        if !ok2 {
            return ((true, true), false);
        }
        let delta = self.dpa_delta(t);
        let gamma_1 = (1.0 - delta) * pp * t.g1 / (pp * se + 1.0);
        let ok1 = gamma_1 > th.tau1;
        let marginal = ok1 && t.g2 < th.tau0 * (se + 1.0 / pp);
        ((!ok1, false), marginal)
    }

    /// Orthogonal baseline: each user alone at full relay power in half the
    /// second phase, so its SNR must clear `2^{4R_n} - 1`.
    pub fn eval_oma(&self, t: &TrialDraw) -> (bool, bool) {
        if !t.relay_decodes {
            return (true, true);
        }
        let pp = t.p_prime;
        let noise = pp * self.params.sigma_e2 + 1.0;
        let snr1 = pp * t.g1 / noise;
        let snr2 = pp * t.g2 / noise;
        (snr1 <= self.oma_tau1, snr2 <= self.oma_tau2)
    }

    fn tally(&self, t: &TrialDraw, c: &mut OutageCounters) {
        let (f1, f2) = self.eval_fpa(t);
        let fi = self.eval_fpa_isic(t);
        let ((d1, d2), marginal) = self.eval_dpa_detail(t);
        let (o1, o2) = self.eval_oma(t);
        c.trials += 1;
        c.outage_fpa_u1 += u64::from(f1);
        c.outage_fpa_u2 += u64::from(f2);
        c.outage_fpa_u1_isic += u64::from(fi);
        c.outage_dpa_u1 += u64::from(d1);
        c.outage_dpa_u2 += u64::from(d2);
        c.outage_oma_u1 += u64::from(o1);
        c.outage_oma_u2 += u64::from(o2);
        c.dpa_u1_marginal_success += u64::from(marginal);
    }

    fn run_chunk(&self, rng_spec: &RngSpec, index: u64, len: u64) -> OutageCounters {
        let mut rng = rng_spec.chunk_rng(index);
        let mut c = OutageCounters::default();
        for _ in 0..len {
            let t = self.draw_trial(&mut rng);
            self.tally(&t, &mut c);
        }
        c
    }

    /// Runs `trials` draws. `workers = None` uses the global rayon pool.
    pub fn run(&self, trials: u64, rng_spec: &RngSpec, workers: Option<usize>) -> Result<OutageCounters> {
        if trials == 0 {
            return Err(Error::domain("run_campaign", "trials must be >= 1"));
        }
        if rng_spec.chunk_size == 0 {
            return Err(Error::domain("run_campaign", "chunk size must be >= 1"));
        }
        let chunk = rng_spec.chunk_size;
        let n_chunks = trials.div_ceil(chunk);
        let work = || {
            (0..n_chunks)
                .into_par_iter()
                .map(|i| {
                    let len = chunk.min(trials - i * chunk);
                    self.run_chunk(rng_spec, i, len)
                })
                .reduce(OutageCounters::default, Add::add)
        };
        match workers {
            None => Ok(work()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::domain("run_campaign", format!("thread pool: {e}")))?;
                Ok(pool.install(work))
            }
        }
    }
}

/// Counters and the requested per-scheme estimates of one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub counters: OutageCounters,
    pub estimates: Vec<(Scheme, u8, OutageEstimate)>,
}

pub fn run_campaign(
    params: &SystemParams,
    trials: u64,
    rng_spec: &RngSpec,
    schemes: &[Scheme],
    workers: Option<usize>,
) -> Result<CampaignReport> {
    let counters = Simulator::new(params)?.run(trials, rng_spec, workers)?;
    let estimates = schemes
        .iter()
        .flat_map(|&s| s.users().iter().map(move |&u| (s, u)))
        .filter_map(|(s, u)| counters.estimate(s, u).map(|e| (s, u, e)))
        .collect();
    Ok(CampaignReport { counters, estimates })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(p: SystemParams) -> Simulator {
        Simulator::new(&p).unwrap()
    }

    fn draws(s: &Simulator, n: usize, seed: u64) -> Vec<TrialDraw> {
        let mut rng = RngSpec::new(seed).chunk_rng(0);
        (0..n).map(|_| s.draw_trial(&mut rng)).collect()
    }

    #[test]
    fn ordering_and_harvested_power() {
        let s = sim(SystemParams::default());
        let th = s.derived().thresholds;
        for t in draws(&s, 10_000, 3) {
            assert!(t.g1 >= t.g2 && t.g2 >= 0.0);
            if t.g > th.tau0 / th.snr {
                assert!(t.relay_decodes);
                let expected = 0.7 * (th.snr * t.g - th.tau0);
                assert!((t.p_prime - expected).abs() <= 1e-12 * expected.abs());
            }
        }
    }

    #[test]
    fn no_relay_power_means_outage_everywhere() {
        let s = sim(SystemParams::default());
        let t = TrialDraw { g: 0.0, g1: 5.0, g2: 1.0, p_prime: 0.0, relay_decodes: false };
        assert_eq!(s.eval_fpa(&t), (true, true));
        assert!(s.eval_fpa_isic(&t));
        assert_eq!(s.eval_dpa(&t), (true, true));
        assert_eq!(s.eval_oma(&t), (true, true));
    }

    #[test]
    fn weak_user_ceiling_below_threshold() {
        for delta in [0.3, 0.5] {
            let s = sim(SystemParams { delta, ..SystemParams::default() });
            for t in draws(&s, 20_000, 11) {
                assert!(s.eval_fpa(&t).1);
                assert!(s.eval_fpa(&t).0);
            }
        }
    }

    #[test]
    fn isic_reduces_to_perfect() {
        let s = sim(SystemParams::default());
        for t in draws(&s, 50_000, 5) {
            assert_eq!(s.eval_fpa_isic(&t), s.eval_fpa(&t).0);
        }
        let heavy = sim(SystemParams { sigma_ic2: 10.0, ..SystemParams::default() });
        assert!(draws(&heavy, 20_000, 5).iter().all(|t| heavy.eval_fpa_isic(t)));
    }

    #[test]
    fn dpa_delta_solves_weak_user_threshold() {
        let s = sim(SystemParams::default());
        let tau2 = s.derived().thresholds.tau2;
        let se = s.params().sigma_e2;
        let mut active = 0;
        for t in draws(&s, 20_000, 9) {
            if !t.relay_decodes {
                continue;
            }
            let delta = s.dpa_delta(&t);
            let pp = t.p_prime;
            if t.g2 <= tau2 * (se + 1.0 / pp) {
                assert_eq!(delta, 1.0);
                assert_eq!(s.eval_dpa(&t), (true, true));
            } else {
                active += 1;
                let noise = pp * se + 1.0;
                let gamma2 = delta * pp * t.g2 / ((1.0 - delta) * pp * t.g2 + noise);
                assert!(((gamma2 - tau2) / tau2).abs() < 1e-9);
            }
        }
        assert!(active > 1000);
    }

    #[test]
    fn dpa_events_nest() {
        let s = sim(SystemParams::default());
        for t in draws(&s, 50_000, 21) {
            let (u1, u2) = s.eval_dpa(&t);
            assert!(!u2 || u1);
        }
    }

    #[test]
    fn oma_perfect_csi_infinite_snr() {
        let s = sim(SystemParams { sigma_e2: 0.0, ..SystemParams::default() });
        let t = TrialDraw { g: 1.0, g1: 0.5, g2: 0.01, p_prime: 1e12, relay_decodes: true };
        assert_eq!(s.eval_oma(&t), (false, false));
    }

    #[test]
    fn determinism_across_workers() {
        let p = SystemParams::default();
        let spec = RngSpec { seed: 42, chunk_size: 4096 };
        let s = sim(p);
        let a = s.run(100_000, &spec, Some(1)).unwrap();
        let b = s.run(100_000, &spec, Some(8)).unwrap();
        let c = s.run(100_000, &spec, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.trials, 100_000);
        assert!(s.run(0, &spec, None).is_err());
    }

    #[test]
    fn degenerate_estimates() {
        let e = binomial_estimate(0, 100);
        assert_eq!(e.value, 0.0);
        let d = e.detail.unwrap();
        assert!(d.degenerate && d.std_error == 0.0);
        let e = binomial_estimate(100, 100);
        assert!(e.detail.unwrap().degenerate);
        assert!(!binomial_estimate(3, 100).detail.unwrap().degenerate);
    }

    #[test]
    fn counts_bounded_by_trials() {
        let p = SystemParams::default();
        let report = run_campaign(&p, 30_000, &RngSpec::new(1), &Scheme::ALL, None).unwrap();
        let c = report.counters;
        for v in [
            c.outage_fpa_u1,
            c.outage_fpa_u2,
            c.outage_fpa_u1_isic,
            c.outage_dpa_u1,
            c.outage_dpa_u2,
            c.outage_oma_u1,
            c.outage_oma_u2,
        ] {
            assert!(v <= c.trials);
        }
        assert!(c.outage_dpa_u1 >= c.outage_dpa_u2);
        // FPA_ISIC reports user 1 only
        assert_eq!(report.estimates.len(), 7);
    }

    #[test]
    fn unit_mean_rayleigh_power() {
        let s = sim(SystemParams::default());
        let n = 1_000_000;
        let mean = draws(&s, n, 77).iter().map(|t| t.g).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt());
    }
}
