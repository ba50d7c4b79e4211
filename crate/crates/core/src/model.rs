//! System parameters of the two-user wireless-powered relay network and every
//! quantity derived from them: rate thresholds, relay-user channel variances,
//! the Φ coefficient matrix and the classification of the relay power split δ.

use crate::error::{Error, Result};

/// Energy-harvesting efficiency used when a configuration does not set one.
pub const DEFAULT_ETA: f64 = 0.7;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Physical and protocol parameters. Powers and variances are linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Source transmit power `P_s`.
    pub p_s: f64,
    /// Noise variance `σ²` at relay and users.
    pub sigma2: f64,
    /// Energy-harvesting efficiency `η`.
    pub eta: f64,
    /// Fraction of relay power given to the weak user's symbol.
    pub delta: f64,
    /// Source power split. Carried for reporting; no outage expression uses it.
    pub xi: f64,
    /// Nakagami shape of the source-relay link.
    pub m: u32,
    /// Source-relay distance.
    pub d: f64,
    /// Relay-user-1 distance.
    pub d1: f64,
    /// Relay-user-2 distance.
    pub d2: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Target rate of user 1 (bits/s/Hz).
    pub r1: f64,
    /// Target rate of user 2 (bits/s/Hz).
    pub r2: f64,
    /// Relay-user channel estimation error variance `σ_e²`.
    pub sigma_e2: f64,
    /// Residual interference power after SIC at user 1, `σ_ic²`.
    pub sigma_ic2: f64,
}

impl Default for SystemParams {
    /// The reference numerical setup: `P_s = 15 dB`, `σ² = -30 dB`, `δ = 0.8`,
    /// unit source-relay and relay-user-1 distances, `d₂ = 10`, `α = 2`,
    /// `(R₁, R₂) = (1.5, 0.5)`, `σ_e² = 0.001`, Rayleigh source-relay fading.
    fn default() -> Self {
        SystemParams {
            p_s: db_to_linear(15.0),
            sigma2: db_to_linear(-30.0),
            eta: DEFAULT_ETA,
            delta: 0.8,
            xi: 0.5,
            m: 1,
            d: 1.0,
            d1: 1.0,
            d2: 10.0,
            alpha: 2.0,
            r1: 1.5,
            r2: 0.5,
            sigma_e2: 0.001,
            sigma_ic2: 0.0,
        }
    }
}

impl SystemParams {
    pub fn with_p_s_db(mut self, db: f64) -> Self {
        self.p_s = db_to_linear(db);
        self
    }

    pub fn with_noise_db(mut self, db: f64) -> Self {
        self.sigma2 = db_to_linear(db);
        self
    }

    /// Normalized source SNR `P = P_s / σ²`.
    pub fn snr(&self) -> f64 {
        self.p_s / self.sigma2
    }

    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                bad.push(format!("{name} = {v} must be finite and > 0"));
            }
        };
        positive("p_s", self.p_s);
        positive("sigma2", self.sigma2);
        positive("d", self.d);
        positive("d1", self.d1);
        positive("d2", self.d2);
        positive("alpha", self.alpha);
        positive("r1", self.r1);
        positive("r2", self.r2);
        for (name, v) in [("eta", self.eta), ("delta", self.delta), ("xi", self.xi)] {
            if !(0.0..=1.0).contains(&v) {
                bad.push(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        for (name, v) in [("sigma_e2", self.sigma_e2), ("sigma_ic2", self.sigma_ic2)] {
            if !(v.is_finite() && v >= 0.0) {
                bad.push(format!("{name} = {v} must be finite and >= 0"));
            }
        }
        if self.m < 1 {
            bad.push(format!("m = {} must be an integer >= 1", self.m));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    pub fn derive(&self) -> Result<Derived> {
        self.validate()?;
        let thresholds = Thresholds::new(self.r1, self.r2, self.snr());
        let omegas = OmegaSet::new(self.d1, self.d2, self.alpha, self.sigma_e2);
        let phi = PhiMatrix::new(&thresholds, self.delta, self.sigma_e2, self.eta, None);
        let phi_isic = PhiMatrix::new(
            &thresholds,
            self.delta,
            self.sigma_e2,
            self.eta,
            Some(self.sigma_ic2),
        );
        let branch = DeltaBranch::classify(&thresholds, self.delta, None);
        let branch_isic = DeltaBranch::classify(&thresholds, self.delta, Some(self.sigma_ic2));
        Ok(Derived {
            thresholds,
            omegas,
            phi,
            phi_isic,
            branch,
            branch_isic,
        })
    }
}

/// SINR thresholds for the target rates (two-phase protocol, hence `2R`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub tau0: f64,
    pub tau1: f64,
    pub tau2: f64,
    /// `P = P_s / σ²`.
    pub snr: f64,
}

impl Thresholds {
    pub fn new(r1: f64, r2: f64, snr: f64) -> Self {
        Thresholds {
            tau0: (2.0 * r1 + 2.0 * r2).exp2() - 1.0,
            tau1: (2.0 * r1).exp2() - 1.0,
            tau2: (2.0 * r2).exp2() - 1.0,
            snr,
        }
    }
}

/// Variances of the estimated relay-user channels and their harmonic combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSet {
    /// Relay-user-2 link: `d₂^{-α} + σ_e²`.
    pub omega1: f64,
    /// `Ω₁Ω₃/(Ω₁+Ω₃)`, the mean of the weaker of the two gains.
    pub omega2: f64,
    /// Relay-user-1 link: `d₁^{-α} + σ_e²`.
    pub omega3: f64,
}

impl OmegaSet {
    pub fn new(d1: f64, d2: f64, alpha: f64, sigma_e2: f64) -> Self {
        let omega1 = d2.powf(-alpha) + sigma_e2;
        let omega3 = d1.powf(-alpha) + sigma_e2;
        OmegaSet {
            omega1,
            omega2: omega1 * omega3 / (omega1 + omega3),
            omega3,
        }
    }

    /// `Ω_k` for `k ∈ {1, 2, 3}`.
    pub fn get(&self, k: usize) -> f64 {
        match k {
            1 => self.omega1,
            2 => self.omega2,
            3 => self.omega3,
            _ => panic!("Omega index {k} out of range 1..=3"),
        }
    }
}

/// Decoding-threshold coefficients. Row 1 comes from decoding the weak
/// user's symbol, row 2 from decoding the strong user's own symbol; each row
/// is `c_n · [σ_e², 1/η]`.
///
/// A row whose scalar `c_n` has a non-positive denominator is infeasible: its
/// entries are `+inf` and the corresponding decoding step never succeeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMatrix {
    pub phi11: f64,
    pub phi12: f64,
    pub phi21: f64,
    pub phi22: f64,
    pub sic_aware: bool,
}

impl PhiMatrix {
    /// `sic` is `Some(σ_ic²)` for the residual-interference variant.
    pub fn new(th: &Thresholds, delta: f64, sigma_e2: f64, eta: f64, sic: Option<f64>) -> Self {
        let den1 = delta * (th.tau2 + 1.0) - th.tau2;
        let den2 = match sic {
            Some(s) => 1.0 - delta * (th.tau1 * s + 1.0),
            None => 1.0 - delta,
        };
        let row = |num: f64, den: f64| {
            if den > 0.0 {
                let c = num / den;
                (c * sigma_e2, c / eta)
            } else {
                (f64::INFINITY, f64::INFINITY)
            }
        };
        let (phi11, phi12) = row(th.tau2, den1);
        let (phi21, phi22) = row(th.tau1, den2);
        PhiMatrix {
            phi11,
            phi12,
            phi21,
            phi22,
            sic_aware: sic.is_some(),
        }
    }

    /// `(Φ_{n1}, Φ_{n2})`, or `None` when row `n` is infeasible.
    pub fn row(&self, n: usize) -> Option<(f64, f64)> {
        let (a, b) = match n {
            1 => (self.phi11, self.phi12),
            2 => (self.phi21, self.phi22),
            _ => panic!("Phi row {n} out of range 1..=2"),
        };
        (a.is_finite() && b.is_finite()).then_some((a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    /// The weak user's symbol can never be decoded at the strong user.
    AlwaysOutage,
    /// Decoding the weak user's symbol is the binding constraint (Φ row 1).
    Branch1,
    /// Decoding the strong user's own symbol is binding (Φ row 2).
    Branch2,
}

/// Classification of δ against the feasibility breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBranch {
    pub kind: BranchKind,
    /// `τ₂/(τ₂+1)`: at or below it the weak user's SINR can never reach `τ₂`.
    pub lower: f64,
    /// Row-switch point, `(τ₀-τ₁)/(τ₀+τ₁τ₂σ_ic²)`.
    pub upper: f64,
    /// `1/(τ₁σ_ic²+1)`: at or above it the strong user's SINR ceiling is below
    /// `τ₁`. Equal to 1 in the perfect-SIC classification.
    pub ceiling: f64,
}

impl DeltaBranch {
    pub fn classify(th: &Thresholds, delta: f64, sic: Option<f64>) -> Self {
        let lower = th.tau2 / (th.tau2 + 1.0);
        let (upper, ceiling) = match sic {
            Some(s) => (
                (th.tau0 - th.tau1) / (th.tau0 + th.tau1 * th.tau2 * s),
                1.0 / (th.tau1 * s + 1.0),
            ),
            None => ((th.tau0 - th.tau1) / th.tau0, 1.0),
        };
        let kind = if delta <= lower || (sic.is_some() && delta >= ceiling) {
            BranchKind::AlwaysOutage
        } else if delta < upper {
            BranchKind::Branch1
        } else {
            BranchKind::Branch2
        };
        DeltaBranch {
            kind,
            lower,
            upper,
            ceiling,
        }
    }

    /// The Φ row that bounds the strong user's gain, if any.
    pub fn phi_row(&self) -> Option<usize> {
        match self.kind {
            BranchKind::AlwaysOutage => None,
            BranchKind::Branch1 => Some(1),
            BranchKind::Branch2 => Some(2),
        }
    }
}

/// Everything computed once from a validated [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    pub thresholds: Thresholds,
    pub omegas: OmegaSet,
    pub phi: PhiMatrix,
    pub phi_isic: PhiMatrix,
    pub branch: DeltaBranch,
    pub branch_isic: DeltaBranch,
}
