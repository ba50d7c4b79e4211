//! Closed-form outage probabilities for fixed (FPA) and dynamic (DPA) relay
//! power allocation, their high-SNR floors, and two independent evaluations
//! of the DPA correction term Υ_II.

use crate::error::{Error, Result};
use crate::model::{BranchKind, Derived, OmegaSet, SystemParams};
use crate::quad;
use crate::specfun::{binomial, bessel_k, chebyshev_rule, gamma_int, x_pow_bessel_k};

/// Default Gauss-Chebyshev order for Υ_II.
pub const DEFAULT_CHEBYSHEV_ORDER: usize = 30;

/// Rounding residue below zero that is silently clamped.
const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    QuadratureOracle,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McDetail {
    pub trials: u64,
    pub std_error: f64,
    /// The estimate is exactly 0 or 1, so the binomial standard error is 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub method: Method,
    pub detail: Option<McDetail>,
}

impl OutageEstimate {
    fn closed_form(value: f64) -> Result<Self> {
        Ok(OutageEstimate {
            value: clamp_probability(value)?,
            method: Method::ClosedForm,
            detail: None,
        })
    }

    fn certain() -> Result<Self> {
        Self::closed_form(1.0)
    }
}

/// Clamps rounding residue into `[0, 1]`; anything further out is an error.
pub fn clamp_probability(value: f64) -> Result<f64> {
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&value) {
        return Err(Error::Consistency(format!(
            "probability {value} outside [0, 1]"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

fn require_rayleigh(params: &SystemParams, what: &str) -> Result<()> {
    if params.m != 1 {
        return Err(Error::Unsupported(format!(
            "{what} is only available for Rayleigh source-relay fading (m = 1), got m = {}",
            params.m
        )));
    }
    Ok(())
}

/// Success probability `P{g > τ₀/P, g_sel > Φ₁ + Φ₂/(Pg - τ₀)}` where the
/// survival function of `g_sel` is `Σ_k sign_k exp(-γ/Ω_k)`.
fn fpa_success(
    params: &SystemParams,
    der: &Derived,
    (phi1, phi2): (f64, f64),
    terms: &[(usize, f64)],
) -> Result<f64> {
    let m = params.m;
    let mf = f64::from(m);
    let path_gain = params.d.powf(-params.alpha);
    let snr = der.thresholds.snr;
    let x = der.thresholds.tau0 * mf / (path_gain * snr);
    let gamma_m = gamma_int(m)?;
    let mut total = 0.0;
    for i in 0..m {
        let coef = binomial(u64::from(m - 1), u64::from(i))? as f64
            * (-x).exp()
            * x.powi((m - 1 - i) as i32)
            / (2f64.powi(i as i32) * gamma_m);
        let mut inner = 0.0;
        for &(k, sign) in terms {
            let omega = der.omegas.get(k);
            let beta = 2.0 * (mf / (path_gain * snr) * phi2 / omega).sqrt();
            inner += sign * (-phi1 / omega).exp() * x_pow_bessel_k(i + 1, beta)?;
        }
        total += coef * inner;
    }
    Ok(total)
}

const G1_TERMS: [(usize, f64); 3] = [(1, 1.0), (2, -1.0), (3, 1.0)];
const G2_TERMS: [(usize, f64); 1] = [(2, 1.0)];

/// Outage of the strong user under fixed δ and perfect SIC.
pub fn fpa_outage_user1(params: &SystemParams) -> Result<OutageEstimate> {
    let der = params.derive()?;
    fpa_user1_with(params, &der, false)
}

/// Outage of the strong user under fixed δ with residual SIC interference `σ_ic²`.
pub fn fpa_outage_user1_isic(params: &SystemParams) -> Result<OutageEstimate> {
    let der = params.derive()?;
    fpa_user1_with(params, &der, true)
}

fn fpa_user1_with(params: &SystemParams, der: &Derived, isic: bool) -> Result<OutageEstimate> {
    let (phi, branch) = if isic {
        (&der.phi_isic, &der.branch_isic)
    } else {
        (&der.phi, &der.branch)
    };
    let Some(row) = branch.phi_row().and_then(|n| phi.row(n)) else {
        return OutageEstimate::certain();
    };
    if params.eta == 0.0 {
        return OutageEstimate::certain();
    }
    OutageEstimate::closed_form(1.0 - fpa_success(params, der, row, &G1_TERMS)?)
}

/// Outage of the weak user under fixed δ.
pub fn fpa_outage_user2(params: &SystemParams) -> Result<OutageEstimate> {
    let der = params.derive()?;
    if der.branch.kind == BranchKind::AlwaysOutage || params.eta == 0.0 {
        return OutageEstimate::certain();
    }
    let row = der.phi.row(1).expect("row 1 is feasible above the lower breakpoint");
    OutageEstimate::closed_form(1.0 - fpa_success(params, &der, row, &G2_TERMS)?)
}

/// High-SNR limit of the FPA outage of `user` (1 or 2) with perfect SIC.
pub fn fpa_floor(params: &SystemParams, user: u8) -> Result<f64> {
    let der = params.derive()?;
    let om = &der.omegas;
    let floor = match user {
        1 => {
            let Some((phi1, _)) = der.branch.phi_row().and_then(|n| der.phi.row(n)) else {
                return Ok(1.0);
            };
            1.0 - G1_TERMS
                .iter()
                .map(|&(k, s)| s * (-phi1 / om.get(k)).exp())
                .sum::<f64>()
        }
        2 => {
            if der.branch.kind == BranchKind::AlwaysOutage {
                return Ok(1.0);
            }
            1.0 - (-der.phi.phi11 / om.omega2).exp()
        }
        _ => return Err(Error::domain("fpa_floor", format!("user {user} is not 1 or 2"))),
    };
    clamp_probability(floor)
}

/// `Λ_max(g)`: the gain the strong user needs when the source-relay gain is `g`.
pub fn lambda_max(params: &SystemParams, g: f64) -> Result<f64> {
    lambda_max_with(params, g, false)
}

/// [`lambda_max`] with the residual-SIC Φ matrix.
pub fn lambda_max_isic(params: &SystemParams, g: f64) -> Result<f64> {
    lambda_max_with(params, g, true)
}

fn lambda_max_with(params: &SystemParams, g: f64, isic: bool) -> Result<f64> {
    let der = params.derive()?;
    let th = &der.thresholds;
    let excess = th.snr * g - th.tau0;
    if !(excess > 0.0) {
        return Err(Error::domain(
            "lambda_max",
            format!("g = {g} must exceed tau0/P = {}", th.tau0 / th.snr),
        ));
    }
    let phi = if isic { &der.phi_isic } else { &der.phi };
    Ok((phi.phi11 + phi.phi12 / excess).max(phi.phi21 + phi.phi22 / excess))
}

/// CDF of the larger of the two estimated relay-user gains.
pub fn ordered_gain_cdf(gamma: f64, omegas: &OmegaSet) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain("ordered_gain_cdf", format!("gamma = {gamma} must be >= 0")));
    }
    let survival: f64 = G1_TERMS
        .iter()
        .map(|&(k, s)| s * (-gamma / omegas.get(k)).exp())
        .sum();
    Ok((1.0 - survival).clamp(0.0, 1.0))
}

/// `exp(-σ_e²τ/Ω₂ - τ₀d^α/P) ω K₁(ω)` with `ω = 2 sqrt(τ d^α/(ηPΩ₂))`: the
/// probability that the relay decodes and the weak gain clears `τ(σ_e² + 1/P')`.
fn weak_gain_clears(params: &SystemParams, der: &Derived, tau: f64) -> Result<f64> {
    let th = &der.thresholds;
    let dpa = params.d.powf(params.alpha);
    let omega2 = der.omegas.omega2;
    let w = 2.0 * (dpa / (params.eta * th.snr) * tau / omega2).sqrt();
    Ok((-params.sigma_e2 * tau / omega2 - th.tau0 * dpa / th.snr).exp() * x_pow_bessel_k(1, w)?)
}

/// Outage of the strong user under dynamic δ (Rayleigh only), Υ_II by an
/// order-`order` Gauss-Chebyshev rule.
pub fn dpa_outage_user1(params: &SystemParams, order: usize) -> Result<OutageEstimate> {
    require_rayleigh(params, "DPA outage")?;
    let der = params.derive()?;
    if params.eta == 0.0 {
        return OutageEstimate::certain();
    }
    let direct = weak_gain_clears(params, &der, der.thresholds.tau0)?;
    let correction = upsilon_ii_chebyshev(params, order)?;
    OutageEstimate::closed_form(1.0 - direct - correction)
}

/// Outage of the weak user under dynamic δ (Rayleigh only).
pub fn dpa_outage_user2(params: &SystemParams) -> Result<OutageEstimate> {
    require_rayleigh(params, "DPA outage")?;
    let der = params.derive()?;
    if params.eta == 0.0 {
        return OutageEstimate::certain();
    }
    OutageEstimate::closed_form(1.0 - weak_gain_clears(params, &der, der.thresholds.tau2)?)
}

/// `(i, ī)` pairs: which link is the stronger one, which the weaker.
const LINK_PAIRS: [(usize, usize); 2] = [(1, 3), (3, 1)];

/// Υ_II after the inner integral over the harvested power is closed with
/// Bessel functions, leaving a single integral over
/// `ρ ∈ (0, τ₁(1+τ₂))` evaluated with the Gauss-Chebyshev rule.
pub fn upsilon_ii_chebyshev(params: &SystemParams, order: usize) -> Result<f64> {
    require_rayleigh(params, "Upsilon_II")?;
    let der = params.derive()?;
    let rule = chebyshev_rule(order)?;
    let th = &der.thresholds;
    let om = &der.omegas;
    let se = params.sigma_e2;
    let dpa = params.d.powf(params.alpha);
    // 1/(ηPd^{-α})
    let a = dpa / (params.eta * th.snr);
    let span = th.tau1 * (1.0 + th.tau2);
    let prefactor = (-th.tau0 * dpa / th.snr).exp();

    let mut total = 0.0;
    for (i, ibar) in LINK_PAIRS {
        let (om_i, om_ibar) = (om.get(i), om.get(ibar));
        let mut failure = None;
        let integral = rule.integrate(0.0, span, |rho| {
            // H_ī(ρ): exponent rate of the weak gain plus the strong-gain threshold
            let h = (1.0 / om_ibar + span / (rho * om_i)) * (rho + th.tau2);
            let w = 2.0 * (a * h).sqrt();
            if !(w.is_finite()) {
                return 0.0;
            }
            let bessel = x_pow_bessel_k(1, w).and_then(|k1| Ok((k1, bessel_k(0, w)?)));
            match bessel {
                Ok((wk1, k0)) => (-h * se).exp() * (se * wk1 + 2.0 * a * k0),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        total += prefactor / om_ibar * integral;
    }
    Ok(total)
}

/// Υ_II by direct adaptive quadrature of its defining double integral over
/// the source-relay gain `z` and the weak relay-user gain `x`, with the
/// strong gain integrated out in closed form. Independent of the
/// Bessel/Chebyshev path.
pub fn upsilon_ii_direct(params: &SystemParams) -> Result<f64> {
    require_rayleigh(params, "Upsilon_II")?;
    let der = params.derive()?;
    let th = der.thresholds;
    let om = der.omegas;
    let se = params.sigma_e2;
    let mean_gain = params.d.powf(-params.alpha);
    let snr = th.snr;
    let eta = params.eta;
    let span = th.tau1 * (1.0 + th.tau2);

    // density of x = g₂ jointly with the survival of g₁ beyond ν
    let inner = |upsilon: f64| -> f64 {
        if !(upsilon > 0.0) || !upsilon.is_finite() {
            return 0.0;
        }
        let c = upsilon * se + 1.0;
        let s = c / upsilon;
        let (lo, hi) = (th.tau2 * s, th.tau0 * s);
        let integrand = |x: f64| -> f64 {
            let denom = upsilon * x - th.tau2 * c;
            if !(denom > 0.0) {
                return 0.0;
            }
            let nu = span * c * x / denom;
            LINK_PAIRS
                .iter()
                .map(|&(i, ibar)| {
                    let (oi, ob) = (om.get(i), om.get(ibar));
                    (-x / ob - nu / oi).exp() / ob
                })
                .sum()
        };
        quad::integrate(integrand, lo, hi, 1e-16, 1e-11, 2000).0
    };

    // z = τ₀/P - d^{-α} ln(1-u) maps the exponential law of g above τ₀/P to u ∈ (0, 1)
    let outer = |u: f64| -> f64 {
        let excess = -mean_gain * (-u).ln_1p();
        inner(eta * snr * excess)
    };
    let (value, _) = quad::integrate(outer, 0.0, 1.0, 1e-15, 1e-10, 4000);
    Ok(value * (-th.tau0 / (snr * mean_gain)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::db_to_linear;

    fn reference() -> SystemParams {
        SystemParams::default()
    }

    /// Hand-written m = 1 form: e^{-τ₀d^α/P} Σ_k (±) e^{-Φ₁/Ω_k} β_k K₁(β_k).
    fn rayleigh_user1(p: &SystemParams) -> f64 {
        let der = p.derive().unwrap();
        let n = der.branch.phi_row().unwrap();
        let (phi1, phi2) = der.phi.row(n).unwrap();
        let snr = p.snr();
        let dpa = p.d.powf(p.alpha);
        let mut s = 0.0;
        for (k, sign) in [(1, 1.0), (2, -1.0), (3, 1.0)] {
            let omega = der.omegas.get(k);
            let beta = 2.0 * (dpa / snr * phi2 / omega).sqrt();
            s += sign * (-phi1 / omega).exp() * beta * bessel_k(1, beta).unwrap();
        }
        1.0 - (-der.thresholds.tau0 * dpa / snr).exp() * s
    }

    #[test]
    fn boundary_delta_is_certain_outage() {
        for delta in [0.3, 0.4, 0.5] {
            let p = SystemParams { delta, ..reference() };
            assert_eq!(fpa_outage_user1(&p).unwrap().value, 1.0);
            assert_eq!(fpa_outage_user2(&p).unwrap().value, 1.0);
            assert_eq!(fpa_outage_user1_isic(&p).unwrap().value, 1.0);
        }
        let p = SystemParams { delta: 0.9, sigma_ic2: 0.1, ..reference() };
        assert_eq!(fpa_outage_user1_isic(&p).unwrap().value, 1.0);
        assert!(fpa_outage_user1(&p).unwrap().value < 1.0);
    }

    #[test]
    fn rayleigh_reduction() {
        for (delta, se, ps) in [(0.8, 0.001, 15.0), (0.55, 0.01, 25.0), (0.95, 0.0, 5.0)] {
            let p = SystemParams { delta, sigma_e2: se, ..reference() }.with_p_s_db(ps);
            let general = fpa_outage_user1(&p).unwrap().value;
            let special = rayleigh_user1(&p);
            assert!(((general - special) / special).abs() < 1e-12, "{general} vs {special}");
        }
    }

    #[test]
    fn zero_residual_sic_matches_perfect() {
        for delta in [0.55, 0.7, 0.8, 0.99] {
            let p = SystemParams { delta, ..reference() };
            assert_eq!(
                fpa_outage_user1(&p).unwrap().value,
                fpa_outage_user1_isic(&p).unwrap().value
            );
        }
    }

    #[test]
    fn branch_continuity_at_row_switch() {
        let base = reference();
        let der = base.derive().unwrap();
        let brk = der.branch.upper;
        let lo = SystemParams { delta: brk * (1.0 - 1e-13), ..base.clone() };
        let hi = SystemParams { delta: brk, ..base };
        assert_eq!(lo.derive().unwrap().branch.kind, BranchKind::Branch1);
        assert_eq!(hi.derive().unwrap().branch.kind, BranchKind::Branch2);
        let (a, b) = (fpa_outage_user1(&lo).unwrap().value, fpa_outage_user1(&hi).unwrap().value);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn lambda_max_selects_branch_row() {
        let p = reference();
        let der = p.derive().unwrap();
        let th = der.thresholds;
        for mult in [1.0001, 2.0, 10.0, 1e4] {
            let g = mult * th.tau0 / th.snr;
            let excess = th.snr * g - th.tau0;
            let row2 = der.phi.phi21 + der.phi.phi22 / excess;
            assert_eq!(lambda_max(&p, g).unwrap(), row2);
            assert_eq!(lambda_max_isic(&p, g).unwrap(), lambda_max(&p, g).unwrap());
        }
        assert!(lambda_max(&p, th.tau0 / th.snr).is_err());
        let b1 = SystemParams { delta: 0.52, ..reference() };
        let d1 = b1.derive().unwrap();
        let excess = th.snr * (3.0 * th.tau0 / th.snr) - th.tau0;
        assert_eq!(
            lambda_max(&b1, 3.0 * th.tau0 / th.snr).unwrap(),
            d1.phi.phi11 + d1.phi.phi12 / excess
        );
    }

    #[test]
    fn ordered_cdf_product_form() {
        let om = OmegaSet::new(1.0, 10.0, 2.0, 0.001);
        assert_eq!(ordered_gain_cdf(0.0, &om).unwrap(), 0.0);
        assert!((ordered_gain_cdf(1e4, &om).unwrap() - 1.0).abs() < 1e-15);
        for g in [0.1, 1.0, 10.0] {
            let prod = (1.0 - (-g / om.omega1).exp()) * (1.0 - (-g / om.omega3).exp());
            assert!((ordered_gain_cdf(g, &om).unwrap() - prod).abs() < 1e-14);
        }
        assert!(ordered_gain_cdf(-1.0, &om).is_err());
    }

    #[test]
    fn floors() {
        let p = reference();
        let f2 = fpa_floor(&p, 2).unwrap();
        let om2 = p.derive().unwrap().omegas.omega2;
        assert!((f2 - (1.0 - (-(0.001 / 0.6) / om2).exp())).abs() < 1e-15);
        let perfect = SystemParams { sigma_e2: 0.0, ..reference() };
        assert_eq!(fpa_floor(&perfect, 1).unwrap(), 0.0);
        assert_eq!(fpa_floor(&perfect, 2).unwrap(), 0.0);
        let high = p.clone().with_p_s_db(90.0);
        for user in [1u8, 2] {
            let closed = if user == 1 {
                fpa_outage_user1(&high).unwrap().value
            } else {
                fpa_outage_user2(&high).unwrap().value
            };
            assert!((closed - fpa_floor(&p, user).unwrap()).abs() < 1e-3);
        }
        assert!(fpa_floor(&p, 3).is_err());
    }

    #[test]
    fn user2_vanishes_with_perfect_csi_at_high_snr() {
        let p = SystemParams { sigma_e2: 0.0, ..reference() }.with_p_s_db(120.0);
        assert!(fpa_outage_user2(&p).unwrap().value < 1e-6);
        assert!(dpa_outage_user2(&p).unwrap().value < 1e-6);
    }

    #[test]
    fn dpa_requires_rayleigh() {
        let p = SystemParams { m: 2, ..reference() };
        assert!(matches!(dpa_outage_user1(&p, 30), Err(Error::Unsupported(_))));
        assert!(matches!(dpa_outage_user2(&p), Err(Error::Unsupported(_))));
        assert!(matches!(upsilon_ii_direct(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dpa_orderings() {
        let p = reference();
        let u1 = dpa_outage_user1(&p, 30).unwrap().value;
        let u2 = dpa_outage_user2(&p).unwrap().value;
        assert!(u2 <= u1);
        let lo = dpa_outage_user1(&p.clone().with_p_s_db(10.0), 30).unwrap().value;
        let hi = dpa_outage_user1(&p.clone().with_p_s_db(20.0), 30).unwrap().value;
        assert!(hi <= lo);
    }

    #[test]
    fn upsilon_vanishes_with_rate() {
        let p = SystemParams { r1: 1e-9, ..reference() };
        assert!(upsilon_ii_chebyshev(&p, 30).unwrap() < 1e-8);
        assert!(upsilon_ii_direct(&p).unwrap() < 1e-8);
    }

    #[test]
    fn upsilon_routes_agree() {
        let p = reference();
        let cheb = upsilon_ii_chebyshev(&p, 100).unwrap();
        let direct = upsilon_ii_direct(&p).unwrap();
        assert!(((cheb - direct) / direct).abs() < 1e-3, "{cheb} vs {direct}");
    }

    #[test]
    fn clamp_rules() {
        assert_eq!(clamp_probability(-5e-13).unwrap(), 0.0);
        assert!(clamp_probability(-1e-9).is_err());
        assert!(clamp_probability(f64::NAN).is_err());
        assert_eq!(clamp_probability(1.0 + 1e-13).unwrap(), 1.0);
    }

    #[test]
    fn no_harvesting_means_outage() {
        let p = SystemParams { eta: 0.0, ..reference() };
        assert_eq!(fpa_outage_user1(&p).unwrap().value, 1.0);
        assert_eq!(fpa_outage_user2(&p).unwrap().value, 1.0);
        assert_eq!(dpa_outage_user1(&p, 30).unwrap().value, 1.0);
        assert_eq!(dpa_outage_user2(&p).unwrap().value, 1.0);
    }

    #[test]
    fn reference_values_are_probabilities() {
        let p = reference();
        assert!((p.snr() - db_to_linear(45.0)).abs() < 1e-8);
        for v in [
            fpa_outage_user1(&p).unwrap().value,
            fpa_outage_user2(&p).unwrap().value,
            dpa_outage_user1(&p, 30).unwrap().value,
            dpa_outage_user2(&p).unwrap().value,
        ] {
            assert!(v > 0.0 && v < 1.0);
        }
    }
}
