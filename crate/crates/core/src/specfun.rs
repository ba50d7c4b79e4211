//! Special-function kernel: modified Bessel functions of the second kind at
//! integer order, factorial-valued gamma, binomial coefficients and the
//! Gauss-Chebyshev rule used for the dynamic-power-allocation correction term.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument `K_0`/`K_1` come from their power series, above it
/// from Steed's continued fraction.
const SERIES_CROSSOVER: f64 = 2.0;

const MAX_ITER: usize = 10_000;

/// `K_v(z)` for non-negative integer order `v` and `z > 0`.
///
/// Results smaller than the smallest normal `f64` are flushed to `0.0`.
pub fn bessel_k(order: u32, z: f64) -> Result<f64> {
    check_arg("bessel_k", z)?;
    let (k0, k1, log_scale) = k0_k1(z);
    let scaled = match order {
        0 => k0,
        1 => k1,
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for v in 1..order {
                let next = prev + (2.0 * v as f64 / z) * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    };
    Ok(unscale(scaled, log_scale))
}

/// `z^v K_v(z)`, finite on the closed half-line for `v >= 1`.
///
/// Evaluated through the recurrence `P_{v+1} = z² P_{v-1} + 2v P_v` on the
/// products themselves, so no intermediate overflows for tiny `z`. At `z = 0`
/// the limit `2^{v-1} (v-1)!` is returned; at `z = +inf` the result is `0`.
pub fn x_pow_bessel_k(order: u32, z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::domain("x_pow_bessel_k", format!("argument {z} must be >= 0")));
    }
    if order == 0 {
        return if z == 0.0 {
            Err(Error::domain("x_pow_bessel_k", "K_0 diverges at 0"))
        } else {
            bessel_k(0, z)
        };
    }
    if z == 0.0 {
        return Ok(2f64.powi(order as i32 - 1) * gamma_int(order)?);
    }
    if z == f64::INFINITY {
        return Ok(0.0);
    }
    let (k0, k1, log_scale) = k0_k1(z);
    let z2 = z * z;
    let (mut prev, mut cur) = (k0, z * k1);
    for v in 1..order {
        let next = z2 * prev + 2.0 * v as f64 * cur;
        prev = cur;
        cur = next;
    }
    Ok(unscale(cur, log_scale))
}

fn check_arg(func: &'static str, z: f64) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::domain(func, format!("argument {z} is not finite")));
    }
    if z <= 0.0 {
        return Err(Error::domain(func, format!("argument {z} must be > 0")));
    }
    Ok(())
}

/// Returns `(K_0, K_1, s)` where the true values are the first two entries
/// times `exp(-s)`; `s` is zero on the series branch.
fn k0_k1(z: f64) -> (f64, f64, f64) {
    if z <= SERIES_CROSSOVER {
        let (k0, k1) = k0_k1_series(z);
        (k0, k1, 0.0)
    } else {
        let (k0, k1) = k0_k1_scaled_cf(z);
        (k0, k1, z)
    }
}

fn unscale(value: f64, log_scale: f64) -> f64 {
    let out = if log_scale == 0.0 {
        value
    } else {
        (value.ln() - log_scale).exp()
    };
    if out < f64::MIN_POSITIVE {
        0.0
    } else {
        out
    }
}

fn k0_k1_series(z: f64) -> (f64, f64) {
    let t = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // K_0 = -(ln(z/2) + γ) I_0 + Σ_{k≥1} t^k/(k!)² H_k
    let mut term = 1.0; // t^k / (k!)^2
    let mut i0 = 1.0;
    let mut tail0 = 0.0;
    let mut harmonic = 0.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= t / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail0 += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + tail0;

    // K_1 = 1/z + ln(z/2) I_1 - (z/4) Σ_{k≥0} t^k/(k!(k+1)!) (ψ(k+1) + ψ(k+2))
    let mut term = 1.0; // t^k / (k! (k+1)!)
    let mut i1_sum = 1.0;
    let mut h_k = 0.0; // H_k
    let mut psi_sum = (-EULER_GAMMA) + (1.0 - EULER_GAMMA);
    let mut tail1 = psi_sum;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= t / (kf * (kf + 1.0));
        h_k += 1.0 / kf;
        let h_k1 = h_k + 1.0 / (kf + 1.0);
        psi_sum = (h_k - EULER_GAMMA) + (h_k1 - EULER_GAMMA);
        i1_sum += term;
        tail1 += term * psi_sum;
        if term < 1e-18 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * z * i1_sum;
    let k1 = 1.0 / z + log_half * i1 - 0.25 * z * tail1;
    (k0, k1)
}

/// Steed's continued fraction (order zero) for `e^z K_0(z)` and `e^z K_1(z)`.
fn k0_k1_scaled_cf(z: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

/// `Γ(m) = (m-1)!` for positive integer `m`.
pub fn gamma_int(m: u32) -> Result<f64> {
    if m < 1 {
        return Err(Error::domain("gamma_int", "argument must be >= 1"));
    }
    Ok((1..m).map(f64::from).product())
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Err(Error::domain("binomial", format!("k = {k} exceeds n = {n}")));
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) / i stays integral at every step
        acc = acc * (n as u128 - k as u128 + i) / i;
        if acc > u64::MAX as u128 {
            return Err(Error::domain("binomial", format!("C({n}, {k}) overflows u64")));
        }
    }
    Ok(acc as u64)
}

/// Gauss-Chebyshev nodes `t_j = cos((2j-1)π/(2J))` with weights
/// `(π/J)|sin((2j-1)π/(2J))|`, i.e. the first-kind rule with the
/// `sqrt(1 - t²)` factor folded into the weights so it applies to an
/// unweighted integrand.
///
/// The rule is not exact for polynomials: a constant integrand on
/// `[-1, 1]` comes out as `2 x (π/2J) / sin(π/2J)`, which approaches 2 as
/// `O(J^-2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebyshevRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Approximates `∫_a^b f(ρ) dρ` as `((b-a)/2) Σ w_j f(ρ_j)` with
    /// `ρ_j = a + ((b-a)/2)(1 + t_j)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(a + half * (1.0 + t)))
            .sum();
        half * sum
    }
}

pub fn chebyshev_rule(order: usize) -> Result<ChebyshevRule> {
    if order < 1 {
        return Err(Error::domain("chebyshev_rule", "order must be >= 1"));
    }
    let jf = order as f64;
    let (nodes, weights) = (1..=order)
        .map(|j| {
            let theta = (2 * j - 1) as f64 * PI / (2.0 * jf);
            (theta.cos(), PI / jf * theta.sin().abs())
        })
        .unzip();
    Ok(ChebyshevRule { nodes, weights })
}
