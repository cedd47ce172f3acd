use crate::error::{Error, Result};
use crate::model::Regime;

/// Exponents `λ, β₀, α₀, κ₁, κ₂, b` of the higher differentiability estimate
/// for a chosen Sobolev exponent `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentChain {
    pub regime: Regime,
    pub sobolev_exp: f64,
    pub lambda: f64,
    pub beta0: f64,
    pub alpha0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub b: f64,
}

pub fn hd_exponents(r: &Regime, s: f64) -> Result<ExponentChain> {
    r.check()?;
    let (n, p, q) = (r.n as f64, r.p, r.q);
    if !(s > 2.0 && s.is_finite()) {
        return Err(Error::InadmissibleSobolevExponent(s));
    }
    let lambda = (p * s - 2.0 * q) / (p * (s - 2.0));
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InadmissibleSobolevExponent(s));
    }
    let beta0 = p * (1.0 - lambda) / (2.0 * q) * (n - 1.0 - s * (n - 3.0) / 2.0);
    let kappa2 = (q - p) / (lambda * p);
    Ok(ExponentChain {
        regime: *r,
        sobolev_exp: s,
        lambda,
        beta0,
        alpha0: 2.0 * q * beta0 / (lambda * p),
        kappa1: (3.0 * q - p) / (lambda * p),
        kappa2,
        b: kappa2 + 1.0,
    })
}

/// Parameters of the Moser iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserParams {
    pub alpha0: f64,
    pub gamma: f64,
    pub c0: f64,
    pub big_m: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl MoserParams {
    pub fn new(alpha0: f64, gamma: f64, c0: f64, big_m: f64, tau1: f64, tau2: f64) -> Result<Self> {
        let ok = alpha0 >= -1.0
            && alpha0.is_finite()
            && gamma > 0.0
            && gamma < 1.0
            && c0 >= 1.0
            && big_m >= 1.0
            && c0.is_finite()
            && big_m.is_finite()
            && tau2 >= 0.125
            && tau2 < tau1
            && tau1 <= 1.0;
        if !ok {
            return Err(Error::Domain(format!(
                "moser parameters out of range: alpha0={alpha0}, gamma={gamma}, c0={c0}, M={big_m}, tau=({tau1},{tau2})"
            )));
        }
        Ok(Self {
            alpha0,
            gamma,
            c0,
            big_m,
            tau1,
            tau2,
        })
    }
}

/// `(n−3)/(n−1)` for `n ≥ 4`; `p/(2q)` otherwise.
pub fn moser_gamma(r: &Regime) -> f64 {
    if r.n >= 4 {
        (r.n as f64 - 3.0) / (r.n as f64 - 1.0)
    } else {
        r.p / (2.0 * r.q)
    }
}

/// `α_i = (2+α₀)/γ^i − 2`.
pub fn moser_alpha_sequence(params: &MoserParams, i: u32) -> f64 {
    (2.0 + params.alpha0) / params.gamma.powi(i as i32) - 2.0
}

/// `𝙰_α`: 1 at `α = α₀`, `(α+2)/(α+1)` above.
pub fn a_alpha(alpha: f64, alpha0: f64) -> f64 {
    if alpha == alpha0 {
        1.0
    } else {
        (alpha + 2.0) / (alpha + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserBound {
    pub value: f64,
    /// τ-free constant of the limit product.
    pub c: f64,
    /// Exponent of `1/(τ₁−τ₂)`.
    pub a0: f64,
    /// `γ/((2+α₀)(1−γ))`.
    pub m_exponent: f64,
    pub terms: usize,
}

/// Weight of step `m` in the limit product, after reindexing `m = i − k`.
fn step_weight(p: &MoserParams, m: u32) -> f64 {
    p.gamma.powi(m as i32) / ((1.0 - p.gamma) * (2.0 + p.alpha0))
}

fn step_log(p: &MoserParams, m: u32) -> f64 {
    let e = (p.gamma + 1.0) / p.gamma;
    let alpha = moser_alpha_sequence(p, m);
    p.c0.ln()
        + 2.0 * a_alpha(alpha, p.alpha0).ln()
        + e * (m as f64 * std::f64::consts::LN_2 - (p.tau1 - p.tau2).ln())
}

/// Log of the finite product at iteration `i`, the per-step constant taken as `c₀`.
pub fn moser_log_product(p: &MoserParams, i: u32) -> f64 {
    let tail = p.gamma.powi(i as i32 + 1) / ((1.0 - p.gamma) * (2.0 + p.alpha0));
    (1..=i)
        .map(|m| (step_weight(p, m) - tail) * step_log(p, m))
        .sum()
}

/// Limit `i → ∞` of the iterated bound, `c M^{γ/((2+α₀)(1−γ))} (τ₁−τ₂)^{−a₀} V0^{2/(α₀+2)}`.
pub fn moser_bound(p: &MoserParams, v0: f64) -> Result<MoserBound> {
    if !(v0 >= 0.0 && v0.is_finite()) {
        return Err(Error::Domain(format!("V0 = {v0} must be finite and >= 0")));
    }
    let e = (p.gamma + 1.0) / p.gamma;
    let mut log_c = 0.0;
    let mut terms = 0;
    for m in 1.. {
        let w = step_weight(p, m);
        let t = w * (step_log(p, m) + e * (p.tau1 - p.tau2).ln());
        log_c += t;
        terms = m as usize;
        if t.abs() < 1e-15 && w < 1e-15 {
            break;
        }
    }
    let a0 = (p.gamma + 1.0) / ((1.0 - p.gamma).powi(2) * (2.0 + p.alpha0));
    let m_exponent = p.gamma / ((2.0 + p.alpha0) * (1.0 - p.gamma));
    let c = log_c.exp();
    let value = c * p.big_m.powf(m_exponent) / (p.tau1 - p.tau2).powf(a0)
        * v0.powf(2.0 / (p.alpha0 + 2.0));
    Ok(MoserBound {
        value,
        c,
        a0,
        m_exponent,
        terms,
    })
}
