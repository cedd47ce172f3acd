use crate::error::{Error, Result};
use crate::integrands::ell_mu;
use crate::model::{GradMat, Regime};

/// The weights `𝙻(z) = ℓ_μ(z)^p` and `𝚕_α(z) = 𝙻(z)^{(α+2)/2} + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserWeight {
    pub regime: Regime,
    pub alpha: f64,
}

impl MoserWeight {
    pub fn new(regime: Regime, alpha: f64) -> Result<Self> {
        if !(alpha >= -1.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha = {alpha} must be >= -1")));
        }
        Ok(Self { regime, alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserWeightValue {
    pub big_l: f64,
    pub l_alpha: f64,
    /// `c` with `∂𝚕_α/∂z = c·z`, so that `∇(𝚕_α(∇w)) = c Σ_s ∂_s w ∇∂_s w`.
    pub grad_factor: f64,
}

pub fn moser_weight_eval(w: &MoserWeight, z: &GradMat) -> MoserWeightValue {
    let (mu, p, alpha) = (w.regime.mu, w.regime.p, w.alpha);
    let ell = ell_mu(mu, z);
    let big_l = ell.powf(p);
    let e = (alpha + 2.0) / 2.0;
    let grad_factor = if ell == 0.0 {
        0.0
    } else {
        e * big_l.powf(alpha / 2.0) * p * ell.powf(p - 2.0)
    };
    MoserWeightValue {
        big_l,
        l_alpha: big_l.powf(e) + 1.0,
        grad_factor,
    }
}
