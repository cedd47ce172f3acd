use crate::model::GradMat;

/// `ℓ_μ(z) = (μ² + |z|²)^{1/2}`.
pub fn ell_mu(mu: f64, z: &GradMat) -> f64 {
    (mu * mu + z.norm_sq()).sqrt()
}

/// `ℓ_μ` of a plain vector.
pub fn ell_mu_vec(mu: f64, z: &[f64]) -> f64 {
    (mu * mu + z.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// `V_{μ,γ}(z) = (μ² + |z|²)^{(γ-2)/4} z`, with `V(0) = 0` in the degenerate case.
pub fn v_map(mu: f64, gamma: f64, z: &GradMat) -> GradMat {
    let l2 = mu * mu + z.norm_sq();
    if l2 == 0.0 {
        return z.clone();
    }
    z.scale(l2.powf((gamma - 2.0) / 4.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_examples() {
        assert_eq!(ell_mu(0.0, &GradMat::zeros(1, 2)), 0.0);
        assert_eq!(ell_mu(1.0, &GradMat::zeros(2, 2)), 1.0);
        let z = GradMat::row(&[1.0, 1.0, 1.0]);
        assert_eq!(ell_mu(1.0, &z), 2.0);
    }

    #[test]
    fn v_examples() {
        let z = GradMat::row(&[0.3, -2.0]);
        for mu in [0.0, 0.5, 1.0] {
            assert_eq!(v_map(mu, 2.0, &z), z);
        }
        let e = GradMat::row(&[1.0, 0.0]);
        assert_eq!(v_map(0.0, 4.0, &e), e);
        let v = v_map(1.0, 4.0, &e);
        assert!((v.get(0, 0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(v_map(0.0, 1.5, &GradMat::zeros(1, 2)), GradMat::zeros(1, 2));
    }
}
