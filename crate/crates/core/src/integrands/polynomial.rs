use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Degree cap for stored forms.
pub const MAX_DEGREE: usize = 10;
/// Entry cap for a dense coefficient tensor.
pub const MAX_TENSOR_ENTRIES: usize = 1 << 24;

/// Homogeneous polynomial `P_s(z) = T[z, ..., z]` on `ℝ^dim`, with `T` a dense
/// symmetric `s`-linear tensor (last index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousForm {
    degree: usize,
    dim: usize,
    tensor: Vec<f64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl HomogeneousForm {
    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidIntegrand(format!(
                "degree {degree} exceeds cap {MAX_DEGREE}"
            )));
        }
        let size = (dim as f64).powi(degree as i32);
        if size > MAX_TENSOR_ENTRIES as f64 {
            return Err(Error::InvalidIntegrand(format!(
                "tensor of dimension {dim} and degree {degree} is too large"
            )));
        }
        Ok(Self {
            degree,
            dim,
            tensor: vec![0.0; dim.pow(degree as u32)],
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.iter().all(|&c| c == 0.0)
    }

    /// Adds `coeff · Π z_k^{e_k}`, spreading it evenly over the index tuples
    /// with matching multiplicities.
    pub fn add_monomial(&mut self, coeff: f64, exps: &[usize]) -> Result<()> {
        if exps.len() != self.dim || exps.iter().sum::<usize>() != self.degree {
            return Err(Error::InvalidIntegrand(
                "monomial does not match form shape".into(),
            ));
        }
        if !coeff.is_finite() {
            return Err(Error::NonFinite("monomial coefficient".into()));
        }
        let share = coeff * exps.iter().map(|&e| factorial(e)).product::<f64>()
            / factorial(self.degree);
        let mut counts = vec![0usize; self.dim];
        for (idx, t) in self.tensor.iter_mut().enumerate() {
            counts.iter_mut().for_each(|c| *c = 0);
            let mut rest = idx;
            for _ in 0..self.degree {
                counts[rest % self.dim] += 1;
                rest /= self.dim;
            }
            if counts == exps {
                *t += share;
            }
        }
        Ok(())
    }

    /// Contracts the last `k` tensor slots against `z`.
    fn contract(&self, z: &[f64], k: usize) -> Vec<f64> {
        let mut v = self.tensor.clone();
        for _ in 0..k {
            v = v
                .chunks_exact(self.dim)
                .map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum())
                .collect();
        }
        v
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.contract(z, self.degree)[0]
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        if self.degree == 0 {
            return vec![0.0; self.dim];
        }
        let s = self.degree as f64;
        self.contract(z, self.degree - 1)
            .into_iter()
            .map(|x| s * x)
            .collect()
    }

    pub fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        if self.degree < 2 {
            return DMatrix::zeros(self.dim, self.dim);
        }
        let s = self.degree as f64;
        let v = self.contract(z, self.degree - 2);
        DMatrix::from_row_slice(self.dim, self.dim, &v) * (s * (s - 1.0))
    }
}

/// General polynomial as a sum of homogeneous components.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    components: BTreeMap<usize, HomogeneousForm>,
}

impl Polynomial {
    /// Builds from `(coeff, exponents)` monomials on `ℝ^dim`.
    pub fn from_monomials(dim: usize, monomials: &[(f64, Vec<usize>)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidIntegrand("polynomial dimension is 0".into()));
        }
        let mut components: BTreeMap<usize, HomogeneousForm> = BTreeMap::new();
        for (coeff, exps) in monomials {
            let s: usize = exps.iter().sum();
            if !components.contains_key(&s) {
                components.insert(s, HomogeneousForm::zero(dim, s)?);
            }
            components.get_mut(&s).unwrap().add_monomial(*coeff, exps)?;
        }
        components.retain(|_, f| !f.is_zero());
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> impl Iterator<Item = &HomogeneousForm> {
        self.components.values()
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.components().map(|f| f.eval(z)).sum()
    }
}

/// Polynomial whose nonzero homogeneous components all have even degree.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenPolynomial {
    dim: usize,
    components: Vec<HomogeneousForm>,
}

impl EvenPolynomial {
    pub fn new(poly: Polynomial) -> Result<Self> {
        if let Some(f) = poly.components().find(|f| f.degree() % 2 == 1) {
            return Err(Error::NotEven(f.degree()));
        }
        Ok(Self {
            dim: poly.dim,
            components: poly.components.into_values().collect(),
        })
    }

    pub fn from_monomials(dim: usize, monomials: &[(f64, Vec<usize>)]) -> Result<Self> {
        Self::new(Polynomial::from_monomials(dim, monomials)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Components in increasing degree.
    pub fn components(&self) -> &[HomogeneousForm] {
        &self.components
    }

    pub fn degree(&self) -> usize {
        self.components.last().map_or(0, |f| f.degree())
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.components.iter().map(|f| f.eval(z)).sum()
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for f in &self.components {
            for (gi, x) in g.iter_mut().zip(f.gradient(z)) {
                *gi += x;
            }
        }
        g
    }

    pub fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for f in &self.components {
            h += f.hessian(z);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_spreading_matches_direct_evaluation() {
        // 3 z0^2 z1 - z1^3 + 2 z0 z1 z2
        let mut f = HomogeneousForm::zero(3, 3).unwrap();
        f.add_monomial(3.0, &[2, 1, 0]).unwrap();
        f.add_monomial(-1.0, &[0, 3, 0]).unwrap();
        f.add_monomial(2.0, &[1, 1, 1]).unwrap();
        let z: [f64; 3] = [0.7, -1.3, 0.4];
        let direct = 3.0 * z[0] * z[0] * z[1] - z[1].powi(3) + 2.0 * z[0] * z[1] * z[2];
        assert!((f.eval(&z) - direct).abs() < 1e-13);
        let g = f.gradient(&z);
        let dg = [
            6.0 * z[0] * z[1] + 2.0 * z[1] * z[2],
            3.0 * z[0] * z[0] - 3.0 * z[1] * z[1] + 2.0 * z[0] * z[2],
            2.0 * z[0] * z[1],
        ];
        for k in 0..3 {
            assert!((g[k] - dg[k]).abs() < 1e-13);
        }
        let h = f.hessian(&z);
        assert!((h[(0, 1)] - (6.0 * z[0] + 2.0 * z[2])).abs() < 1e-13);
        assert!((h[(1, 1)] - (-6.0 * z[1])).abs() < 1e-13);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
    }

    #[test]
    fn odd_component_is_rejected() {
        let p = Polynomial::from_monomials(2, &[(1.0, vec![2, 0]), (1.0, vec![3, 0])]).unwrap();
        assert_eq!(EvenPolynomial::new(p), Err(Error::NotEven(3)));
        // cancelling odd terms leave nothing behind
        let p = Polynomial::from_monomials(2, &[(1.0, vec![3, 0]), (-1.0, vec![3, 0])]).unwrap();
        assert!(EvenPolynomial::new(p).is_ok());
    }

    #[test]
    fn size_caps() {
        assert!(HomogeneousForm::zero(2, 12).is_err());
        assert!(HomogeneousForm::zero(9, 10).is_err());
        assert!(HomogeneousForm::zero(4, 10).is_ok());
    }
}
