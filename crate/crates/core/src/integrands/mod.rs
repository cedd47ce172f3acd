//! Integrands `F`, their first and second derivatives, and the V-maps.

mod builtin;
mod fd;
mod moser;
mod polynomial;
mod vmap;

pub use builtin::{builtin, builtins, marcellini_polynomial, Builtin};
pub use fd::{fd_check, FdCheck};
pub use moser::{moser_weight_eval, MoserWeight, MoserWeightValue};
pub use polynomial::{EvenPolynomial, HomogeneousForm, Polynomial, MAX_DEGREE};
pub use vmap::{ell_mu, ell_mu_vec, v_map};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::GradMat;

/// Symmetric bilinear form on `ℝ^{N×n}`, indexed by the row-major entry
/// order of [`GradMat`].
pub type Hessian = DMatrix<f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum IntegrandSpec {
    /// `ℓ_μ(z)^p`.
    PowerNorm { mu: f64, p: f64 },
    /// `|z e_axis|^q`, the power of one gradient column (0-based axis).
    AxisPower { axis: usize, q: f64 },
    EvenPolynomial(EvenPolynomial),
    Sum(Vec<IntegrandSpec>),
    Scaled { coeff: f64, inner: Box<IntegrandSpec> },
}

impl IntegrandSpec {
    pub fn power(mu: f64, p: f64) -> Self {
        Self::PowerNorm { mu, p }
    }

    pub fn axis(axis: usize, q: f64) -> Self {
        Self::AxisPower { axis, q }
    }

    pub fn scaled(coeff: f64, inner: Self) -> Self {
        Self::Scaled {
            coeff,
            inner: Box::new(inner),
        }
    }

    /// Structural validity independent of the matrix shape.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidIntegrand(m));
        match self {
            Self::PowerNorm { mu, p } => {
                if !(mu.is_finite() && *mu >= 0.0 && p.is_finite() && *p >= 2.0) {
                    return bad(format!("power(mu={mu}, p={p}) needs mu >= 0, p >= 2"));
                }
            }
            Self::AxisPower { q, .. } => {
                if !(q.is_finite() && *q >= 2.0) {
                    return bad(format!("axis power q={q} needs q >= 2"));
                }
            }
            Self::EvenPolynomial(_) => {}
            Self::Sum(terms) => {
                if terms.is_empty() {
                    return bad("empty sum".into());
                }
                for t in terms {
                    t.validate()?;
                }
            }
            Self::Scaled { coeff, inner } => {
                if !(coeff.is_finite() && *coeff >= 0.0) {
                    return bad(format!("coefficient {coeff} must be finite and >= 0"));
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// Validity for gradients of shape `(N, n)`.
    pub fn validate_for(&self, shape: (usize, usize)) -> Result<()> {
        self.validate()?;
        self.check_shape(shape)
    }

    fn check_shape(&self, shape: (usize, usize)) -> Result<()> {
        match self {
            Self::AxisPower { axis, .. } if *axis >= shape.1 => Err(Error::InvalidIntegrand(
                format!("axis index {} exceeds n = {}", axis + 1, shape.1),
            )),
            Self::EvenPolynomial(p) if p.dim() != shape.0 * shape.1 => Err(Error::ShapeMismatch {
                expected: shape,
                got: (1, p.dim()),
            }),
            Self::Sum(terms) => terms.iter().try_for_each(|t| t.check_shape(shape)),
            Self::Scaled { inner, .. } => inner.check_shape(shape),
            _ => Ok(()),
        }
    }

    /// Adds `scale · F`, `scale · F'` and `scale · F''` into the optional sinks.
    fn accumulate(
        &self,
        z: &GradMat,
        scale: f64,
        val: &mut f64,
        mut grad: Option<&mut [f64]>,
        mut hess: Option<&mut Hessian>,
    ) {
        match self {
            Self::PowerNorm { mu, p } => {
                let l2 = mu * mu + z.norm_sq();
                let l = l2.sqrt();
                *val += scale * l.powf(*p);
                if l == 0.0 {
                    // only reachable for mu = 0, z = 0
                    if *p == 2.0 {
                        if let Some(h) = hess {
                            for k in 0..z.len() {
                                h[(k, k)] += 2.0 * scale;
                            }
                        }
                    }
                    return;
                }
                let a = p * l.powf(p - 2.0);
                if let Some(g) = grad.as_deref_mut() {
                    for (gi, zi) in g.iter_mut().zip(z.as_slice()) {
                        *gi += scale * a * zi;
                    }
                }
                if let Some(h) = hess {
                    // p(p-2) ℓ^{p-4} z⊗z written via the unit vector to avoid overflow
                    let b = p * (p - 2.0) * l.powf(p - 2.0);
                    let zs = z.as_slice();
                    for k in 0..zs.len() {
                        h[(k, k)] += scale * a;
                        let uk = zs[k] / l;
                        for j in 0..zs.len() {
                            h[(k, j)] += scale * b * uk * zs[j] / l;
                        }
                    }
                }
            }
            Self::AxisPower { axis, q } => {
                let (rows, cols) = z.shape();
                let w = z.column(*axis);
                let r2: f64 = w.iter().map(|x| x * x).sum();
                let r = r2.sqrt();
                *val += scale * r.powf(*q);
                let idx = |a: usize| a * cols + axis;
                if r == 0.0 {
                    if *q == 2.0 {
                        if let Some(h) = hess {
                            for a in 0..rows {
                                h[(idx(a), idx(a))] += 2.0 * scale;
                            }
                        }
                    }
                    return;
                }
                let a_ = q * r.powf(q - 2.0);
                if let Some(g) = grad.as_deref_mut() {
                    for (a, wa) in w.iter().enumerate() {
                        g[idx(a)] += scale * a_ * wa;
                    }
                }
                if let Some(h) = hess {
                    let b = q * (q - 2.0) * r.powf(q - 2.0);
                    for a in 0..rows {
                        h[(idx(a), idx(a))] += scale * a_;
                        for c in 0..rows {
                            h[(idx(a), idx(c))] += scale * b * (w[a] / r) * (w[c] / r);
                        }
                    }
                }
            }
            Self::EvenPolynomial(poly) => {
                let zs = z.as_slice();
                *val += scale * poly.eval(zs);
                if let Some(g) = grad.as_deref_mut() {
                    for (gi, x) in g.iter_mut().zip(poly.gradient(zs)) {
                        *gi += scale * x;
                    }
                }
                if let Some(h) = hess {
                    *h += poly.hessian(zs) * scale;
                }
            }
            Self::Sum(terms) => {
                for t in terms {
                    t.accumulate(z, scale, val, grad.as_deref_mut(), hess.as_deref_mut());
                }
            }
            Self::Scaled { coeff, inner } => inner.accumulate(z, scale * coeff, val, grad, hess),
        }
    }

    pub fn eval(&self, z: &GradMat) -> Result<f64> {
        self.check_shape(z.shape())?;
        let mut v = 0.0;
        self.accumulate(z, 1.0, &mut v, None, None);
        Ok(v)
    }

    pub fn gradient(&self, z: &GradMat) -> Result<GradMat> {
        self.check_shape(z.shape())?;
        let mut g = GradMat::zeros(z.rows(), z.cols());
        let mut v = 0.0;
        self.accumulate(z, 1.0, &mut v, Some(g.as_mut_slice()), None);
        Ok(g)
    }

    pub fn hessian(&self, z: &GradMat) -> Result<Hessian> {
        self.check_shape(z.shape())?;
        let mut h = Hessian::zeros(z.len(), z.len());
        let mut v = 0.0;
        self.accumulate(z, 1.0, &mut v, None, Some(&mut h));
        Ok(h)
    }

    /// Value, gradient and hessian in one pass.
    pub fn eval_all(&self, z: &GradMat) -> Result<(f64, GradMat, Hessian)> {
        self.check_shape(z.shape())?;
        let mut g = GradMat::zeros(z.rows(), z.cols());
        let mut h = Hessian::zeros(z.len(), z.len());
        let mut v = 0.0;
        self.accumulate(z, 1.0, &mut v, Some(g.as_mut_slice()), Some(&mut h));
        Ok((v, g, h))
    }

    /// Value and gradient in one pass.
    pub fn eval_grad(&self, z: &GradMat) -> Result<(f64, GradMat)> {
        self.check_shape(z.shape())?;
        let mut g = GradMat::zeros(z.rows(), z.cols());
        let mut v = 0.0;
        self.accumulate(z, 1.0, &mut v, Some(g.as_mut_slice()), None);
        Ok((v, g))
    }
}

impl std::ops::Add for IntegrandSpec {
    type Output = IntegrandSpec;
    fn add(self, rhs: Self) -> Self {
        match self {
            Self::Sum(mut terms) => {
                terms.push(rhs);
                Self::Sum(terms)
            }
            lhs => Self::Sum(vec![lhs, rhs]),
        }
    }
}
