//! Ellipticity analysis, Legendre (p,q)-growth certification, polynomial
//! certificates and the Gehring exponent.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrands::{ell_mu, EvenPolynomial, HomogeneousForm, IntegrandSpec, Polynomial};
use crate::model::{GradMat, Regime};
use crate::sampling::{log_radius_point, random_direction, seeded};

/// Smallest sampled radius.
pub const MIN_SAMPLE_RADIUS: f64 = 1e-3;
/// Default sphere sample count for δ estimates.
pub const SPHERE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigs {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

pub fn sym_eigs(h: &DMatrix<f64>) -> Result<Eigs> {
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("hessian".into()));
    }
    let e = SymmetricEigen::new(h.clone()).eigenvalues;
    Ok(Eigs {
        lambda_min: e.min(),
        lambda_max: e.max(),
    })
}

pub fn ellipticity_eigs(f: &IntegrandSpec, z: &GradMat) -> Result<Eigs> {
    sym_eigs(&f.hessian(z)?)
}

pub fn ellipticity_ratio(f: &IntegrandSpec, z: &GradMat) -> Result<f64> {
    let e = ellipticity_eigs(f, z)?;
    if e.lambda_min <= 0.0 {
        return Err(Error::DegeneratePoint);
    }
    Ok(e.lambda_max / e.lambda_min)
}

/// Empirical Legendre (p,q)-growth certificate. All constants are sampled
/// suprema, not proofs.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreCertificate {
    pub regime: Regime,
    /// `sup |F''(z)| / (1 + |F'(z)|^{(q−2)/(q−1)})`.
    pub constant_assf3: f64,
    /// `sup (|F''(z)| / ℓ_μ(z)^{p−2}) / (1 + |F'(z)|^{(q−p)/(q−1)})`.
    pub constant_assf1: f64,
    /// `sup ℓ_μ(z)^{p−2} / λ_min(F''(z))`, the inverse lower ellipticity.
    pub constant_lower: f64,
    pub samples: usize,
    /// Maximizers of the two upper constants.
    pub worst_points: Vec<GradMat>,
    pub delta: Option<f64>,
}

impl LegendreCertificate {
    /// The upper bound holds with the regime's `L`.
    pub fn certifies(&self) -> bool {
        self.constant_assf3 <= self.regime.l && self.constant_lower <= self.regime.l
    }
}

struct PointStats {
    assf3: f64,
    assf1: f64,
    lower: f64,
    z: GradMat,
}

fn point_stats(f: &IntegrandSpec, r: &Regime, z: GradMat) -> Result<PointStats> {
    let (_, g, h) = f.eval_all(&z)?;
    let e = sym_eigs(&h)?;
    let norm_h = e.lambda_max.abs().max(e.lambda_min.abs());
    let gn = g.norm();
    let ell = ell_mu(r.mu, &z);
    Ok(PointStats {
        assf3: norm_h / (1.0 + gn.powf((r.q - 2.0) / (r.q - 1.0))),
        assf1: norm_h / ell.powf(r.p - 2.0) / (1.0 + gn.powf((r.q - r.p) / (r.q - 1.0))),
        lower: if e.lambda_min > 0.0 {
            ell.powf(r.p - 2.0) / e.lambda_min
        } else {
            f64::INFINITY
        },
        z,
    })
}

fn sample_points(shape: (usize, usize), n: usize, radius: f64, seed: u64) -> Vec<GradMat> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| log_radius_point(&mut rng, shape, MIN_SAMPLE_RADIUS, radius))
        .collect()
}

/// Samples `z` with log-uniform `|z| ∈ [1e−3, radius]` and records the upper
/// constants. The lower bound `⟨F''(z)ξ,ξ⟩ ≥ L⁻¹ℓ_μ(z)^{p−2}|ξ|²` is checked over
/// all directions at once through the smallest eigenvalue.
pub fn check_legendre(
    f: &IntegrandSpec,
    r: &Regime,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> Result<LegendreCertificate> {
    r.require_strict()?;
    if n_samples == 0 || !(radius > MIN_SAMPLE_RADIUS) {
        return Err(Error::Domain(
            "need at least one sample and radius above 1e-3".into(),
        ));
    }
    f.validate_for(r.shape())?;
    let stats: Vec<PointStats> = sample_points(r.shape(), n_samples, radius, seed)
        .into_par_iter()
        .map(|z| point_stats(f, r, z))
        .collect::<Result<_>>()?;
    let mut cert = LegendreCertificate {
        regime: *r,
        constant_assf3: 0.0,
        constant_assf1: 0.0,
        constant_lower: 0.0,
        samples: n_samples,
        worst_points: vec![stats[0].z.clone(), stats[0].z.clone()],
        delta: None,
    };
    for s in &stats {
        if s.lower > r.l {
            return Err(Error::NotElliptic {
                ratio: s.lower,
                witness: s.z.clone(),
            });
        }
        cert.constant_lower = cert.constant_lower.max(s.lower);
        if s.assf3 > cert.constant_assf3 {
            cert.constant_assf3 = s.assf3;
            cert.worst_points[0] = s.z.clone();
        }
        if s.assf1 > cert.constant_assf1 {
            cert.constant_assf1 = s.assf1;
            cert.worst_points[1] = s.z.clone();
        }
    }
    Ok(cert)
}

/// Smallest `L` for which the lower bound, the upper hessian bound and the
/// growth sandwich `L⁻¹ℓ_μ^p ≤ F ≤ Lℓ_μ^p + Lℓ_μ^q` hold on the samples.
pub fn empirical_structural_constant(
    f: &IntegrandSpec,
    r: &Regime,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> Result<f64> {
    f.validate_for(r.shape())?;
    let consts: Vec<f64> = sample_points(r.shape(), n_samples, radius, seed)
        .into_par_iter()
        .map(|z| -> Result<f64> {
            let v = f.eval(&z)?;
            let ell = ell_mu(r.mu, &z);
            let s = point_stats(f, r, z)?;
            let below = ell.powf(r.p) / v;
            let above = v / (ell.powf(r.p) + ell.powf(r.q));
            Ok(s.assf3.max(s.lower).max(below).max(above))
        })
        .collect::<Result<_>>()?;
    Ok(consts.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedComponent {
    pub degree: usize,
    pub form: HomogeneousForm,
    /// No negative value was seen on the sphere samples.
    pub nonnegative: bool,
}

/// Graded components of `P`, flagged for sign on sphere samples.
pub fn homogeneous_decomposition(
    p: &Polynomial,
    sphere_samples: usize,
    seed: u64,
) -> Result<Vec<GradedComponent>> {
    if let Some(c) = p.components().find(|c| c.degree() % 2 == 1) {
        return Err(Error::NotEven(c.degree()));
    }
    let mut rng = seeded(seed);
    let dirs: Vec<GradMat> = (0..sphere_samples)
        .map(|_| random_direction(&mut rng, (1, p.dim())))
        .collect();
    Ok(p.components()
        .map(|c| GradedComponent {
            degree: c.degree(),
            form: c.clone(),
            nonnegative: dirs.iter().all(|d| c.eval(d.as_slice()) >= 0.0),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialGrowth {
    /// Degree `2d`.
    pub q: f64,
    /// Lowest nonconstant degree `2d₀`.
    pub p_max: f64,
    /// `sup |P''| / (1 + |P'|^{(2d−2)/(2d−1)})` on samples.
    pub c: f64,
}

/// Reads the exponents off the graded components and records the constant of
/// the `i = 0` derivative bound. Nonnegativity and convexity are checked on samples.
pub fn polynomial_growth_exponents(
    p: &EvenPolynomial,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> Result<PolynomialGrowth> {
    let dim = p.dim();
    let mut rng = seeded(seed);
    let dirs: Vec<GradMat> = (0..SPHERE_SAMPLES)
        .map(|_| random_direction(&mut rng, (1, dim)))
        .collect();
    for c in p.components() {
        if let Some(w) = dirs.iter().find(|d| c.eval(d.as_slice()) < 0.0) {
            return Err(Error::NegativeComponent {
                degree: c.degree(),
                witness: w.clone(),
            });
        }
    }
    let degrees: Vec<usize> = p
        .components()
        .iter()
        .map(|c| c.degree())
        .filter(|&d| d > 0)
        .collect();
    let (Some(&lo), Some(&hi)) = (degrees.first(), degrees.last()) else {
        return Err(Error::DegenerateForm);
    };
    let e = (hi as f64 - 2.0) / (hi as f64 - 1.0);
    let pts = sample_points((1, dim), n_samples, radius, seed.wrapping_add(1));
    let vals: Vec<(f64, f64, GradMat)> = pts
        .into_par_iter()
        .map(|z| -> Result<(f64, f64, GradMat)> {
            let zs = z.as_slice();
            let eig = sym_eigs(&p.hessian(zs))?;
            let g: f64 = p.gradient(zs).iter().map(|x| x * x).sum::<f64>().sqrt();
            let norm_h = eig.lambda_max.abs().max(eig.lambda_min.abs());
            Ok((eig.lambda_min, norm_h / (1.0 + g.powf(e)), z))
        })
        .collect::<Result<_>>()?;
    let mut c: f64 = 0.0;
    for (lmin, ratio, z) in vals {
        // tolerance scaled to the hessian size at the point
        if lmin < -1e-10 * (1.0 + ratio) {
            return Err(Error::NotConvex {
                lambda_min: lmin,
                witness: z,
            });
        }
        c = c.max(ratio);
    }
    Ok(PolynomialGrowth {
        q: hi as f64,
        p_max: lo as f64,
        c,
    })
}

fn eval_vec(h: &IntegrandSpec, v: &DVector<f64>, shape: (usize, usize)) -> Result<(f64, Vec<f64>)> {
    let z = GradMat::from_vec(shape.0, shape.1, v.as_slice().to_vec())?;
    let (val, g) = h.eval_grad(&z)?;
    Ok((val, g.as_slice().to_vec()))
}

/// Sampled `δ = sup sqrt(1 − s²H(ω)²/(σ_H²|H'(ω)|²))` over `ω` on the `σ_H`-sphere
/// of the span of the gradients, with `σ_H = min H^{1/s}` on that span's unit sphere.
pub fn delta_of_homogeneous(
    h: &IntegrandSpec,
    shape: (usize, usize),
    s: usize,
    sphere_samples: usize,
    seed: u64,
) -> Result<f64> {
    if s < 2 || sphere_samples == 0 {
        return Err(Error::Domain("need s >= 2 and at least one sample".into()));
    }
    h.validate_for(shape)?;
    let d = shape.0 * shape.1;
    let mut rng = seeded(seed);
    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut any_nonzero = false;
    for _ in 0..sphere_samples {
        let w = random_direction(&mut rng, shape);
        let (val, g) = h.eval_grad(&w)?;
        any_nonzero |= val != 0.0;
        let gv = DVector::from_column_slice(g.as_slice());
        gram += &gv * gv.transpose();
    }
    if !any_nonzero {
        return Err(Error::DegenerateForm);
    }
    let eig = SymmetricEigen::new(gram);
    let top = eig.eigenvalues.max();
    let basis: Vec<DVector<f64>> = (0..d)
        .filter(|&k| eig.eigenvalues[k] > 1e-10 * top)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    let k = basis.len();
    let thetas: Vec<DVector<f64>> = (0..sphere_samples)
        .map(|_| {
            let w = random_direction(&mut rng, (1, k));
            basis
                .iter()
                .zip(w.as_slice())
                .fold(DVector::zeros(d), |acc, (b, c)| acc + b * *c)
        })
        .collect();
    let mut sigma = f64::INFINITY;
    for t in &thetas {
        sigma = sigma.min(eval_vec(h, t, shape)?.0.powf(1.0 / s as f64));
    }
    if !(sigma > 0.0) {
        return Err(Error::DegenerateForm);
    }
    let sf = s as f64;
    let mut delta: f64 = 0.0;
    for t in &thetas {
        let (val, g) = eval_vec(h, &(t * sigma), shape)?;
        let g2: f64 = g.iter().map(|x| x * x).sum();
        let c2 = sf * sf * val * val / (sigma * sigma * g2);
        delta = delta.max((1.0 - c2).max(0.0).sqrt());
    }
    Ok(delta.min(1.0 - f64::EPSILON))
}

/// Exponents of `Q + H` for `Q` certified with `(p,q)` and `H` homogeneous of
/// degree `s`: `(p, max(q,s))`, re-certified on the sum.
#[allow(clippy::too_many_arguments)]
pub fn sum_growth(
    q_spec: &IntegrandSpec,
    q_regime: &Regime,
    h: &IntegrandSpec,
    s: usize,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> Result<(Regime, LegendreCertificate)> {
    let combined = q_regime.with_q(q_regime.q.max(s as f64))?;
    combined.require_strict()?;
    let sum = q_spec.clone() + h.clone();
    let cert = check_legendre(&sum, &combined, n_samples, radius, seed)?;
    Ok((combined, cert))
}

/// `t = (2c₀M − m)/(2c₀M − 1)`.
pub fn gehring_exponent(c0: f64, big_m: f64, m: f64) -> Result<f64> {
    if !(c0 >= 1.0 && big_m >= 1.0 && m > 0.0 && m < 1.0 && (c0 * big_m).is_finite()) {
        return Err(Error::Domain(format!(
            "gehring exponent needs c0 >= 1, M >= 1, m in (0,1); got ({c0}, {big_m}, {m})"
        )));
    }
    let a = 2.0 * c0 * big_m;
    Ok((a - m) / (a - 1.0))
}
