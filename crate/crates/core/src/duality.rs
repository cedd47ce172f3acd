//! Numerical Fenchel conjugation and the duality identities and inequalities.

use nalgebra::{DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::integrands::{ell_mu, v_map, Hessian, IntegrandSpec};
use crate::model::{CheckReport, GradMat, Regime};
use crate::sampling::{log_radius_point, seeded};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERS: usize = 200;
/// Condition number above which Newton falls back to a gradient step.
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateResult {
    pub value: f64,
    pub argmax: GradMat,
    pub newton_iters: usize,
    pub residual: f64,
}

/// Smallest and largest power appearing in the spec, used for the start point.
fn power_range(f: &IntegrandSpec) -> (f64, f64) {
    match f {
        IntegrandSpec::PowerNorm { p, .. } => (*p, *p),
        IntegrandSpec::AxisPower { q, .. } => (*q, *q),
        IntegrandSpec::EvenPolynomial(poly) => {
            let degs: Vec<f64> = poly
                .components()
                .iter()
                .filter(|c| c.degree() > 0)
                .map(|c| c.degree() as f64)
                .collect();
            let lo = degs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = degs.iter().cloned().fold(2.0, f64::max);
            (lo.min(hi), hi)
        }
        IntegrandSpec::Sum(terms) => terms
            .iter()
            .map(power_range)
            .fold((f64::INFINITY, 2.0), |(a, b), (c, d)| (a.min(c), b.max(d))),
        IntegrandSpec::Scaled { inner, .. } => power_range(inner),
    }
}

fn objective(f: &IntegrandSpec, z: &GradMat, xi: &GradMat) -> Result<(f64, GradMat)> {
    let (v, g) = f.eval_grad(z)?;
    let phi = z.dot(xi) - v;
    let r = xi - &g;
    if !(phi.is_finite() && r.is_finite()) {
        return Err(Error::NonFinite("conjugate objective".into()));
    }
    Ok((phi, r))
}

/// Ascent direction: Newton where the hessian is well conditioned, the residual otherwise.
fn ascent_direction(h: &Hessian, r: &GradMat) -> GradMat {
    let eig = SymmetricEigen::new(h.clone());
    let lmin = eig.eigenvalues.min();
    let lmax = eig.eigenvalues.max();
    if lmin > 0.0 && lmax / lmin <= MAX_CONDITION {
        let rhs = DVector::from_column_slice(r.as_slice());
        let coeffs = eig.eigenvectors.transpose() * rhs;
        let scaled = coeffs.component_div(&eig.eigenvalues);
        let d = &eig.eigenvectors * scaled;
        GradMat::from_vec(r.rows(), r.cols(), d.as_slice().to_vec())
            .unwrap_or_else(|_| r.clone())
    } else {
        r.scale(1.0 / lmax.max(1.0))
    }
}

/// `F*(ξ) = sup_z ⟨z,ξ⟩ − F(z)` by damped Newton. Converged when
/// `|ξ − F'(z)| ≤ tol·max(1,|ξ|)`; iteration continues past that point while the
/// step still changes `z`, so the maximizer is resolved to rounding.
pub fn conjugate(f: &IntegrandSpec, xi: &GradMat, tol: f64) -> Result<ConjugateResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    f.validate_for(xi.shape())?;
    let target = tol * xi.norm().max(1.0);
    let xn = xi.norm();
    let mut z = if xn == 0.0 {
        GradMat::zeros(xi.rows(), xi.cols())
    } else {
        let (lo, hi) = power_range(f);
        let e = if xn <= 1.0 { lo } else { hi };
        xi.scale(xn.powf(1.0 / (e - 1.0)) / xn)
    };
    let (mut phi, mut r) = objective(f, &z, xi)?;
    let zero = GradMat::zeros(xi.rows(), xi.cols());
    let (phi0, r0) = objective(f, &zero, xi)?;
    if phi0 > phi {
        (z, phi, r) = (zero, phi0, r0);
    }
    let mut iters = 0;
    let mut stalled = 0;
    while iters < MAX_ITERS {
        let rn = r.norm();
        if rn == 0.0 {
            break;
        }
        iters += 1;
        let h = f.hessian(&z)?;
        let d = ascent_direction(&h, &r);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let zt = z.axpy(t, &d);
            let (pt, rt) = objective(f, &zt, xi)?;
            if pt > phi || rt.norm() < rn {
                accepted = Some((zt, pt, rt));
                break;
            }
            t *= 0.5;
        }
        let Some((zt, pt, rt)) = accepted else {
            break;
        };
        let step = t * d.norm();
        let better = rt.norm() < rn;
        (z, phi, r) = (zt, pt, rt);
        if r.norm() <= target {
            if step <= 1e-15 * (1.0 + z.norm()) {
                break;
            }
            stalled = if better { 0 } else { stalled + 1 };
            if stalled >= 2 {
                break;
            }
        }
    }
    let residual = r.norm();
    if residual > target {
        return Err(Error::NonConvergence {
            iterations: iters,
            residual,
        });
    }
    Ok(ConjugateResult {
        value: phi,
        argmax: z,
        newton_iters: iters,
        residual,
    })
}

/// `(F*)'(ξ) = (F')⁻¹(ξ)`.
pub fn inverse_gradient(f: &IntegrandSpec, xi: &GradMat, tol: f64) -> Result<GradMat> {
    Ok(conjugate(f, xi, tol)?.argmax)
}

/// `(F*)''(F'(z)) = F''(z)⁻¹`.
pub fn conjugate_hessian(f: &IntegrandSpec, z: &GradMat) -> Result<Hessian> {
    let h = f.hessian(z)?;
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("hessian".into()));
    }
    match h.cholesky() {
        Some(c) => Ok(c.inverse()),
        None => Err(Error::SingularHessian),
    }
}

/// `F(z) + F*(ξ) − ⟨z,ξ⟩`.
pub fn fenchel_young_gap(f: &IntegrandSpec, z: &GradMat, xi: &GradMat) -> Result<f64> {
    let c = conjugate(f, xi, DEFAULT_TOL)?;
    Ok(f.eval(z)? + c.value - z.dot(xi))
}

/// Eigenvalues of `F''(z)⁻¹` against the interval
/// `[(1/2L) ℓ₁(F'(z))^{q'−2}, L ℓ_μ(z)^{2−p}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualBound {
    pub eig_min: f64,
    pub eig_max: f64,
    pub lower: f64,
    pub upper: f64,
}

impl DualBound {
    pub fn holds(&self) -> bool {
        self.eig_min >= self.lower && self.eig_max <= self.upper
    }
}

pub fn dual_bound(f: &IntegrandSpec, r: &Regime, z: &GradMat) -> Result<DualBound> {
    let inv = conjugate_hessian(f, z)?;
    let eig = SymmetricEigen::new(inv).eigenvalues;
    let g = f.gradient(z)?;
    Ok(DualBound {
        eig_min: eig.min(),
        eig_max: eig.max(),
        lower: ell_mu(1.0, &g).powf(r.q_conj() - 2.0) / (2.0 * r.l),
        upper: r.l * ell_mu(r.mu, z).powf(2.0 - r.p),
    })
}

fn dual_v_gap(r: &Regime, a: &GradMat, b: &GradMat) -> f64 {
    (&v_map(1.0, r.q_conj(), a) - &v_map(1.0, r.q_conj(), b)).norm_sq()
}

/// `⟨F'(z₁)−F'(z₂), z₁−z₂⟩ / (|V_{μ,p}(z₁)−V_{μ,p}(z₂)|² + |V_{1,q'}(F'(z₁))−V_{1,q'}(F'(z₂))|²)`;
/// `None` for a degenerate pair.
pub fn monotonicity_ratio(
    f: &IntegrandSpec,
    r: &Regime,
    z1: &GradMat,
    z2: &GradMat,
) -> Result<Option<f64>> {
    let g1 = f.gradient(z1)?;
    let g2 = f.gradient(z2)?;
    let num = (&g1 - &g2).dot(&(z1 - z2));
    let den = (&v_map(r.mu, r.p, z1) - &v_map(r.mu, r.p, z2)).norm_sq() + dual_v_gap(r, &g1, &g2);
    Ok((den > 0.0).then(|| num / den))
}

/// A field value `w` with its partial derivatives `∂_s w`, `s = 1..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub value: GradMat,
    pub partials: Vec<GradMat>,
}

/// Minimum over samples of `Σ_s ⟨F''(w)∂_s w, ∂_s w⟩ / (|∇V_{μ,p}(w)|² + |∇V_{1,q'}(F'(w))|²)`,
/// the V-gradients taken by central differences along each `∂_s w`. Samples with a
/// vanishing denominator are skipped; `None` when all are.
pub fn second_order_bound(
    f: &IntegrandSpec,
    r: &Regime,
    samples: &[FieldSample],
) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for s in samples {
        let w = &s.value;
        let h = f.hessian(w)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for d in &s.partials {
            let dn = d.norm();
            if dn == 0.0 {
                continue;
            }
            let hd = &h * DVector::from_column_slice(d.as_slice());
            num += hd.as_slice().iter().zip(d.as_slice()).map(|(a, b)| a * b).sum::<f64>();
            let step = 1e-6 * (1.0 + w.norm()) / dn;
            let wp = w.axpy(step, d);
            let wm = w.axpy(-step, d);
            let dv = (&v_map(r.mu, r.p, &wp) - &v_map(r.mu, r.p, &wm)).scale(0.5 / step);
            let dual = (&v_map(1.0, r.q_conj(), &f.gradient(&wp)?)
                - &v_map(1.0, r.q_conj(), &f.gradient(&wm)?))
                .scale(0.5 / step);
            den += dv.norm_sq() + dual.norm_sq();
        }
        if den > 0.0 {
            let ratio = num / den;
            best = Some(best.map_or(ratio, |b: f64| b.min(ratio)));
        }
    }
    Ok(best)
}

/// Relative tolerance of the conjugate difference probe.
pub const PROBE_TOL: f64 = 1e-8;

/// Tests convexity of `F* − G*` through the equivalent primal inequality
/// `F(z+z₀)−F(z₀)−⟨F'(z₀),z⟩ ≤ G(z+w₀)−G(w₀)−⟨G'(w₀),z⟩`, `w₀ = (G*)'(F'(z₀))`.
pub fn conjugate_difference_probe(
    f: &IntegrandSpec,
    g: &IntegrandSpec,
    shape: (usize, usize),
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut rng = seeded(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut passed = true;
    for _ in 0..samples {
        let z0 = log_radius_point(&mut rng, shape, 1e-2, 10.0);
        let z = log_radius_point(&mut rng, shape, 1e-2, 10.0);
        let (f0, df0) = f.eval_grad(&z0)?;
        let lhs = f.eval(&z0.axpy(1.0, &z))? - f0 - df0.dot(&z);
        let w0 = inverse_gradient(g, &df0, DEFAULT_TOL)?;
        let (g0, dg0) = g.eval_grad(&w0)?;
        let rhs = g.eval(&w0.axpy(1.0, &z))? - g0 - dg0.dot(&z);
        let gap = lhs - rhs;
        if gap > PROBE_TOL * (1.0 + lhs.abs() + rhs.abs()) {
            passed = false;
        }
        if gap > worst {
            worst = gap;
            witness = Some(z);
        }
    }
    Ok(CheckReport {
        passed,
        worst_ratio: worst,
        witness: if passed { None } else { witness },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> IntegrandSpec {
        IntegrandSpec::power(0.0, 2.0)
    }

    #[test]
    fn quadratic_conjugate() {
        let xi = GradMat::from_rows(&[&[1.0, -2.0], &[0.5, 3.0]]).unwrap();
        let c = conjugate(&quad(), &xi, DEFAULT_TOL).unwrap();
        assert!((c.value - xi.norm_sq() / 4.0).abs() < 1e-12);
        assert!((&c.argmax - &xi.scale(0.5)).max_abs() < 1e-12);
        let inv = conjugate_hessian(&quad(), &xi).unwrap();
        assert!((inv - Hessian::identity(4, 4) * 0.5).abs().max() < 1e-15);
    }

    #[test]
    fn gap_by_substitution() {
        let e = GradMat::row(&[1.0, 0.0]);
        let gap = fenchel_young_gap(&quad(), &e, &GradMat::zeros(1, 2)).unwrap();
        assert!((gap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_hessian_at_degenerate_origin() {
        let f = IntegrandSpec::power(0.0, 4.0);
        assert_eq!(
            conjugate_hessian(&f, &GradMat::zeros(1, 2)),
            Err(Error::SingularHessian)
        );
    }

    #[test]
    fn monotonicity_degenerate_pair_and_quadratic_bound() {
        let r = Regime::new(2, 1, 2.0, 4.0, 0.0, 2.0).unwrap();
        let z = GradMat::row(&[0.3, 0.4]);
        assert_eq!(monotonicity_ratio(&quad(), &r, &z, &z).unwrap(), None);
        let w = GradMat::row(&[-1.0, 2.0]);
        let ratio = monotonicity_ratio(&quad(), &r, &z, &w).unwrap().unwrap();
        assert!(ratio > 0.0 && ratio <= 2.0);
    }

    #[test]
    fn probe_cases() {
        let shape = (1, 2);
        let same = conjugate_difference_probe(&quad(), &quad(), shape, 50, 1).unwrap();
        assert!(same.passed && same.worst_ratio <= PROBE_TOL);
        let double = IntegrandSpec::scaled(2.0, quad());
        assert!(conjugate_difference_probe(&quad(), &double, shape, 50, 2).unwrap().passed);
        let bad = conjugate_difference_probe(&double, &quad(), shape, 50, 3).unwrap();
        assert!(!bad.passed && bad.witness.is_some());
    }

    #[test]
    fn second_order_skips_constant_fields() {
        let r = Regime::new(2, 1, 2.0, 4.0, 0.0, 2.0).unwrap();
        let s = FieldSample {
            value: GradMat::row(&[1.0, 1.0]),
            partials: vec![GradMat::zeros(1, 2); 2],
        };
        assert_eq!(second_order_bound(&quad(), &r, &[s]).unwrap(), None);
    }
}
