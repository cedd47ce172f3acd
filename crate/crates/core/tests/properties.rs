//! Property tests for the structural invariants of the integrand, regime,
//! growth and exponent layers.

use legendre_core::diagnostics::{hd_exponents, moser_alpha_sequence, MoserParams};
use legendre_core::growth::{ellipticity_ratio, gehring_exponent, homogeneous_decomposition};
use legendre_core::integrands::{builtins, ell_mu, fd_check, v_map, EvenPolynomial, Polynomial};
use legendre_core::model::validate_regime;
use legendre_core::sampling::{ball_point, log_radius_point, seeded};
use legendre_core::{GradMat, Grid, IntegrandSpec, Regime};
use proptest::prelude::*;

const SAMPLES: usize = 10_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn admissibility_is_monotone_in_q(n in 2usize..10, p in 2.0f64..10.0, a in 0.0f64..20.0, b in 0.0f64..20.0) {
        let (lo, hi) = (p + a.min(b), p + a.max(b));
        let r_hi = validate_regime(&Regime::new(n, 1, p, hi, 0.0, 2.0).unwrap()).unwrap();
        let r_lo = validate_regime(&Regime::new(n, 1, p, lo, 0.0, 2.0).unwrap()).unwrap();
        prop_assert!(!r_hi.admissible || r_lo.admissible);
    }

    #[test]
    fn thresholds_in_four_and_five_dimensions(p in 2.0f64..10.0) {
        let t = |n| validate_regime(&Regime::new(n, 1, p, p, 0.0, 2.0).unwrap()).unwrap().threshold;
        prop_assert_eq!(t(4), 3.0 * p);
        prop_assert_eq!(t(5), 2.0 * p);
    }

    #[test]
    fn gehring_exponent_in_unit_interval_and_decreasing(c0 in 1.0f64..50.0, m_big in 1.0f64..1e4, m in 0.01f64..0.99, k in 1.01f64..10.0) {
        let t = gehring_exponent(c0, m_big, m).unwrap();
        prop_assert!(t > 1.0 && t < 2.0);
        prop_assert!(gehring_exponent(c0, k * m_big, m).unwrap() < t);
    }

    #[test]
    fn exponent_chain_identity(n in 2usize..8, p in 2.0f64..6.0, dq in 0.0f64..4.0, ds in 0.01f64..20.0) {
        let q = p + dq;
        let s = 2.0 * q / p + ds;
        let r = Regime::new(n, 1, p, q, 0.0, 2.0).unwrap();
        let c = hd_exponents(&r, s).unwrap();
        prop_assert!(c.lambda > 0.0 && c.lambda <= 1.0);
        prop_assert!((2.0 * c.lambda + (1.0 - c.lambda) * s - 2.0 * q / p).abs() <= 1e-12 * (1.0 + s));
        prop_assert!((c.b - c.kappa2 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn moser_recursion(alpha0 in -1.0f64..20.0, gamma in 0.05f64..0.95, i in 1u32..60) {
        let params = MoserParams::new(alpha0, gamma, 1.0, 1.0, 1.0, 0.5).unwrap();
        let prev = moser_alpha_sequence(&params, i - 1);
        let next = moser_alpha_sequence(&params, i);
        let rec = prev / gamma + 2.0 * (1.0 / gamma - 1.0);
        prop_assert!((next - rec).abs() <= 1e-12 * next.abs().max(1.0));
        prop_assert!(next > prev);
    }

    #[test]
    fn even_polynomials_are_symmetric(
        terms in prop::collection::vec((0.0f64..5.0, 0usize..4, 0usize..4, 0usize..4), 1..6),
        z in prop::array::uniform3(-3.0f64..3.0),
    ) {
        // push each monomial to even total degree
        let monomials: Vec<(f64, Vec<usize>)> = terms
            .iter()
            .map(|&(c, a, b, d)| (c, vec![a, b, d + (a + b + d) % 2]))
            .collect();
        let p = EvenPolynomial::from_monomials(3, &monomials).unwrap();
        let neg: Vec<f64> = z.iter().map(|x| -x).collect();
        let (a, b) = (p.eval(&z), p.eval(&neg));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn decomposition_reassembles(
        terms in prop::collection::vec((-5.0f64..5.0, 0usize..4, 0usize..4), 1..8),
        z in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let monomials: Vec<(f64, Vec<usize>)> = terms
            .iter()
            .map(|&(c, a, b)| (c, vec![a, b + (a + b) % 2]))
            .collect();
        let p = Polynomial::from_monomials(2, &monomials).unwrap();
        let parts = homogeneous_decomposition(&p, 64, 1).unwrap();
        let summed: f64 = parts.iter().map(|c| c.form.eval(&z)).sum();
        let direct: f64 = monomials
            .iter()
            .map(|(c, e)| c * z[0].powi(e[0] as i32) * z[1].powi(e[1] as i32))
            .sum();
        prop_assert!((summed - direct).abs() <= 1e-12 * (1.0 + direct.abs().max(summed.abs())));
    }
}

#[test]
fn simplex_volumes_sum_to_one() {
    for (dim, m) in [(2, 1), (2, 7), (2, 64), (3, 2), (3, 9), (3, 16)] {
        let Ok(g) = Grid::new(dim, m) else {
            assert_eq!(m, 1);
            continue;
        };
        let total: f64 = g.simplices().iter().map(|_| g.simplex_volume()).sum();
        assert!((total - 1.0).abs() <= 1e-12, "dim {dim} m {m}: {total}");
    }
}

/// Bounds on `|V(z₁)−V(z₂)| / ((μ²+|z₁|²+|z₂|²)^{(γ−2)/4} |z₁−z₂|)` over random pairs.
fn v_ratio_range(mu: f64, gamma: f64, seed: u64) -> (f64, f64) {
    let mut rng = seeded(seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..SAMPLES {
        let z1 = log_radius_point(&mut rng, (2, 2), 1e-3, 1e3);
        let z2 = log_radius_point(&mut rng, (2, 2), 1e-3, 1e3);
        let num = (&v_map(mu, gamma, &z1) - &v_map(mu, gamma, &z2)).norm();
        let w = (mu * mu + z1.norm_sq() + z2.norm_sq()).powf((gamma - 2.0) / 4.0);
        let r = num / (w * (&z1 - &z2).norm());
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

#[test]
fn v_map_difference_equivalence() {
    // observed max(hi, 1/lo) on these samples: 1.24, 1.16, 1, 1.19, 1.41, 2.0
    for (gamma, c) in [(4.0 / 3.0, 1.5), (1.5, 1.5), (2.0, 1.0), (3.0, 1.5), (4.0, 2.0), (6.0, 2.5)] {
        for mu in [0.0, 1.0] {
            let (lo, hi) = v_ratio_range(mu, gamma, 7);
            assert!(lo >= 1.0 / c - 1e-12 && hi <= c + 1e-12, "gamma {gamma} mu {mu}: [{lo}, {hi}]");
        }
    }
}

#[test]
fn growth_sandwich_for_builtins() {
    for b in builtins() {
        let r = b.regime;
        let mut rng = seeded(11);
        for _ in 0..SAMPLES {
            let z = log_radius_point(&mut rng, r.shape(), 1e-3, 1e3);
            let l = ell_mu(r.mu, &z);
            let v = b.spec.eval(&z).unwrap();
            let upper = r.l * l.powf(r.p) + r.l * l.powf(r.q);
            assert!(l.powf(r.p) / r.l <= v && v <= upper, "{} at {z:?}", b.name);
        }
    }
}

#[test]
fn stress_growth_for_builtins() {
    // |F'(z)| ≤ c ℓ^{p−1} + c ℓ^{q−1}, with c = L
    for b in builtins() {
        let r = b.regime;
        let mut rng = seeded(12);
        for _ in 0..SAMPLES {
            let z = log_radius_point(&mut rng, r.shape(), 1e-3, 1e3);
            let l = ell_mu(r.mu, &z);
            let g = b.spec.gradient(&z).unwrap().norm();
            assert!(g <= r.l * (l.powf(r.p - 1.0) + l.powf(r.q - 1.0)), "{} at {z:?}", b.name);
        }
    }
}

#[test]
fn ellipticity_ratio_controlled_by_stress() {
    // R_F(z) ≤ L² (1 + |F'(z)|^{(q−p)/(q−1)}): the upper bound over the lower one
    for b in builtins() {
        let r = b.regime;
        let mut rng = seeded(13);
        let mut worst: f64 = 0.0;
        for _ in 0..SAMPLES {
            let z = log_radius_point(&mut rng, r.shape(), 1e-3, 1e3);
            let g = b.spec.gradient(&z).unwrap().norm();
            let ratio = ellipticity_ratio(&b.spec, &z).unwrap();
            worst = worst.max(ratio / (1.0 + g.powf((r.q - r.p) / (r.q - 1.0))));
        }
        assert!(worst <= r.l * r.l, "{}: {worst}", b.name);
    }
}

/// Largest gradient error of central differences at step `h`.
fn fd_error(f: &IntegrandSpec, z: &GradMat, h: f64) -> f64 {
    fd_check(f, z, h).grad_err
}

#[test]
fn finite_differences_converge_quadratically() {
    let specs = [
        IntegrandSpec::power(0.0, 3.0),
        IntegrandSpec::power(1.0, 2.5),
        IntegrandSpec::power(0.0, 2.0) + IntegrandSpec::axis(0, 5.0),
        IntegrandSpec::scaled(0.3, IntegrandSpec::axis(1, 3.5)),
    ];
    let mut rng = seeded(14);
    for f in &specs {
        for _ in 0..20 {
            let mut z = ball_point(&mut rng, (1, 2), 2.0);
            // keep away from kinks of |t|^q and |z|^p
            for x in z.as_mut_slice() {
                *x += 0.5f64.copysign(*x);
            }
            let e1 = fd_error(f, &z, 1e-2);
            let e2 = fd_error(f, &z, 5e-3);
            if e1 > 1e-9 {
                let rate = (e1 / e2).log2();
                assert!((1.8..=2.2).contains(&rate), "{f:?} at {z:?}: rate {rate}");
            }
        }
    }
}
