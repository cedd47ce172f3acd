use legendre_core::duality::{conjugate, fenchel_young_gap, DEFAULT_TOL};
use legendre_core::integrands::{builtins, v_map};
use legendre_core::sampling::{log_radius_point, log_uniform, random_direction, seeded};
use legendre_core::GradMat;

/// Brute one-dimensional maximization of `t ↦ <z, ξ(t)> − F*(ξ(t))` along a
/// line through `ξ₀` never beats the value at `ξ₀ = F'(z)`, which equals `F(z)`.
#[test]
fn biconjugate_returns_f() {
    for b in builtins() {
        let mut rng = seeded(21);
        for _ in 0..40 {
            let z = log_radius_point(&mut rng, b.regime.shape(), 1e-2, 10.0);
            let f = b.spec.eval(&z).unwrap();
            let xi0 = b.spec.gradient(&z).unwrap();
            let at = |xi: &GradMat| z.dot(xi) - conjugate(&b.spec, xi, DEFAULT_TOL).unwrap().value;
            let best = at(&xi0);
            assert!((best - f).abs() <= 1e-6 * (1.0 + f.abs()), "{}: {best} vs {f}", b.name);
            let dir = random_direction(&mut rng, b.regime.shape());
            for k in 1..=10 {
                let t = 0.05 * k as f64 * (1.0 + xi0.norm());
                for s in [-t, t] {
                    let xi = &xi0 + &dir.scale(s);
                    assert!(at(&xi) <= f + 1e-8 * (1.0 + f.abs()), "{} beaten at {xi:?}", b.name);
                }
            }
        }
    }
}

/// Smallest `c` with `c⁻¹|ξ|^{q'} − c ≤ F*(ξ) ≤ c|ξ|^{p'} + c` at one sample.
fn coercivity_constant(fstar: f64, s: f64, p_conj: f64, q_conj: f64) -> f64 {
    let upper = fstar / (s.powf(p_conj) + 1.0);
    // c² + F* c − |ξ|^{q'} ≥ 0
    let lower = 0.5 * (-fstar + (fstar * fstar + 4.0 * s.powf(q_conj)).sqrt());
    upper.max(lower).max(1.0)
}

#[test]
fn conjugate_coercivity() {
    // recorded constants range from 1.03 (quartic_quarter) to 2.19 (marcellini)
    const C: f64 = 2.5;
    for b in builtins() {
        let r = b.regime;
        let mut rng = seeded(22);
        let mut c: f64 = 1.0;
        for k in 0..2000 {
            let xi = if k == 0 {
                GradMat::zeros(r.big_n, r.n)
            } else {
                log_radius_point(&mut rng, r.shape(), 1e-3, 1e3)
            };
            let fstar = conjugate(&b.spec, &xi, DEFAULT_TOL).unwrap().value;
            c = c.max(coercivity_constant(fstar, xi.norm(), r.p_conj(), r.q_conj()));
        }
        assert!(c <= C, "{}: c = {c}", b.name);
    }
}

#[test]
fn newton_iteration_guard() {
    const MAX: usize = 60;
    for b in builtins() {
        let mut rng = seeded(23);
        let mut worst = 0;
        for _ in 0..2000 {
            let xi = log_radius_point(&mut rng, b.regime.shape(), 1e-3, 1e3);
            worst = worst.max(conjugate(&b.spec, &xi, DEFAULT_TOL).unwrap().newton_iters);
        }
        assert!(worst <= MAX, "{}: {worst} iterations", b.name);
    }
}

#[test]
fn fenchel_young_is_tight_on_the_graph() {
    for b in builtins() {
        let mut rng = seeded(24);
        for _ in 0..200 {
            let z = log_radius_point(&mut rng, b.regime.shape(), 1e-2, 10.0);
            let xi = b.spec.gradient(&z).unwrap();
            let gap = fenchel_young_gap(&b.spec, &z, &xi).unwrap();
            assert!(gap.abs() <= 1e-8 * (1.0 + b.spec.eval(&z).unwrap()), "{}: {gap}", b.name);
            let off = &xi + &random_direction(&mut rng, b.regime.shape()).scale(log_uniform(&mut rng, 1e-2, 1.0));
            assert!(fenchel_young_gap(&b.spec, &z, &off).unwrap() >= -1e-9);
        }
    }
}

/// `F(z) − F(0) − <F'(0), z> ≥ c (|V_{μ,p}(z)|² + |V_{1,q'}(F'(z)) − V_{1,q'}(F'(0))|²)`
/// with an empirical `c > 0`.
#[test]
fn normalized_energy_dominates_v_quantities() {
    for b in builtins() {
        let r = b.regime;
        let zero = GradMat::zeros(r.big_n, r.n);
        let f0 = b.spec.eval(&zero).unwrap();
        let g0 = b.spec.gradient(&zero).unwrap();
        let mut rng = seeded(25);
        let mut c = f64::INFINITY;
        for _ in 0..10_000 {
            let z = log_radius_point(&mut rng, r.shape(), 1e-3, 1e3);
            let lhs = b.spec.eval(&z).unwrap() - f0 - g0.dot(&z);
            let g = b.spec.gradient(&z).unwrap();
            let rhs = v_map(r.mu, r.p, &z).norm_sq()
                + (&v_map(1.0, r.q_conj(), &g) - &v_map(1.0, r.q_conj(), &g0)).norm_sq();
            c = c.min(lhs / rhs);
        }
        // recorded infima range from 0.116 (degenerate_p4) to 0.200 (quadratic)
        assert!(c > 0.1, "{}: c = {c}", b.name);
    }
}
