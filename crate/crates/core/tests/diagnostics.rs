use std::sync::Arc;

use legendre_core::diagnostics::{
    attach_fitted_exponent, gehring_selfimprove, hd_exponents, higher_diff_measure,
    log_decay_profile, reverse_holder_constant, reverse_holder_scan, sup_grad_measure, CubeData,
};
use legendre_core::integrands::builtin;
use legendre_core::solver::{boundary_values, harmonic_extension, minimize_spec, BoundaryFamily, Tolerances};
use legendre_core::{DiagnosticsEntry, DiscreteField, Grid, IntegrandSpec, Region, Regime};

fn solve(name: &str, m: usize, amplitude: f64) -> (DiscreteField, IntegrandSpec, Regime) {
    let b = builtin(name).unwrap();
    let r = b.regime;
    let grid = Arc::new(Grid::new(r.n, m).unwrap());
    let g = boundary_values(&grid, r.big_n, BoundaryFamily::Sine, amplitude);
    let h = harmonic_extension(grid.clone(), r.big_n, &g).unwrap();
    let (u, _, _, _) =
        minimize_spec(&b.spec, grid, r.big_n, &g, Some(h.values()), Tolerances::default()).unwrap();
    (u, b.spec, r)
}

fn hd_entries(amps: &[f64], m: usize) -> Vec<DiagnosticsEntry> {
    let ball = Region::unit_ball(2);
    amps.iter()
        .map(|&a| {
            let (u, f, r) = solve("marcellini", m, a);
            let chain = hd_exponents(&r, 10.0).unwrap();
            higher_diff_measure(&u, &f, &r, &chain, &ball).unwrap()
        })
        .collect()
}

#[test]
fn fitted_exponent_is_stable_under_doubling_amplitudes() {
    let mut base = hd_entries(&[0.5, 1.0, 2.0, 4.0], 32);
    let mut doubled = hd_entries(&[1.0, 2.0, 4.0, 8.0], 32);
    let b1 = attach_fitted_exponent(&mut base).unwrap().exponent;
    let b2 = attach_fitted_exponent(&mut doubled).unwrap().exponent;
    assert!(base.iter().all(|e| e.fitted_exponent == Some(b1)));
    assert!((b2 / b1 - 1.0).abs() < 0.10, "{b1} vs {b2}");
}

#[test]
fn sup_gradient_fit_stable_across_refinement() {
    let ball = Region::unit_ball(2);
    let fit = |m| {
        let mut entries: Vec<_> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&a| {
                let (u, f, _) = solve("vectorial_model", m, a);
                sup_grad_measure(&u, &f, &ball, 1.0).unwrap()
            })
            .collect();
        attach_fitted_exponent(&mut entries).unwrap().exponent
    };
    let (b32, b64) = (fit(32), fit(64));
    assert!((b64 / b32 - 1.0).abs() < 0.20, "{b32} vs {b64}");
}

#[test]
fn scalar_3d_sup_gradient_bounded_under_refinement() {
    let ball = Region::unit_ball(3);
    let sups: Vec<f64> = [10, 20]
        .iter()
        .map(|&m| {
            let (u, f, _) = solve("scalar_3d", m, 1.0);
            sup_grad_measure(&u, &f, &ball, 1.0).unwrap().lhs
        })
        .collect();
    assert!(sups[1] <= 1.05 * sups[0], "{sups:?}");
}

#[test]
fn log_decay_masses_shrink_with_radius() {
    let (u, f, r) = solve("marcellini", 64, 2.0);
    let ball = Region::unit_ball(2);
    let prof = log_decay_profile(&u, &f, &r, &[0.25, 0.15, 0.1, 0.05], &ball).unwrap();
    assert_eq!(prof.gamma, 0.75);
    assert_eq!(prof.decay_exponent, 2.75);
    assert!(prof.masses.windows(2).all(|w| w[1] < w[0]), "{:?}", prof.masses);
    assert!(prof.fitted_constant > 0.0 && prof.fit_residual.is_finite());
}

#[test]
fn reverse_holder_scan_finds_exponent_above_one() {
    let fields: Vec<DiscreteField> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&a| solve("marcellini", 32, a).0)
        .collect();
    let b = builtin("marcellini").unwrap();
    let t_grid = [1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9];
    let ball = Region::unit_ball(2);
    let scan =
        reverse_holder_scan(&fields, &b.spec, &b.regime, &t_grid, &ball, 1.0, 10.0).unwrap();
    assert!(scan.best_t.is_some_and(|t| t > 1.0), "{scan:?}");
}

#[test]
fn gehring_holds_on_solved_field() {
    let (u, f, r) = solve("marcellini", 64, 2.0);
    let data = CubeData::from_field(&u, &f, &r).unwrap();
    let m = 0.5;
    let c_hat = reverse_holder_constant(&data, m).unwrap().max(1.0);
    let rep = gehring_selfimprove(&data, 1.0, m, c_hat, r.q / r.p).unwrap();
    assert!(rep.c_star >= 2.0);
    assert!(rep.t > 1.0 && rep.t < 2.0);
    assert!(rep.holds, "{rep:?}");
}
