use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use legendre_core::duality::{conjugate, DEFAULT_TOL};
use legendre_core::growth::check_legendre;
use legendre_core::integrands::builtin;
use legendre_core::solver::{
    assemble, boundary_values, minimize_spec, BoundaryFamily, Dofs, Tolerances,
};
use legendre_core::{GradMat, Grid};

fn bench_conjugate(c: &mut Criterion) {
    let b = builtin("vectorial_model").unwrap();
    let xi = GradMat::from_vec(2, 2, vec![1.5, -0.3, 0.7, 2.1]).unwrap();
    c.bench_function("conjugate/vectorial_model", |bn| {
        bn.iter(|| conjugate(&b.spec, black_box(&xi), DEFAULT_TOL).unwrap())
    });
}

fn bench_solver(c: &mut Criterion) {
    let b = builtin("marcellini").unwrap();
    let grid = Arc::new(Grid::new(2, 32).unwrap());
    let g = boundary_values(&grid, 1, BoundaryFamily::Sine, 1.0);
    let dofs = Dofs::new(grid.clone(), 1);
    c.bench_function("assemble/marcellini_32", |bn| {
        bn.iter(|| assemble(&b.spec, &dofs, black_box(&g), true).unwrap())
    });
    c.bench_function("minimize/marcellini_32", |bn| {
        bn.iter(|| minimize_spec(&b.spec, grid.clone(), 1, &g, None, Tolerances::default()).unwrap())
    });
}

fn bench_check(c: &mut Criterion) {
    let b = builtin("marcellini").unwrap();
    c.bench_function("check_legendre/marcellini_2000", |bn| {
        bn.iter(|| check_legendre(&b.spec, &b.regime, 2000, 1e3, black_box(7)).unwrap())
    });
}

criterion_group!(benches, bench_conjugate, bench_solver, bench_check);
criterion_main!(benches);
