use crate::integrands::{EvenPolynomial, IntegrandSpec};
use crate::model::Regime;

/// A named example integrand with its regime. The registered `L` comes from
/// the growth sampler with margin; it is an empirical certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Builtin {
    pub name: &'static str,
    pub spec: IntegrandSpec,
    pub regime: Regime,
}

fn reg(n: usize, big_n: usize, p: f64, q: f64, mu: f64, l: f64) -> Regime {
    Regime::new(n, big_n, p, q, mu, l).expect("built-in regime is valid")
}

fn axis_sum(n: usize, q: f64) -> Vec<IntegrandSpec> {
    (0..n).map(|i| IntegrandSpec::axis(i, q)).collect()
}

/// `|z|² + z₁⁴ + z₂⁴` written as an even polynomial on `ℝ²`.
pub fn marcellini_polynomial() -> EvenPolynomial {
    EvenPolynomial::from_monomials(
        2,
        &[
            (1.0, vec![2, 0]),
            (1.0, vec![0, 2]),
            (1.0, vec![4, 0]),
            (1.0, vec![0, 4]),
        ],
    )
    .expect("valid polynomial")
}

pub fn builtins() -> Vec<Builtin> {
    let with_quadratic = |n: usize, q: f64| {
        let mut t = vec![IntegrandSpec::power(0.0, 2.0)];
        t.extend(axis_sum(n, q));
        IntegrandSpec::Sum(t)
    };
    vec![
        Builtin {
            name: "quadratic",
            spec: IntegrandSpec::power(0.0, 2.0),
            regime: reg(2, 1, 2.0, 4.0, 0.0, L_QUADRATIC),
        },
        Builtin {
            name: "power_nondegenerate",
            spec: IntegrandSpec::power(1.0, 4.0),
            regime: reg(2, 1, 4.0, 5.0, 1.0, L_POWER_NONDEGENERATE),
        },
        Builtin {
            name: "quartic_quarter",
            spec: IntegrandSpec::scaled(0.25, IntegrandSpec::power(0.0, 4.0)),
            regime: reg(2, 1, 4.0, 5.0, 0.0, L_QUARTIC_QUARTER),
        },
        Builtin {
            name: "marcellini",
            spec: with_quadratic(2, 4.0),
            regime: reg(2, 1, 2.0, 4.0, 0.0, L_MARCELLINI),
        },
        Builtin {
            name: "marcellini_poly",
            spec: IntegrandSpec::EvenPolynomial(marcellini_polynomial()),
            regime: reg(2, 1, 2.0, 4.0, 0.0, L_MARCELLINI),
        },
        Builtin {
            name: "vectorial_model",
            spec: with_quadratic(2, 4.0),
            regime: reg(2, 2, 2.0, 4.0, 0.0, L_VECTORIAL),
        },
        Builtin {
            name: "degenerate_p4",
            spec: IntegrandSpec::Sum(
                std::iter::once(IntegrandSpec::power(0.0, 4.0))
                    .chain(axis_sum(2, 6.0))
                    .collect(),
            ),
            regime: reg(2, 2, 4.0, 6.0, 0.0, L_DEGENERATE_P4),
        },
        Builtin {
            name: "scalar_3d",
            spec: with_quadratic(3, 5.0),
            regime: reg(3, 1, 2.0, 5.0, 0.0, L_SCALAR_3D),
        },
    ]
}

pub fn builtin(name: &str) -> Option<Builtin> {
    builtins().into_iter().find(|b| b.name == name)
}

// Sampled suprema over 8e4 points with |z| in [1e-3, 1e3], times 1.25, rounded up.
const L_QUADRATIC: f64 = 2.5;
const L_POWER_NONDEGENERATE: f64 = 5.0;
const L_QUARTIC_QUARTER: f64 = 5.0;
const L_MARCELLINI: f64 = 6.0;
const L_VECTORIAL: f64 = 6.0;
const L_DEGENERATE_P4: f64 = 9.0;
const L_SCALAR_3D: f64 = 7.5;
