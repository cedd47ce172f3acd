//! Prints the sampled structural constant of every built-in integrand next to
//! its registered `L`.

use legendre_core::growth::empirical_structural_constant;
use legendre_core::integrands::builtins;

fn main() {
    for b in builtins() {
        let mut worst: f64 = 0.0;
        for seed in 0..4 {
            let c = empirical_structural_constant(&b.spec, &b.regime, 20_000, 1e3, seed)
                .expect("built-in evaluates");
            worst = worst.max(c);
        }
        println!("{:<22} sampled {:>10.5} registered {}", b.name, worst, b.regime.l);
    }
}
