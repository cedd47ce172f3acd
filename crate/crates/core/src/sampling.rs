//! Seeded sampling laws shared by the certification and probing routines.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::GradMat;

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on the unit sphere of `ℝ^{rows×cols}`.
pub fn random_direction(rng: &mut impl Rng, shape: (usize, usize)) -> GradMat {
    loop {
        let data: Vec<f64> = (0..shape.0 * shape.1)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let z = GradMat::from_vec(shape.0, shape.1, data).expect("finite normals");
        let n = z.norm();
        if n > 1e-12 {
            return z.scale(1.0 / n);
        }
    }
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Point with log-uniform norm in `[lo, hi]` and uniform direction.
pub fn log_radius_point(rng: &mut impl Rng, shape: (usize, usize), lo: f64, hi: f64) -> GradMat {
    let r = log_uniform(rng, lo, hi);
    random_direction(rng, shape).scale(r)
}

/// Uniform point in the closed ball of radius `radius`.
pub fn ball_point(rng: &mut impl Rng, shape: (usize, usize), radius: f64) -> GradMat {
    let d = (shape.0 * shape.1) as f64;
    let r = radius * rng.gen::<f64>().powf(1.0 / d);
    random_direction(rng, shape).scale(r)
}
