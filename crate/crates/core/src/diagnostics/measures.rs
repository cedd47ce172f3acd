use crate::diagnostics::exponents::{a_alpha, ExponentChain};
use crate::diagnostics::fields::{
    average_energy, cell_average, cell_grad_sq, cells_in, simplices_in, v_gradients,
};
use crate::error::{Error, Result};
use crate::growth::gehring_exponent;
use crate::integrands::{moser_weight_eval, IntegrandSpec, MoserWeight};
use crate::model::{DiagnosticsEntry, DiscreteField, Region, Regime};

fn entry(id: &str, field: &DiscreteField, lhs: f64, rhs: f64, scale: f64) -> DiagnosticsEntry {
    DiagnosticsEntry {
        estimate_id: id.to_string(),
        lhs,
        rhs,
        fitted_exponent: None,
        grid: field.grid().cells_per_side(),
        amplitude: f64::NAN,
        epsilon: f64::NAN,
        energy_scale: scale,
    }
}

/// `lhs = avg_{B/2} |∇_h V_{μ,p}(∇u)|² + |∇_h V_{1,q'}(F'(∇u))|²`,
/// `rhs = (avg_B F(∇u) + 1)^b`.
pub fn higher_diff_measure(
    field: &DiscreteField,
    f: &IntegrandSpec,
    r: &Regime,
    chain: &ExponentChain,
    ball: &Region,
) -> Result<DiagnosticsEntry> {
    ball.require_in_unit_box()?;
    let half = ball.scaled(0.5);
    let vg = v_gradients(field, f, r)?;
    let cells = cells_in(field.grid(), &half);
    if cells.is_empty() {
        return Err(Error::RegionOutsideDomain);
    }
    let lhs = cells.iter().map(|&c| vg.total(c)).sum::<f64>() / cells.len() as f64;
    let scale = average_energy(field, f, ball)? + 1.0;
    Ok(entry("higher_diff", field, lhs, scale.powf(chain.b), scale))
}

/// `lhs = max_{T ⊂ B/8} |∇u|_T|`, `rhs = (avg_B F(∇u) + 1)^b`.
pub fn sup_grad_measure(
    field: &DiscreteField,
    f: &IntegrandSpec,
    ball: &Region,
    b: f64,
) -> Result<DiagnosticsEntry> {
    ball.require_in_unit_box()?;
    let ids = simplices_in(field.grid(), &ball.scaled(0.125));
    if ids.is_empty() {
        return Err(Error::RegionOutsideDomain);
    }
    let lhs = ids
        .iter()
        .map(|&k| field.gradients()[k].norm())
        .fold(0.0, f64::max);
    let scale = average_energy(field, f, ball)? + 1.0;
    Ok(entry("sup_grad", field, lhs, scale.powf(b), scale))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub log_constant: f64,
    /// Root mean square residual in log space.
    pub residual: f64,
}

/// Least squares fit of `log y = b log x + c`; needs at least four points.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    const MIN_POINTS: usize = 4;
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::TooFewPoints {
            need: MIN_POINTS,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("fit abscissae coincide".into()));
    }
    let b = sxy / sxx;
    let c = my - b * mx;
    let residual = (pts.iter().map(|p| (p.1 - b * p.0 - c).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerFit {
        exponent: b,
        log_constant: c,
        residual,
    })
}

/// Fits `b` from `lhs` against `avg_B F + 1` across entries and stores it on each.
pub fn attach_fitted_exponent(entries: &mut [DiagnosticsEntry]) -> Result<PowerFit> {
    let xs: Vec<f64> = entries.iter().map(|e| e.energy_scale).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.lhs).collect();
    let fit = fit_power_law(&xs, &ys)?;
    for e in entries.iter_mut() {
        e.fitted_exponent = Some(fit.exponent);
        e.rhs = e.energy_scale.powf(fit.exponent);
    }
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReverseHolderScan {
    /// Largest `t` whose ratio stays below the cap for every field.
    pub best_t: Option<f64>,
    /// `ratios[i][j]`: field `i`, exponent `t_grid[j]`.
    pub ratios: Vec<Vec<f64>>,
}

/// `(avg_{B/8} |∇_h V_{μ,p}|^{2t} + |∇_h V_{1,q'}(F')|^{2t})^{1/(2t)} / (avg_B F + 1)^b`
/// over an amplitude sweep of fields.
pub fn reverse_holder_scan(
    fields: &[DiscreteField],
    f: &IntegrandSpec,
    r: &Regime,
    t_grid: &[f64],
    ball: &Region,
    b: f64,
    cap: f64,
) -> Result<ReverseHolderScan> {
    ball.require_in_unit_box()?;
    if t_grid.iter().any(|&t| !(t > 1.0 && t < 2.0)) {
        return Err(Error::Domain("t grid must lie in (1,2)".into()));
    }
    let mut ratios = Vec::new();
    for u in fields {
        let vg = v_gradients(u, f, r)?;
        let cells = cells_in(u.grid(), &ball.scaled(0.125));
        let scale = (average_energy(u, f, ball)? + 1.0).powf(b);
        let row = t_grid
            .iter()
            .map(|&t| {
                let avg = cells
                    .iter()
                    .map(|&c| vg.primal[c].powf(t) + vg.dual[c].powf(t))
                    .sum::<f64>()
                    / cells.len().max(1) as f64;
                avg.powf(1.0 / (2.0 * t)) / scale
            })
            .collect();
        ratios.push(row);
    }
    let best_t = t_grid
        .iter()
        .enumerate()
        .filter(|(j, _)| ratios.iter().all(|row: &Vec<f64>| row[*j] <= cap))
        .map(|(_, &t)| t)
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t))));
    Ok(ReverseHolderScan { best_t, ratios })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogDecayProfile {
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
    /// `(q+p)/(2q)`.
    pub gamma: f64,
    /// `γ + 2`.
    pub decay_exponent: f64,
    /// `C` in `mass(σ) ≈ C log(r/σ)^{−(γ+2)}`.
    pub fitted_constant: f64,
    /// Root mean square log residual of the fit.
    pub fit_residual: f64,
}

/// `L²(B_σ)` masses of the discrete V-gradients and their fit to `C log(r/σ)^{−(γ+2)}`,
/// with `r` the radius of `ball` and `σ` running over `radii`.
pub fn log_decay_profile(
    field: &DiscreteField,
    f: &IntegrandSpec,
    r: &Regime,
    radii: &[f64],
    ball: &Region,
) -> Result<LogDecayProfile> {
    if radii.len() < 3 {
        return Err(Error::TooFewPoints {
            need: 3,
            got: radii.len(),
        });
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) || radii[0] > 0.5 * ball.radius || radii[radii.len() - 1] <= 0.0 {
        return Err(Error::Domain("radii must decrease inside B/2".into()));
    }
    ball.require_in_unit_box()?;
    let vg = v_gradients(field, f, r)?;
    let vol = field.grid().cell_volume();
    let masses: Vec<f64> = radii
        .iter()
        .map(|&s| {
            let sub = Region::new(ball.center.clone(), s, ball.kind).expect("positive radius");
            cells_in(field.grid(), &sub)
                .iter()
                .map(|&c| vol * vg.total(c))
                .sum()
        })
        .collect();
    let gamma = (r.q + r.p) / (2.0 * r.q);
    let k = gamma + 2.0;
    let logs: Vec<(f64, f64)> = radii
        .iter()
        .zip(&masses)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&s, &m)| (m.ln(), k * (ball.radius / s).ln().ln()))
        .collect();
    let (fitted_constant, fit_residual) = if logs.is_empty() {
        (0.0, 0.0)
    } else {
        let n = logs.len() as f64;
        let log_c = logs.iter().map(|(a, b)| a + b).sum::<f64>() / n;
        let res = (logs.iter().map(|(a, b)| (a + b - log_c).powi(2)).sum::<f64>() / n).sqrt();
        (log_c.exp(), res)
    };
    Ok(LogDecayProfile {
        radii: radii.to_vec(),
        masses,
        gamma,
        decay_exponent: k,
        fitted_constant,
        fit_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaccioppoliReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub a_alpha: f64,
    pub big_m: f64,
}

/// `‖η ∇_h 𝚕_α(∇u)‖_{L²}` against `𝙰_α M^{1/2} ‖𝚕_α(∇u) ∇η‖_{L²}` with the radial
/// cutoff `η` equal to 1 on `inner` and 0 outside `outer`.
pub fn caccioppoli_check(
    field: &DiscreteField,
    f: &IntegrandSpec,
    r: &Regime,
    alpha: f64,
    inner: &Region,
    outer: &Region,
) -> Result<CaccioppoliReport> {
    if field.ncomp() != 1 {
        return Err(Error::ScalarOnly(field.ncomp()));
    }
    outer.require_in_unit_box()?;
    if !(inner.radius < outer.radius) || inner.center != outer.center {
        return Err(Error::Domain("cutoff regions must be concentric and nested".into()));
    }
    let grid = field.grid();
    let w = MoserWeight::new(*r, alpha)?;
    let l: Vec<f64> = field
        .gradients()
        .iter()
        .map(|z| moser_weight_eval(&w, z).l_alpha)
        .collect();
    let lc = cell_average(grid, &l, 1);
    let dl = cell_grad_sq(grid, &lc, 1);
    let (r2, r1) = (inner.radius, outer.radius);
    let vol = grid.cell_volume();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for c in 0..grid.cell_count() {
        let d = outer.distance(&grid.cell_center(c));
        let eta = if d <= r2 {
            1.0
        } else if d < r1 {
            (r1 - d) / (r1 - r2)
        } else {
            0.0
        };
        lhs += vol * eta * eta * dl[c];
        if d > r2 && d < r1 {
            rhs += vol * lc[c] * lc[c] / ((r1 - r2) * (r1 - r2));
        }
    }
    let e = (r.q - r.p) / (r.q - 1.0);
    let mut big_m: f64 = 1.0;
    for k in simplices_in(grid, outer) {
        big_m = big_m.max(f.gradient(&field.gradients()[k])?.norm().powf(e));
    }
    let a = a_alpha(alpha, -1.0);
    let lhs = lhs.sqrt();
    let rhs = a * big_m.sqrt() * rhs.sqrt();
    Ok(CaccioppoliReport {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
        a_alpha: a,
        big_m,
    })
}

/// `‖F'(∇u)‖_{q'}^{q'} / (∫ F(∇u) + 1)` over simplices with barycenter in `B`.
pub fn stress_integrability(
    field: &DiscreteField,
    f: &IntegrandSpec,
    r: &Regime,
    ball: &Region,
) -> Result<f64> {
    let vol = field.grid().simplex_volume();
    let (mut stress, mut energy) = (0.0, 0.0);
    for k in simplices_in(field.grid(), ball) {
        let (v, g) = f.eval_grad(&field.gradients()[k])?;
        stress += vol * g.norm().powf(r.q_conj());
        energy += vol * v;
    }
    Ok(stress / (energy + 1.0))
}

/// Nonnegative values on a `per_side^dim` array of equal cells covering a cube
/// `Q₁`, first axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeData {
    pub dim: usize,
    pub per_side: usize,
    pub values: Vec<f64>,
}

impl CubeData {
    pub fn new(dim: usize, per_side: usize, values: Vec<f64>) -> Result<Self> {
        if !(dim == 2 || dim == 3) || values.len() != per_side.pow(dim as u32) {
            return Err(Error::Domain("cube data shape mismatch".into()));
        }
        if per_side % 4 != 0 || per_side < 4 {
            return Err(Error::Domain("cells per side must be a positive multiple of 4".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Domain("cube data must be finite and nonnegative".into()));
        }
        Ok(Self {
            dim,
            per_side,
            values,
        })
    }

    /// Cell field `|∇_h V_{μ,p}|² + |∇_h V_{1,q'}(F')|²` of a solved field.
    pub fn from_field(field: &DiscreteField, f: &IntegrandSpec, r: &Regime) -> Result<Self> {
        let vg = v_gradients(field, f, r)?;
        let g = field.grid();
        Self::new(
            g.dim(),
            g.cells_per_side(),
            (0..g.cell_count()).map(|c| vg.total(c)).collect(),
        )
    }
}

/// Inclusion–exclusion box sums over a padded prefix-sum array.
struct Prefix {
    dim: usize,
    side: usize,
    sums: Vec<f64>,
}

impl Prefix {
    fn new(data: &CubeData, map: impl Fn(f64) -> f64) -> Self {
        let s = data.per_side + 1;
        let mut sums = vec![0.0; s.pow(data.dim as u32)];
        let idx = |m: &[usize]| m.iter().rev().fold(0, |acc, &i| acc * s + i);
        for (c, &v) in data.values.iter().enumerate() {
            let mut m: Vec<usize> = (0..data.dim)
                .map(|ax| (c / data.per_side.pow(ax as u32)) % data.per_side + 1)
                .collect();
            let k = idx(&m);
            sums[k] = map(v);
            m.clear();
        }
        for ax in 0..data.dim {
            let stride = s.pow(ax as u32);
            for k in 0..sums.len() {
                if (k / stride) % s > 0 {
                    sums[k] += sums[k - stride];
                }
            }
        }
        Self {
            dim: data.dim,
            side: s,
            sums,
        }
    }

    /// Sum over cells with multi-index in `[lo, hi)`.
    fn sum(&self, lo: &[usize], hi: &[usize]) -> f64 {
        let mut total = 0.0;
        for mask in 0..(1usize << self.dim) {
            let mut k = 0;
            let mut sign = 1.0;
            for ax in (0..self.dim).rev() {
                let pick_lo = mask & (1 << ax) != 0;
                k = k * self.side + if pick_lo { lo[ax] } else { hi[ax] };
                if pick_lo {
                    sign = -sign;
                }
            }
            total += sign * self.sums[k];
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GehringReport {
    pub t: f64,
    pub c_star: f64,
    /// `(avg_{Q_{1/2}} v^t)^{1/t}`.
    pub lhs: f64,
    /// `2^{4n+4} avg_{Q₁} v`.
    pub rhs: f64,
    pub holds: bool,
}

fn for_each_cube(data: &CubeData, mut visit: impl FnMut(&[usize], usize) -> Result<()>) -> Result<()> {
    let k = data.per_side;
    let nodes = (k + 1).pow(data.dim as u32);
    for node in 0..nodes {
        let x: Vec<usize> = (0..data.dim)
            .map(|ax| (node / (k + 1).pow(ax as u32)) % (k + 1))
            .collect();
        let reach = x.iter().map(|&i| i.min(k - i)).min().unwrap_or(0);
        let mut half = 2;
        while half <= reach {
            visit(&x, half)?;
            half += 2;
        }
    }
    Ok(())
}

fn cube_avg(pre: &Prefix, center: &[usize], half: usize) -> f64 {
    let lo: Vec<usize> = center.iter().map(|&c| c - half).collect();
    let hi: Vec<usize> = center.iter().map(|&c| c + half).collect();
    pre.sum(&lo, &hi) / ((2 * half) as f64).powi(center.len() as i32)
}

/// Largest `avg_{Q_{ϱ/2}} v / (avg_{Q_ϱ} v^m)^{1/m}` over lattice-aligned cubes in `Q₁`.
pub fn reverse_holder_constant(data: &CubeData, m: f64) -> Result<f64> {
    let pv = Prefix::new(data, |v| v);
    let pm = Prefix::new(data, |v| v.powf(m));
    let mut worst: f64 = 0.0;
    for_each_cube(data, |x, half| {
        let inner = cube_avg(&pv, x, half / 2);
        let outer = cube_avg(&pm, x, half).max(0.0).powf(1.0 / m);
        if inner > 0.0 {
            worst = worst.max(inner / outer);
        }
        Ok(())
    })?;
    Ok(worst)
}

/// Checks the reverse Hölder hypothesis `avg_{Q_{ϱ/2}} v ≤ ĉM (avg_{Q_ϱ} v^m)^{1/m}` on
/// every lattice-aligned cube, then verifies the improved integrability at
/// `t = gehring_exponent(max(ĉ, s₀), M, m)`.
pub fn gehring_selfimprove(
    data: &CubeData,
    big_m: f64,
    m: f64,
    c_hat: f64,
    s0: f64,
) -> Result<GehringReport> {
    let pv = Prefix::new(data, |v| v);
    let pm = Prefix::new(data, |v| v.powf(m));
    let h = 2.0 / data.per_side as f64;
    for_each_cube(data, |x, half| {
        let inner = cube_avg(&pv, x, half / 2);
        let bound = c_hat * big_m * cube_avg(&pm, x, half).max(0.0).powf(1.0 / m);
        if inner > bound * (1.0 + 1e-12) {
            return Err(Error::PreconditionViolation {
                center: x.iter().map(|&i| i as f64 * h - 1.0).collect(),
                half_side: half as f64 * h,
                ratio: inner / bound,
            });
        }
        Ok(())
    })?;
    let c_star = c_hat.max(s0);
    let t = gehring_exponent(c_star, big_m, m)?;
    let k = data.per_side;
    let center = vec![k / 2; data.dim];
    let pt = Prefix::new(data, |v| v.powf(t));
    let lhs = cube_avg(&pt, &center, k / 4).powf(1.0 / t);
    let rhs = 2f64.powi(4 * data.dim as i32 + 4) * cube_avg(&pv, &center, k / 2);
    Ok(GehringReport {
        t,
        c_star,
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}
