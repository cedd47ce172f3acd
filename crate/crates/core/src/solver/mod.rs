//! Regularized Dirichlet minimization on Kuhn grids and the ε-schedule.

mod assembly;
mod banded;
mod boundary;
mod export;

pub use assembly::{assemble, energy, Assembled, Dofs};
pub use banded::BandedSym;
pub use boundary::{boundary_values, mollify_boundary, BoundaryFamily};
pub use export::{fmt17, write_gradients_csv, write_nodes_csv};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::integrands::IntegrandSpec;
use crate::model::{DiscreteField, Grid, Regime, SolveReport};

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub epsilons: Vec<f64>,
    /// Mollifier width per ε.
    pub mollifier_width: Vec<f64>,
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub max_newton_iters: usize,
}

impl Schedule {
    /// `ε_k = 2^{−k}`, `k = 1..=count`, mollifier width `ε`.
    pub fn dyadic(count: usize) -> Self {
        Self::from_epsilons((1..=count).map(|k| 0.5f64.powi(k as i32)).collect())
    }

    pub fn from_epsilons(epsilons: Vec<f64>) -> Self {
        Self {
            mollifier_width: epsilons.clone(),
            epsilons,
            tol_energy: 1e-12,
            tol_residual: 1e-9,
            max_newton_iters: 200,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(m.to_string()));
        if self.epsilons.is_empty() || self.epsilons.len() != self.mollifier_width.len() {
            return bad("schedule needs one mollifier width per epsilon");
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return bad("epsilons must lie in (0,1]");
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad("epsilons must be strictly decreasing");
        }
        if !(self.tol_energy > 0.0 && self.tol_residual > 0.0) || self.max_newton_iters == 0 {
            return bad("tolerances and iteration cap must be positive");
        }
        Ok(())
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self::dyadic(6)
    }
}

/// `F_ε(z) = F(z) + γ_ε ℓ₁(z)^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedIntegrand {
    pub base: IntegrandSpec,
    pub gamma_eps: f64,
    pub q: f64,
}

impl RegularizedIntegrand {
    pub fn new(base: IntegrandSpec, gamma_eps: f64, q: f64) -> Result<Self> {
        if !(gamma_eps > 0.0 && gamma_eps < 1.0) {
            return Err(Error::Domain(format!("gamma_eps = {gamma_eps} not in (0,1)")));
        }
        base.validate()?;
        Ok(Self { base, gamma_eps, q })
    }

    pub fn spec(&self) -> IntegrandSpec {
        self.base.clone()
            + IntegrandSpec::scaled(self.gamma_eps, IntegrandSpec::power(1.0, self.q))
    }
}

/// `γ_ε = (1 + ε⁻¹ + ε⁻¹‖∇ũ_ε‖_q^{2q})⁻¹`.
pub fn gamma_eps(eps: f64, grad_q_norm: f64, q: f64) -> f64 {
    1.0 / (1.0 + 1.0 / eps + grad_q_norm.powf(2.0 * q) / eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub max_newton_iters: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_energy: 1e-12,
            tol_residual: 1e-9,
            max_newton_iters: 200,
        }
    }
}

impl From<&Schedule> for Tolerances {
    fn from(s: &Schedule) -> Self {
        Self {
            tol_energy: s.tol_energy,
            tol_residual: s.tol_residual,
            max_newton_iters: s.max_newton_iters,
        }
    }
}

/// Relative energy change treated as rounding noise in the line search.
const ENERGY_ROUNDING: f64 = 1e-13;

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `(H + τI) d = b` with `τ` growing tenfold from `1e−10·max diag H`
/// until the shifted matrix factors. Needed where degenerate integrands have a
/// vanishing Hessian, e.g. `|z|^p` with `p > 2` on flat regions.
fn shifted_solve(h: &BandedSym, b: &[f64]) -> Option<Vec<f64>> {
    let scale = h.max_diagonal();
    if !(scale > 0.0) {
        return None;
    }
    let mut tau = 1e-10 * scale;
    while tau <= scale {
        let mut shifted = h.clone();
        for i in 0..shifted.size() {
            shifted.add_lower(i, i, tau);
        }
        if let Some(d) = shifted.solve(b) {
            return Some(d);
        }
        tau *= 10.0;
    }
    None
}

/// Damped Newton on the exact discrete energy over interior values. Boundary
/// values are taken from `boundary`; interior values from `init` when given,
/// otherwise from `boundary` as well.
pub fn minimize_spec(
    spec: &IntegrandSpec,
    grid: Arc<Grid>,
    ncomp: usize,
    boundary: &[f64],
    init: Option<&[f64]>,
    tols: Tolerances,
) -> Result<(DiscreteField, usize, f64, f64)> {
    let m = minimize_traced(spec, grid, ncomp, boundary, init, tols)?;
    Ok((m.field, m.iterations, m.energy, m.residual))
}

/// Result of [`minimize_traced`].
#[derive(Debug, Clone)]
pub struct Minimized {
    pub field: DiscreteField,
    pub iterations: usize,
    pub energy: f64,
    pub residual: f64,
    /// Energy before the first step and after every accepted step.
    pub energies: Vec<f64>,
}

/// [`minimize_spec`] that also records the energy after each Newton step.
pub fn minimize_traced(
    spec: &IntegrandSpec,
    grid: Arc<Grid>,
    ncomp: usize,
    boundary: &[f64],
    init: Option<&[f64]>,
    tols: Tolerances,
) -> Result<Minimized> {
    if boundary.len() != grid.node_count() * ncomp {
        return Err(Error::ShapeMismatch {
            expected: (grid.node_count(), ncomp),
            got: (boundary.len(), 1),
        });
    }
    spec.validate_for((ncomp, grid.dim()))?;
    let dofs = Dofs::new(Arc::clone(&grid), ncomp);
    let mut u = boundary.to_vec();
    if let Some(init) = init {
        for &v in dofs.interior_nodes() {
            for a in 0..ncomp {
                u[v * ncomp + a] = init[v * ncomp + a];
            }
        }
    }
    let mut asm = assemble(spec, &dofs, &u, true)?;
    let mut energies = vec![asm.energy];
    let mut last_rel = f64::INFINITY;
    let mut iters = 0;
    loop {
        let res = sup_norm(&asm.gradient);
        if dofs.count() == 0 || (res < tols.tol_residual && last_rel < tols.tol_energy) {
            break;
        }
        if iters == tols.max_newton_iters {
            return Err(Error::NonConvergence {
                iterations: iters,
                residual: res,
            });
        }
        iters += 1;
        let h = asm.hessian.as_ref().expect("hessian assembled");
        let neg: Vec<f64> = asm.gradient.iter().map(|g| -g).collect();
        let newton = h.solve(&neg).or_else(|| shifted_solve(h, &neg));
        let gradient_step: Vec<f64> = {
            let s = h.max_diagonal().max(1e-300);
            neg.iter().map(|g| g / s).collect()
        };
        let directions: Vec<&Vec<f64>> = match &newton {
            Some(d) => vec![d, &gradient_step],
            None => vec![&gradient_step],
        };
        let mut moved = None;
        'dirs: for d in directions {
            let mut t = 1.0;
            for _ in 0..60 {
                let trial = dofs.apply_step(&u, t, d);
                if let Ok(e) = energy(spec, &grid, ncomp, &trial) {
                    if e < asm.energy {
                        moved = Some((trial, e));
                        break 'dirs;
                    }
                    // energy flat to rounding: accept if the residual still drops
                    if t == 1.0 && e <= asm.energy + ENERGY_ROUNDING * asm.energy.abs() {
                        let next = assemble(spec, &dofs, &trial, false)?;
                        if sup_norm(&next.gradient) < 0.5 * res {
                            moved = Some((trial, e.min(asm.energy)));
                            break 'dirs;
                        }
                    }
                }
                t *= 0.5;
            }
        }
        match moved {
            Some((trial, e)) => {
                last_rel = (asm.energy - e) / asm.energy.abs().max(f64::MIN_POSITIVE);
                u = trial;
                asm = assemble(spec, &dofs, &u, true)?;
                energies.push(asm.energy);
            }
            // no representable decrease left
            None if res < tols.tol_residual => break,
            None => {
                return Err(Error::NonConvergence {
                    iterations: iters,
                    residual: res,
                })
            }
        }
    }
    let res = sup_norm(&asm.gradient);
    Ok(Minimized {
        field: DiscreteField::new(grid, ncomp, u)?,
        iterations: iters,
        energy: asm.energy,
        residual: res,
        energies,
    })
}

/// Minimizes `Σ_T vol(T) F_ε(∇u|_T)` with the given boundary values.
pub fn minimize_dirichlet(
    feps: &RegularizedIntegrand,
    grid: Arc<Grid>,
    ncomp: usize,
    boundary: &[f64],
    init: Option<&[f64]>,
    tols: Tolerances,
) -> Result<(DiscreteField, SolveReport)> {
    let (field, iterations, energy, residual_sup) =
        minimize_spec(&feps.spec(), grid, ncomp, boundary, init, tols)?;
    Ok((
        field,
        SolveReport {
            energy,
            residual_sup,
            iterations,
            epsilon: f64::NAN,
            gamma_eps: feps.gamma_eps,
        },
    ))
}

/// Sup-norm over interior unknowns of the discrete weak Euler–Lagrange residual.
pub fn el_residual(spec: &IntegrandSpec, field: &DiscreteField) -> Result<f64> {
    let dofs = Dofs::new(field.grid_arc(), field.ncomp());
    Ok(sup_norm(&assemble(spec, &dofs, field.values(), false)?.gradient))
}

/// Discrete harmonic extension of the boundary values.
pub fn harmonic_extension(grid: Arc<Grid>, ncomp: usize, boundary: &[f64]) -> Result<DiscreteField> {
    let tols = Tolerances {
        tol_energy: 1e-14,
        tol_residual: 1e-12,
        max_newton_iters: 20,
    };
    let zero: Vec<f64> = vec![0.0; boundary.len()];
    let init = Some(&zero[..]);
    Ok(minimize_spec(&IntegrandSpec::power(0.0, 2.0), grid, ncomp, boundary, init, tols)?.0)
}

/// `(Σ_T vol(T) |∇u|_T|^q)^{1/q}`.
pub fn grad_lq_norm(field: &DiscreteField, q: f64) -> f64 {
    let vol = field.grid().simplex_volume();
    let s: f64 = field.gradients().iter().map(|g| g.norm().powf(q)).sum();
    (s * vol).powf(1.0 / q)
}

/// `‖∇(u − v)‖_{L^p}` for fields on the same grid.
pub fn grad_lp_distance(u: &DiscreteField, v: &DiscreteField, p: f64) -> f64 {
    let vol = u.grid().simplex_volume();
    let s: f64 = u
        .gradients()
        .iter()
        .zip(v.gradients())
        .map(|(a, b)| (a - b).norm().powf(p))
        .sum();
    (s * vol).powf(1.0 / p)
}

/// Discrete analogue of the scheme's monitored quantities at one ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeMonitor {
    pub epsilon: f64,
    pub gamma_eps: f64,
    /// `‖∇ũ_ε‖_q` of the harmonic extension of the mollified data.
    pub extension_q_norm: f64,
    /// `∫ F_ε(∇u_ε)`.
    pub energy_eps: f64,
    /// `∫ F(∇u_ε)`.
    pub energy_base: f64,
    /// `γ_ε ‖∇u_ε‖_q^q`.
    pub gamma_term: f64,
    /// `‖∇(u_ε − u_{ε_prev})‖_p`; none at the first ε.
    pub increment: Option<f64>,
    /// `L⁻¹‖∇u_ε‖_p^p + γ_ε‖∇u_ε‖_q^q`, bounded by `energy_eps`.
    pub enes_lhs: f64,
    /// `‖F'(∇u_ε)‖_{q'}^{q'} / (∫F(∇u_ε) + 1)`.
    pub stress_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub reports: Vec<SolveReport>,
    pub monitors: Vec<SchemeMonitor>,
    pub field: DiscreteField,
    /// `γ_ε‖∇u_ε‖_q^q` never grew beyond rounding slack.
    pub gamma_monotone: bool,
    /// The energy bound held at every ε.
    pub enes_holds: bool,
}

impl SchemeOutcome {
    pub fn gamma_terms(&self) -> Vec<f64> {
        self.monitors.iter().map(|m| m.gamma_term).collect()
    }

    pub fn increments(&self) -> Vec<f64> {
        self.monitors.iter().filter_map(|m| m.increment).collect()
    }
}

/// Relative slack before a growing γ-term counts as a scheme violation.
pub const GAMMA_MONOTONE_SLACK: f64 = 1e-9;

/// Runs the ε-schedule: mollify, extend, form `γ_ε` and `F_ε`, solve with warm start.
pub fn run_scheme(
    f: &IntegrandSpec,
    r: &Regime,
    grid: Arc<Grid>,
    boundary: &[f64],
    schedule: &Schedule,
) -> Result<SchemeOutcome> {
    schedule.check()?;
    if grid.dim() != r.n {
        return Err(Error::Domain(format!(
            "grid dimension {} differs from n = {}",
            grid.dim(),
            r.n
        )));
    }
    f.validate_for(r.shape())?;
    let nc = r.big_n;
    let tols = Tolerances::from(schedule);
    let mut reports = Vec::new();
    let mut monitors: Vec<SchemeMonitor> = Vec::new();
    let mut prev: Option<DiscreteField> = None;
    for (&eps, &width) in schedule.epsilons.iter().zip(&schedule.mollifier_width) {
        let g = mollify_boundary(&grid, nc, boundary, width);
        let ext = harmonic_extension(Arc::clone(&grid), nc, &g)?;
        let ext_norm = grad_lq_norm(&ext, r.q);
        let gamma = gamma_eps(eps, ext_norm, r.q);
        let feps = RegularizedIntegrand::new(f.clone(), gamma, r.q)?;
        let init = prev.as_ref().map_or(ext.values(), |u| u.values());
        let (u, mut rep) = minimize_dirichlet(&feps, Arc::clone(&grid), nc, &g, Some(init), tols)?;
        rep.epsilon = eps;
        let vol = grid.simplex_volume();
        let (mut base, mut lp, mut lq, mut stress) = (0.0, 0.0, 0.0, 0.0);
        for z in u.gradients() {
            let (v, dv) = f.eval_grad(z)?;
            base += v;
            lp += z.norm().powf(r.p);
            lq += z.norm().powf(r.q);
            stress += dv.norm().powf(r.q_conj());
        }
        let (base, lp, lq, stress) = (base * vol, lp * vol, lq * vol, stress * vol);
        monitors.push(SchemeMonitor {
            epsilon: eps,
            gamma_eps: gamma,
            extension_q_norm: ext_norm,
            energy_eps: rep.energy,
            energy_base: base,
            gamma_term: gamma * lq,
            increment: prev.as_ref().map(|v| grad_lp_distance(&u, v, r.p)),
            enes_lhs: lp / r.l + gamma * lq,
            stress_ratio: stress / (base + 1.0),
        });
        reports.push(rep);
        prev = Some(u);
    }
    let gamma_monotone = monitors
        .windows(2)
        .all(|w| w[1].gamma_term <= w[0].gamma_term * (1.0 + GAMMA_MONOTONE_SLACK));
    let enes_holds = monitors
        .iter()
        .all(|m| m.enes_lhs <= m.energy_eps * (1.0 + 1e-12));
    Ok(SchemeOutcome {
        reports,
        monitors,
        field: prev.expect("schedule is non-empty"),
        gamma_monotone,
        enes_holds,
    })
}
