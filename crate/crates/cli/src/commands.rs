//! Subcommand bodies. Each writes CSV to the given sink and returns whether
//! every certification or diagnostic it ran succeeded.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use legendre_core::diagnostics::{
    a_alpha, attach_fitted_exponent, caccioppoli_check, gehring_selfimprove, hd_exponents,
    higher_diff_measure, log_decay_profile, moser_alpha_sequence, moser_bound, moser_log_product,
    reverse_holder_constant, reverse_holder_scan, stress_integrability, sup_grad_measure, CubeData,
    ExponentChain, MoserParams,
};
use legendre_core::duality::{conjugate, DEFAULT_TOL};
use legendre_core::growth::{check_legendre, gehring_exponent};
use legendre_core::model::validate_regime;
use legendre_core::sampling::{log_radius_point, seeded};
use legendre_core::solver::{
    boundary_values, fmt17, harmonic_extension, minimize_spec, run_scheme, write_gradients_csv,
    write_nodes_csv, Tolerances,
};
use legendre_core::{DiagnosticsEntry, DiscreteField, GradMat, Grid, IntegrandSpec, Regime};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, SweepAxis};
use crate::error::CliError;

type Outcome = Result<bool, CliError>;

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt17)
}

fn solve_grid(cfg: &ExperimentConfig, r: &Regime) -> Result<Arc<Grid>, CliError> {
    if !(r.n == 2 || r.n == 3) {
        return Err(CliError::Config(format!("solving needs n in {{2,3}}, got n = {}", r.n)));
    }
    Ok(Arc::new(Grid::new(r.n, cfg.cells_per_side)?))
}

/// Minimizer of the unregularized energy with the configured boundary family,
/// started from the harmonic extension of the data.
pub fn solve_direct(
    cfg: &ExperimentConfig,
    f: &IntegrandSpec,
    r: &Regime,
    amplitude: f64,
) -> Result<DiscreteField, CliError> {
    let grid = solve_grid(cfg, r)?;
    let g = boundary_values(&grid, r.big_n, cfg.boundary.family, amplitude);
    let h = harmonic_extension(grid.clone(), r.big_n, &g)?;
    let tols = Tolerances::from(&cfg.schedule);
    let (u, _, _, _) = minimize_spec(f, grid, r.big_n, &g, Some(h.values()), tols)?;
    Ok(u)
}

/// `2(n−1)/(n−3)` for `n ≥ 4`; otherwise any finite exponent is admissible and
/// `max(10, 4q/p)` is used.
pub fn default_sobolev_exp(r: &Regime) -> f64 {
    if r.n >= 4 {
        2.0 * (r.n as f64 - 1.0) / (r.n as f64 - 3.0)
    } else {
        (4.0 * r.q / r.p).max(10.0)
    }
}

fn chain(cfg: &ExperimentConfig, r: &Regime) -> Result<ExponentChain, CliError> {
    Ok(hd_exponents(r, cfg.diagnostics.sobolev_exp.unwrap_or_else(|| default_sobolev_exp(r)))?)
}

pub fn check(cfg: &ExperimentConfig, out: &mut dyn Write) -> Outcome {
    let r = &cfg.regime;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "seed", "samples", "radius", "n", "N", "p", "q", "mu", "L", "constant_assf3",
        "constant_assf1", "constant_lower", "certified",
    ])?;
    let cert = check_legendre(&cfg.integrand, r, cfg.check.samples, cfg.check.radius, cfg.seed);
    let (c3, c1, cl, ok) = match &cert {
        Ok(c) => (c.constant_assf3, c.constant_assf1, c.constant_lower, c.certifies()),
        Err(legendre_core::Error::NotElliptic { ratio, .. }) => (f64::NAN, f64::NAN, *ratio, false),
        Err(e) => return Err(e.clone().into()),
    };
    w.write_record([
        cfg.seed.to_string(),
        cfg.check.samples.to_string(),
        fmt17(cfg.check.radius),
        r.n.to_string(),
        r.big_n.to_string(),
        fmt17(r.p),
        fmt17(r.q),
        fmt17(r.mu),
        fmt17(r.l),
        fmt17(c3),
        fmt17(c1),
        fmt17(cl),
        ok.to_string(),
    ])?;
    w.flush()?;
    Ok(ok)
}

pub fn conjugate_table(
    cfg: &ExperimentConfig,
    points: &[Vec<f64>],
    samples: usize,
    radius: f64,
    out: &mut dyn Write,
) -> Outcome {
    let r = &cfg.regime;
    let (rows, cols) = r.shape();
    let mut xis = Vec::new();
    for p in points {
        xis.push(GradMat::from_vec(rows, cols, p.clone()).map_err(|_| {
            CliError::Config(format!("--xi needs {} finite entries, got {}", rows * cols, p.len()))
        })?);
    }
    if points.is_empty() {
        let mut rng = seeded(cfg.seed);
        xis.extend((0..samples).map(|_| log_radius_point(&mut rng, (rows, cols), 1e-3, radius)));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["seed".to_string()];
    header.extend((1..=rows * cols).map(|k| format!("xi{k}")));
    header.push("fstar".into());
    header.extend((1..=rows * cols).map(|k| format!("z{k}")));
    header.extend(["newton_iters".into(), "residual".into()]);
    w.write_record(&header)?;
    let results: Vec<_> = xis.par_iter().map(|xi| conjugate(&cfg.integrand, xi, DEFAULT_TOL)).collect();
    for (xi, res) in xis.iter().zip(results) {
        let c = res?;
        let mut rec = vec![cfg.seed.to_string()];
        rec.extend(xi.as_slice().iter().map(|&x| fmt17(x)));
        rec.push(fmt17(c.value));
        rec.extend(c.argmax.as_slice().iter().map(|&x| fmt17(x)));
        rec.push(c.newton_iters.to_string());
        rec.push(fmt17(c.residual));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(true)
}

pub fn solve(cfg: &ExperimentConfig, out_dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let r = &cfg.regime;
    let grid = solve_grid(cfg, r)?;
    let outcomes: Vec<_> = cfg
        .boundary
        .amplitudes
        .par_iter()
        .map(|&a| {
            let g = boundary_values(&grid, r.big_n, cfg.boundary.family, a);
            run_scheme(&cfg.integrand, r, grid.clone(), &g, &cfg.schedule)
        })
        .collect();
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "amplitude", "epsilon", "gamma_eps", "iterations", "residual", "energy_eps", "energy_base",
        "gamma_term", "increment", "enes_lhs", "stress_ratio", "extension_q_norm",
    ])?;
    let mut ok = true;
    for (k, (a, res)) in cfg.boundary.amplitudes.iter().zip(outcomes).enumerate() {
        let o = res?;
        ok &= o.enes_holds;
        for (rep, m) in o.reports.iter().zip(&o.monitors) {
            w.write_record([
                fmt17(*a),
                fmt17(rep.epsilon),
                fmt17(rep.gamma_eps),
                rep.iterations.to_string(),
                fmt17(rep.residual_sup),
                fmt17(m.energy_eps),
                fmt17(m.energy_base),
                fmt17(m.gamma_term),
                opt(m.increment),
                fmt17(m.enes_lhs),
                fmt17(m.stress_ratio),
                fmt17(m.extension_q_norm),
            ])?;
        }
        if let Some(dir) = out_dir {
            std::fs::create_dir_all(dir)?;
            let nodes = std::fs::File::create(dir.join(format!("nodes_{k}.csv")))?;
            write_nodes_csv(&o.field, std::io::BufWriter::new(nodes))?;
            let grads = std::fs::File::create(dir.join(format!("gradients_{k}.csv")))?;
            write_gradients_csv(&o.field, std::io::BufWriter::new(grads))?;
        }
    }
    w.flush()?;
    Ok(ok)
}

fn tag(e: &mut DiagnosticsEntry, id: String, amplitude: f64) {
    e.estimate_id = id;
    e.amplitude = amplitude;
    e.epsilon = 0.0;
}

fn bare_entry(id: String, lhs: f64, rhs: f64, u: &DiscreteField, amplitude: f64) -> DiagnosticsEntry {
    DiagnosticsEntry {
        estimate_id: id,
        lhs,
        rhs,
        fitted_exponent: None,
        grid: u.grid().cells_per_side(),
        amplitude,
        epsilon: 0.0,
        energy_scale: f64::NAN,
    }
}

/// Per-field estimates at one amplitude; `ok` turns false on a failed check.
fn measure_field(
    cfg: &ExperimentConfig,
    f: &IntegrandSpec,
    r: &Regime,
    u: &DiscreteField,
    amplitude: f64,
    ok: &mut bool,
) -> Result<Vec<DiagnosticsEntry>, CliError> {
    let d = &cfg.diagnostics;
    let ball = &d.region;
    let ch = chain(cfg, r)?;
    let mut entries = Vec::new();
    for est in &d.estimates {
        match est.as_str() {
            "higher_diff" => {
                let mut e = higher_diff_measure(u, f, r, &ch, ball)?;
                tag(&mut e, est.clone(), amplitude);
                entries.push(e);
            }
            "sup_grad" => {
                let mut e = sup_grad_measure(u, f, ball, ch.b)?;
                tag(&mut e, est.clone(), amplitude);
                entries.push(e);
            }
            "stress" => {
                // ratio against the normalized right-hand side 1
                let s = stress_integrability(u, f, r, ball)?;
                entries.push(bare_entry(est.clone(), s, 1.0, u, amplitude));
            }
            "caccioppoli" if r.big_n == 1 => {
                for &alpha in &d.alphas {
                    let c = caccioppoli_check(u, f, r, alpha, &ball.scaled(0.25), &ball.scaled(0.5))?;
                    entries.push(bare_entry(format!("caccioppoli(alpha={alpha})"), c.lhs, c.rhs, u, amplitude));
                }
            }
            "log_decay" => {
                let radii: Vec<f64> = d.radii.iter().map(|s| s * ball.radius).collect();
                let p = log_decay_profile(u, f, r, &radii, ball)?;
                for (s, m) in p.radii.iter().zip(&p.masses) {
                    let model = p.fitted_constant * (ball.radius / s).ln().powf(-p.decay_exponent);
                    entries.push(bare_entry(format!("log_decay(sigma={s})"), *m, model, u, amplitude));
                }
            }
            "gehring" => {
                let data = CubeData::from_field(u, f, r)?;
                let m = d.gehring_m;
                let c_hat = reverse_holder_constant(&data, m)?.max(1.0);
                let rep = gehring_selfimprove(&data, 1.0, m, c_hat, r.q / r.p)?;
                *ok &= rep.holds;
                entries.push(bare_entry(format!("gehring(t={})", rep.t), rep.lhs, rep.rhs, u, amplitude));
            }
            // scalar-only estimate skipped for systems; the scan runs across amplitudes
            _ => {}
        }
    }
    Ok(entries)
}

fn write_entries(entries: &[DiagnosticsEntry], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["estimate_id", "lhs", "rhs", "ratio", "fitted_exponent", "grid", "amplitude", "epsilon"])?;
    for e in entries {
        w.write_record([
            e.estimate_id.clone(),
            fmt17(e.lhs),
            fmt17(e.rhs),
            fmt17(e.ratio()),
            opt(e.fitted_exponent),
            e.grid.to_string(),
            fmt17(e.amplitude),
            fmt17(e.epsilon),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fits exponents over the amplitude sweep for the estimates that carry one.
fn fit_groups(entries: &mut [DiagnosticsEntry]) -> Result<(), CliError> {
    for id in ["higher_diff", "sup_grad"] {
        let idx: Vec<usize> = (0..entries.len()).filter(|&k| entries[k].estimate_id == id).collect();
        if idx.len() >= 4 {
            let mut group: Vec<DiagnosticsEntry> = idx.iter().map(|&k| entries[k].clone()).collect();
            attach_fitted_exponent(&mut group)?;
            for (k, e) in idx.into_iter().zip(group) {
                // keep the chain exponent on higher_diff, refit the rest
                if id == "higher_diff" {
                    entries[k].fitted_exponent = e.fitted_exponent;
                } else {
                    entries[k] = e;
                }
            }
        }
    }
    Ok(())
}

/// A solved field, its entries and whether its checks held.
type Measured = (DiscreteField, Vec<DiagnosticsEntry>, bool);

pub fn diagnose(cfg: &ExperimentConfig, out: &mut dyn Write) -> Outcome {
    let r = cfg.regime;
    let f = &cfg.integrand;
    let solved: Vec<Result<Measured, CliError>> = cfg
        .boundary
        .amplitudes
        .par_iter()
        .map(|&a| {
            let u = solve_direct(cfg, f, &r, a)?;
            let mut ok = true;
            let entries = measure_field(cfg, f, &r, &u, a, &mut ok)?;
            Ok((u, entries, ok))
        })
        .collect();
    let mut fields = Vec::new();
    let mut entries = Vec::new();
    let mut ok = true;
    for s in solved {
        let (u, e, good) = s?;
        fields.push(u);
        entries.extend(e);
        ok &= good;
    }
    fit_groups(&mut entries)?;
    let d = &cfg.diagnostics;
    if d.estimates.iter().any(|e| e == "reverse_holder") {
        let b = chain(cfg, &r)?.b;
        let scan = reverse_holder_scan(&fields, f, &r, &d.t_grid, &d.region, b, d.cap)?;
        ok &= scan.best_t.is_some();
        for (j, &t) in d.t_grid.iter().enumerate() {
            let worst = scan.ratios.iter().map(|row| row[j]).fold(0.0, f64::max);
            let mut e = bare_entry(format!("reverse_holder(t={t})"), worst, d.cap, &fields[0], f64::NAN);
            e.fitted_exponent = scan.best_t;
            entries.push(e);
        }
    }
    ok &= entries.iter().all(|e| e.lhs.is_finite() && e.rhs.is_finite());
    write_entries(&entries, out)?;
    Ok(ok)
}

pub fn sweep(cfg: &ExperimentConfig, out: &mut dyn Write) -> Outcome {
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] block".into()))?;
    let base = cfg.regime;
    let first_amp = cfg.boundary.amplitudes[0];
    let points: Vec<(f64, f64)> = match &sw.axis {
        SweepAxis::Q(qs) => qs.iter().map(|&q| (q, first_amp)).collect(),
        SweepAxis::Amplitude(amps) => amps.iter().map(|&a| (base.q, a)).collect(),
    };
    let estimate = cfg
        .diagnostics
        .estimates
        .iter()
        .find(|e| ["higher_diff", "sup_grad", "stress"].contains(&e.as_str()))
        .cloned()
        .unwrap_or_else(|| "higher_diff".into());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sw.workers)
        .build()
        .map_err(|e| CliError::Config(format!("sweep: cannot start workers: {e}")))?;
    type Row = (Regime, f64, legendre_core::model::Admissibility, Option<DiagnosticsEntry>);
    let rows: Vec<Result<Row, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(q, a)| {
                let r = base.with_q(q)?;
                let adm = validate_regime(&r)?;
                let f = cfg.integrand_for(q, r.shape())?;
                let entry = if adm.admissible && r.n <= 3 {
                    let u = solve_direct(cfg, &f, &r, a)?;
                    let mut sub = cfg.clone();
                    sub.diagnostics.estimates = vec![estimate.clone()];
                    let mut ok = true;
                    measure_field(&sub, &f, &r, &u, a, &mut ok)?.into_iter().next()
                } else {
                    None
                };
                Ok((r, a, adm, entry))
            })
            .collect()
    });
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "point", "q", "amplitude", "admissible", "threshold", "rule", "estimate_id", "lhs", "rhs", "ratio",
    ])?;
    for (k, row) in rows.into_iter().enumerate() {
        let (r, a, adm, e) = row?;
        let (id, lhs, rhs, ratio) = match &e {
            Some(e) => (e.estimate_id.clone(), fmt17(e.lhs), fmt17(e.rhs), fmt17(e.ratio())),
            None => Default::default(),
        };
        w.write_record([
            k.to_string(),
            fmt17(r.q),
            fmt17(a),
            adm.admissible.to_string(),
            fmt17(adm.threshold),
            adm.rule.tag().to_string(),
            id,
            lhs,
            rhs,
            ratio,
        ])?;
    }
    w.flush()?;
    Ok(true)
}

pub fn gehring_table(c0: &[f64], big_m: &[f64], m: &[f64], out: &mut dyn Write) -> Outcome {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["c0", "M", "m", "t"])?;
    for &c in c0 {
        for &bm in big_m {
            for &mm in m {
                let t = gehring_exponent(c, bm, mm)?;
                w.write_record([c.to_string(), bm.to_string(), mm.to_string(), t.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(true)
}

pub fn moser_table(p: &MoserParams, v0: f64, steps: u32, out: &mut dyn Write) -> Outcome {
    let bound = moser_bound(p, v0)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "alpha_i", "a_alpha", "log_product", "bound"])?;
    for i in 0..=steps {
        let alpha = moser_alpha_sequence(p, i);
        w.write_record([
            i.to_string(),
            alpha.to_string(),
            a_alpha(alpha, p.alpha0).to_string(),
            (moser_log_product(p, i) + 0.0).to_string(),
            String::new(),
        ])?;
    }
    let log_limit = bound.c.ln() - bound.a0 * (p.tau1 - p.tau2).ln();
    w.write_record([
        "limit".to_string(),
        "inf".to_string(),
        "1".to_string(),
        log_limit.to_string(),
        bound.value.to_string(),
    ])?;
    w.flush()?;
    Ok(true)
}
