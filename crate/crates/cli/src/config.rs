//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use legendre_core::solver::{BoundaryFamily, Schedule};
use legendre_core::{IntegrandSpec, Region, Regime};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;
use crate::expr::{parse_integrand, ExprError, Pos};

/// Estimates `diagnose` knows how to measure.
pub const ESTIMATES: [&str; 7] = [
    "higher_diff",
    "sup_grad",
    "stress",
    "caccioppoli",
    "log_decay",
    "reverse_holder",
    "gehring",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegime {
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    p: f64,
    q: f64,
    mu: f64,
    #[serde(rename = "L")]
    l: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    cells_per_side: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    count: Option<usize>,
    epsilons: Option<Vec<f64>>,
    mollifier_width: Option<Vec<f64>>,
    tol_energy: Option<f64>,
    tol_residual: Option<f64>,
    max_newton_iters: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundary {
    family: String,
    amplitudes: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagnostics {
    estimates: Option<Vec<String>>,
    sobolev_exp: Option<f64>,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    t_grid: Option<Vec<f64>>,
    cap: Option<f64>,
    alphas: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
    gehring_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    samples: Option<usize>,
    radius: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    q: Option<Vec<f64>>,
    amplitudes: Option<Vec<f64>>,
    workers: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    integrand: Spanned<String>,
    regime: RawRegime,
    grid: Option<RawGrid>,
    schedule: Option<RawSchedule>,
    boundary: Option<RawBoundary>,
    diagnostics: Option<RawDiagnostics>,
    check: Option<RawCheck>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryBlock {
    pub family: BoundaryFamily,
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsBlock {
    pub estimates: Vec<String>,
    /// Sobolev exponent for the exponent chain; `None` picks a default.
    pub sobolev_exp: Option<f64>,
    /// The ball `B`.
    pub region: Region,
    pub t_grid: Vec<f64>,
    pub cap: f64,
    pub alphas: Vec<f64>,
    /// Radii for the decay profile, as fractions of the radius of `B`.
    pub radii: Vec<f64>,
    pub gehring_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Q(Vec<f64>),
    Amplitude(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepBlock {
    pub axis: SweepAxis,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckBlock {
    pub samples: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub regime: Regime,
    /// Source text of the integrand expression, with any `{q}` placeholder intact.
    pub integrand_src: String,
    /// The parsed integrand, `{q}` replaced by the regime's `q`.
    pub integrand: IntegrandSpec,
    pub cells_per_side: usize,
    pub schedule: Schedule,
    pub boundary: BoundaryBlock,
    pub diagnostics: DiagnosticsBlock,
    pub check: CheckBlock,
    pub sweep: Option<SweepBlock>,
    pub seed: u64,
    /// Directory poly files are resolved against.
    pub base_dir: PathBuf,
    /// Where the integrand string starts in the config text.
    integrand_origin: Pos,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Start of a TOML string's contents, given the span of the whole literal.
fn string_origin(text: &str, start: usize) -> Pos {
    let lit = &text[start..];
    let skip = if lit.starts_with("\"\"\"") || lit.starts_with("'''") {
        let after = &lit[3..];
        3 + if after.starts_with("\r\n") {
            2
        } else if after.starts_with('\n') {
            1
        } else {
            0
        }
    } else {
        1
    };
    let before = &text[..start + skip];
    Pos {
        line: before.matches('\n').count() + 1,
        column: before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1,
    }
}

impl ExperimentConfig {
    /// Parses the integrand with `{q}` replaced by `q`, for shape `shape`.
    pub fn integrand_for(&self, q: f64, shape: (usize, usize)) -> Result<IntegrandSpec, CliError> {
        let src = self.integrand_src.replace("{q}", &q.to_string());
        parse_integrand(&src, shape, &self.base_dir).map_err(|e| self.locate(e))
    }

    fn locate(&self, mut e: ExprError) -> CliError {
        if e.source.is_none() {
            e.pos = e.pos.relative_to(self.integrand_origin);
        }
        CliError::Config(format!("integrand: {e}"))
    }
}

/// Parses a configuration. Poly files referenced by the integrand resolve
/// against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| {
            let before = &text[..s.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            format!(" at line {line}, column {col}")
        });
        invalid(format!("syntax error{}: {}", at.unwrap_or_default(), e.message()))
    })?;
    let rr = raw.regime;
    let regime = Regime::new(rr.n, rr.big_n, rr.p, rr.q, rr.mu, rr.l)
        .map_err(|e| invalid(format!("regime: {e}")))?;

    let cells_per_side = raw.grid.map_or(32, |g| g.cells_per_side);
    if cells_per_side < 2 {
        return Err(invalid("grid: cells_per_side must be at least 2"));
    }

    let rs = raw.schedule.unwrap_or_default();
    let mut schedule = match (rs.count, rs.epsilons) {
        (Some(_), Some(_)) => return Err(invalid("schedule: give either count or epsilons, not both")),
        (_, Some(eps)) => Schedule::from_epsilons(eps),
        (count, None) => Schedule::dyadic(count.unwrap_or(6)),
    };
    if let Some(w) = rs.mollifier_width {
        schedule.mollifier_width = w;
    }
    if let Some(t) = rs.tol_energy {
        schedule.tol_energy = t;
    }
    if let Some(t) = rs.tol_residual {
        schedule.tol_residual = t;
    }
    if let Some(k) = rs.max_newton_iters {
        schedule.max_newton_iters = k;
    }
    schedule.check().map_err(|e| invalid(format!("schedule: {e}")))?;

    let boundary = match raw.boundary {
        Some(b) => BoundaryBlock {
            family: BoundaryFamily::parse(&b.family).map_err(|e| invalid(format!("boundary: {e}")))?,
            amplitudes: b.amplitudes,
        },
        None => BoundaryBlock { family: BoundaryFamily::Sine, amplitudes: vec![1.0] },
    };
    if boundary.amplitudes.is_empty() || boundary.amplitudes.iter().any(|a| !a.is_finite()) {
        return Err(invalid("boundary: amplitudes must be a nonempty list of finite numbers"));
    }

    let rd = raw.diagnostics.unwrap_or_default();
    let estimates = rd
        .estimates
        .unwrap_or_else(|| ["higher_diff", "sup_grad", "stress"].map(String::from).to_vec());
    if let Some(bad) = estimates.iter().find(|e| !ESTIMATES.contains(&e.as_str())) {
        return Err(invalid(format!("diagnostics: unknown estimate '{bad}', known: {}", ESTIMATES.join(", "))));
    }
    let center = rd.center.unwrap_or_else(|| vec![0.5; regime.n]);
    if center.len() != regime.n {
        return Err(invalid(format!("diagnostics: center needs {} coordinates", regime.n)));
    }
    let region = Region::ball(center, rd.radius.unwrap_or(0.5)).map_err(|e| invalid(format!("diagnostics: {e}")))?;
    let diagnostics = DiagnosticsBlock {
        estimates,
        sobolev_exp: rd.sobolev_exp,
        region,
        t_grid: rd.t_grid.unwrap_or_else(|| (1..10).map(|k| 1.0 + 0.1 * k as f64).collect()),
        cap: rd.cap.unwrap_or(10.0),
        alphas: rd.alphas.unwrap_or_else(|| vec![-1.0, 0.0, 2.0]),
        radii: rd.radii.unwrap_or_else(|| vec![0.5, 0.3, 0.2, 0.1]),
        gehring_m: rd.gehring_m.unwrap_or(0.5),
    };

    let rc = raw.check.unwrap_or_default();
    let check = CheckBlock {
        samples: rc.samples.unwrap_or(20_000),
        radius: rc.radius.unwrap_or(1e3),
    };
    if check.samples == 0 || !(check.radius > 1e-3) {
        return Err(invalid("check: samples must be positive and radius above 1e-3"));
    }

    let sweep = match raw.sweep {
        None => None,
        Some(s) => {
            let axis = match (s.q, s.amplitudes) {
                (Some(q), None) if !q.is_empty() => SweepAxis::Q(q),
                (None, Some(a)) if !a.is_empty() => SweepAxis::Amplitude(a),
                _ => return Err(invalid("sweep: give exactly one nonempty list, q or amplitudes")),
            };
            let workers = s.workers.unwrap_or(1);
            if workers == 0 {
                return Err(invalid("sweep: workers must be positive"));
            }
            Some(SweepBlock { axis, workers })
        }
    };

    let origin = string_origin(text, raw.integrand.span().start);
    let mut cfg = ExperimentConfig {
        regime,
        integrand_src: raw.integrand.into_inner(),
        integrand: IntegrandSpec::power(0.0, 2.0),
        cells_per_side,
        schedule,
        boundary,
        diagnostics,
        check,
        sweep,
        seed: raw.seed.unwrap_or(0),
        base_dir: base_dir.to_path_buf(),
        integrand_origin: origin,
    };
    cfg.integrand = cfg.integrand_for(regime.q, regime.shape())?;
    Ok(cfg)
}

/// Reads and parses a configuration file; poly paths resolve next to it.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    parse_config(&text, &base)
}
