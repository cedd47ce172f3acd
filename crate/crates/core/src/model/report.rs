use crate::model::GradMat;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub worst_ratio: f64,
    pub witness: Option<GradMat>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub energy: f64,
    pub residual_sup: f64,
    pub iterations: usize,
    pub epsilon: f64,
    pub gamma_eps: f64,
}

/// One measured estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsEntry {
    pub estimate_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub fitted_exponent: Option<f64>,
    /// Cells per side of the grid the field lives on.
    pub grid: usize,
    pub amplitude: f64,
    pub epsilon: f64,
    /// `avg_B F(∇u) + 1`, the base used when fitting exponents.
    pub energy_scale: f64,
}

impl DiagnosticsEntry {
    pub fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsReport {
    pub entries: Vec<DiagnosticsEntry>,
}

impl DiagnosticsReport {
    pub fn push(&mut self, e: DiagnosticsEntry) {
        self.entries.push(e);
    }

    pub fn get<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a DiagnosticsEntry> + 'a {
        self.entries.iter().filter(move |e| e.estimate_id == id)
    }
}
