use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Structural tuple `(n, N, p, q, mu, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    /// Space dimension.
    pub n: usize,
    /// Target dimension.
    pub big_n: usize,
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    /// Structural constant.
    pub l: f64,
}

impl Regime {
    pub fn new(n: usize, big_n: usize, p: f64, q: f64, mu: f64, l: f64) -> Result<Self> {
        let r = Self {
            n,
            big_n,
            p,
            q,
            mu,
            l,
        };
        r.check()?;
        Ok(r)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidRegime(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.big_n < 1 {
            return bad("N must be at least 1");
        }
        if !(self.p.is_finite() && self.q.is_finite()) {
            return bad("exponents must be finite");
        }
        if self.p < 2.0 {
            return bad("p must be at least 2");
        }
        if self.q < self.p {
            return bad("q must be at least p");
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return bad("mu must lie in [0,1]");
        }
        if !(self.l > 1.0 && self.l.is_finite()) {
            return bad("L must be finite and greater than 1");
        }
        Ok(())
    }

    /// Rejects `p = q`, which certification and growth sums exclude.
    pub fn require_strict(&self) -> Result<()> {
        self.check()?;
        if self.p == self.q {
            return Err(Error::EqualExponents(self.p));
        }
        Ok(())
    }

    /// Shape `(N, n)` of gradient matrices.
    pub fn shape(&self) -> (usize, usize) {
        (self.big_n, self.n)
    }

    /// Conjugate exponent `q' = q/(q-1)`.
    pub fn q_conj(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.n, self.big_n, self.p, q, self.mu, self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissibilityRule {
    /// `n ∈ {2,3}`: any `2 ≤ p ≤ q < ∞`.
    LowDimension,
    /// `n ≥ 4`: `q < p(n-1)/(n-3)`.
    DimensionalGap,
}

impl AdmissibilityRule {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::LowDimension => "low-dimension",
            Self::DimensionalGap => "dimensional-gap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub admissible: bool,
    /// Supremum of admissible `q`; infinite when unbounded.
    pub threshold: f64,
    pub rule: AdmissibilityRule,
}

pub fn validate_regime(r: &Regime) -> Result<Admissibility> {
    r.check()?;
    if r.n <= 3 {
        return Ok(Admissibility {
            admissible: true,
            threshold: f64::INFINITY,
            rule: AdmissibilityRule::LowDimension,
        });
    }
    let n = r.n as f64;
    let threshold = r.p * (n - 1.0) / (n - 3.0);
    Ok(Admissibility {
        admissible: r.q < threshold,
        threshold,
        rule: AdmissibilityRule::DimensionalGap,
    })
}

/// Older exponent bounds from the literature, evaluated at a regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalGates {
    /// `q < np/(n-2)`; vacuous for `n = 2`.
    pub pq22: bool,
    /// `q < p + 2p/n`.
    pub pq23: bool,
    /// `q < p + 2p/(n-1)`.
    pub bsbound: bool,
    /// `q ≤ np/(n-2)`; vacuous for `n = 2`.
    pub cor1: bool,
    /// `p > n-2` with `n ≥ 3`.
    pub holder: bool,
    /// `1 - (n-2)/p` when the Hölder clause holds.
    pub holder_exponent: Option<f64>,
}

impl ClassicalGates {
    pub fn as_map(&self) -> BTreeMap<&'static str, bool> {
        BTreeMap::from([
            ("pq22", self.pq22),
            ("pq23", self.pq23),
            ("bsbound", self.bsbound),
            ("cor1", self.cor1),
            ("holder", self.holder),
        ])
    }
}

pub fn classical_gates(r: &Regime) -> Result<ClassicalGates> {
    r.check()?;
    let (n, p, q) = (r.n as f64, r.p, r.q);
    let sobolev = if r.n >= 3 {
        Some(n * p / (n - 2.0))
    } else {
        None
    };
    let holder = r.n >= 3 && p > n - 2.0;
    Ok(ClassicalGates {
        pq22: sobolev.map_or(true, |s| q < s),
        pq23: q < p + 2.0 * p / n,
        bsbound: q < p + 2.0 * p / (n - 1.0),
        cor1: sobolev.map_or(true, |s| q <= s),
        holder,
        holder_exponent: holder.then(|| 1.0 - (n - 2.0) / p),
    })
}
