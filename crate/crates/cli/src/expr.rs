//! The integrand mini-language.
//!
//! ```text
//! expr := term ('+' term)*
//! term := [coeff '*'] atom
//! atom := 'power(mu=<r>,p=<r>)' | 'axis(i=<int>,q=<r>)' | 'poly(<file>)'
//! ```
//!
//! Whitespace between tokens is ignored. Axis indices are 1-based. A poly file
//! holds one monomial per line, `coeff e1 ... ed`, with `d = N·n` exponents
//! ordered row-major over the gradient matrix; blank lines and `#` comments are
//! skipped.

use std::fmt;
use std::path::{Path, PathBuf};

use legendre_core::integrands::EvenPolynomial;
use legendre_core::{Error as CoreError, IntegrandSpec};

/// Grammar of the integrand language, as shown in `--help`.
pub const GRAMMAR: &str = "expr := term ('+' term)*
term := [coeff '*'] atom
atom := 'power(mu=<r>,p=<r>)' | 'axis(i=<int>,q=<r>)' | 'poly(<file>)'";

/// 1-based position in some source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    fn of(src: &str, offset: usize) -> Self {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Self { line, column }
    }

    /// Shifts a position inside an embedded snippet to the enclosing text,
    /// given where the snippet starts.
    pub fn relative_to(self, origin: Pos) -> Self {
        if self.line == 1 {
            Self { line: origin.line, column: origin.column + self.column - 1 }
        } else {
            Self { line: origin.line + self.line - 1, column: self.column }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprErrorKind {
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub kind: ExprErrorKind,
    /// Source the position refers to: the expression, or a poly file.
    pub source: Option<PathBuf>,
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ExprErrorKind::Syntax => "syntax error",
            ExprErrorKind::Semantic => "semantic error",
        };
        match &self.source {
            Some(p) => write!(f, "{kind} in {} at line {}, column {}: {}", p.display(), self.pos.line, self.pos.column, self.message),
            None => write!(f, "{kind} at line {}, column {}: {}", self.pos.line, self.pos.column, self.message),
        }
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, PartialEq)]
enum Atom {
    Power { mu: f64, p: f64 },
    Axis { i: i64, q: f64 },
    Poly { path: String },
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: Option<f64>,
    atom: Atom,
    /// Byte offset of the atom name.
    at: usize,
}

struct Parser<'a> {
    src: &'a str,
    at: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, at: usize, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            kind: ExprErrorKind::Syntax,
            source: None,
            pos: Pos::of(self.src, at),
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.at..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.at = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        match self.peek() {
            Some(x) if x == c => {
                self.at += c.len_utf8();
                Ok(())
            }
            Some(x) => self.err(self.at, format!("expected '{c}', found '{x}'")),
            None => self.err(self.at, format!("expected '{c}', found end of input")),
        }
    }

    fn ident(&mut self) -> Result<(usize, &'a str), ExprError> {
        self.skip_ws();
        let start = self.at;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 || self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            return self.err(start, "expected a name");
        }
        self.at += len;
        Ok((start, &self.src[start..start + len]))
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        self.skip_ws();
        let start = self.at;
        let bytes = self.rest().as_bytes();
        let mut k = 0;
        let digits = |k: &mut usize| {
            let s = *k;
            while *k < bytes.len() && bytes[*k].is_ascii_digit() {
                *k += 1;
            }
            *k > s
        };
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        let int = digits(&mut k);
        let mut frac = false;
        if k < bytes.len() && bytes[k] == b'.' {
            k += 1;
            frac = digits(&mut k);
        }
        if !(int || frac) {
            return self.err(start, "expected a number");
        }
        if k < bytes.len() && (bytes[k] == b'e' || bytes[k] == b'E') {
            let mark = k;
            k += 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if !digits(&mut k) {
                k = mark;
            }
        }
        let text = &self.src[start..start + k];
        self.at += k;
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => self.err(start, format!("invalid number '{text}'")),
        }
    }

    /// `name=<value>` pairs in any order, each required exactly once.
    fn keyword_args(&mut self, names: [&str; 2]) -> Result<[(usize, f64); 2], ExprError> {
        let mut out: [Option<(usize, f64)>; 2] = [None, None];
        for k in 0..2 {
            if k > 0 {
                self.expect(',')?;
            }
            let (at, name) = self.ident()?;
            let Some(slot) = names.iter().position(|n| *n == name) else {
                return self.err(at, format!("unknown argument '{name}', expected one of {}", names.join(", ")));
            };
            if out[slot].is_some() {
                return self.err(at, format!("argument '{name}' given twice"));
            }
            self.expect('=')?;
            self.skip_ws();
            let value_at = self.at;
            out[slot] = Some((value_at, self.number()?));
        }
        self.expect(')')?;
        Ok([out[0].unwrap(), out[1].unwrap()])
    }

    fn atom(&mut self) -> Result<(usize, Atom), ExprError> {
        let (at, name) = self.ident()?;
        self.expect('(')?;
        let atom = match name {
            "power" => {
                let [(_, mu), (_, p)] = self.keyword_args(["mu", "p"])?;
                Atom::Power { mu, p }
            }
            "axis" => {
                let [(i_at, i), (_, q)] = self.keyword_args(["i", "q"])?;
                if i.fract() != 0.0 {
                    return self.err(i_at, "axis index must be an integer");
                }
                Atom::Axis { i: i as i64, q }
            }
            "poly" => {
                self.skip_ws();
                let start = self.at;
                let Some(len) = self.rest().find(')') else {
                    return self.err(start, "unterminated poly(...)");
                };
                let path = self.rest()[..len].trim().to_string();
                if path.is_empty() {
                    return self.err(start, "poly(...) needs a file name");
                }
                self.at += len + 1;
                Atom::Poly { path }
            }
            other => return self.err(at, format!("unknown atom '{other}', expected power, axis or poly")),
        };
        Ok((at, atom))
    }

    fn term(&mut self) -> Result<Term, ExprError> {
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let v = self.number()?;
                self.expect('*')?;
                Some(v)
            }
            _ => None,
        };
        let (at, atom) = self.atom()?;
        Ok(Term { coeff, atom, at })
    }

    fn expr(&mut self) -> Result<Vec<Term>, ExprError> {
        let mut terms = vec![self.term()?];
        while let Some(c) = self.peek() {
            if c != '+' {
                return self.err(self.at, format!("expected '+' or end of input, found '{c}'"));
            }
            self.at += 1;
            terms.push(self.term()?);
        }
        Ok(terms)
    }
}

fn semantic<T>(src: &str, at: usize, message: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError {
        kind: ExprErrorKind::Semantic,
        source: None,
        pos: Pos::of(src, at),
        message: message.into(),
    })
}

/// Parses `coeff e1 ... ed` lines into an even polynomial in `dim` variables.
pub fn parse_poly_file(text: &str, dim: usize, source: &Path) -> Result<EvenPolynomial, ExprError> {
    let fail = |line: usize, column: usize, kind: ExprErrorKind, message: String| ExprError {
        kind,
        source: Some(source.to_path_buf()),
        pos: Pos { line, column },
        message,
    };
    let mut monomials = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let fields: Vec<(usize, &str)> = line
            .split_whitespace()
            .map(|w| (w.as_ptr() as usize - raw.as_ptr() as usize + 1, w))
            .collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != dim + 1 {
            return Err(fail(k + 1, 1, ExprErrorKind::Syntax, format!("expected a coefficient and {dim} exponents, found {} fields", fields.len())));
        }
        let (col, c) = fields[0];
        let coeff: f64 = c
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| fail(k + 1, col, ExprErrorKind::Syntax, format!("invalid coefficient '{c}'")))?;
        let exps = fields[1..]
            .iter()
            .map(|&(col, e)| {
                e.parse::<usize>()
                    .map_err(|_| fail(k + 1, col, ExprErrorKind::Syntax, format!("invalid exponent '{e}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        monomials.push((coeff, exps));
    }
    if monomials.is_empty() {
        return Err(fail(1, 1, ExprErrorKind::Semantic, "polynomial file has no monomials".into()));
    }
    EvenPolynomial::from_monomials(dim, &monomials).map_err(|e| {
        let message = match e {
            CoreError::NotEven(d) => format!("polynomial has a nonzero component of odd degree {d}"),
            other => other.to_string(),
        };
        fail(1, 1, ExprErrorKind::Semantic, message)
    })
}

/// Parses and checks an integrand expression for gradients of shape `(N, n)`.
/// Relative poly paths resolve against `base_dir`.
pub fn parse_integrand(src: &str, shape: (usize, usize), base_dir: &Path) -> Result<IntegrandSpec, ExprError> {
    let mut parser = Parser { src, at: 0 };
    if parser.peek().is_none() {
        return parser.err(0, "empty integrand expression");
    }
    let terms = parser.expr()?;
    let (big_n, n) = shape;
    let mut specs = Vec::with_capacity(terms.len());
    for t in terms {
        let spec = match t.atom {
            Atom::Power { mu, p } => {
                if !(0.0..=1.0).contains(&mu) {
                    return semantic(src, t.at, format!("power needs mu in [0,1], got {mu}"));
                }
                if p < 2.0 {
                    return semantic(src, t.at, format!("power needs p >= 2, got {p}"));
                }
                IntegrandSpec::power(mu, p)
            }
            Atom::Axis { i, q } => {
                if i < 1 || i as usize > n {
                    return semantic(src, t.at, format!("axis index {i} out of range 1..={n}"));
                }
                if q < 2.0 {
                    return semantic(src, t.at, format!("axis needs q >= 2, got {q}"));
                }
                IntegrandSpec::axis(i as usize - 1, q)
            }
            Atom::Poly { path } => {
                let full = base_dir.join(&path);
                let text = std::fs::read_to_string(&full).or_else(|e| {
                    semantic(src, t.at, format!("cannot read polynomial file {}: {e}", full.display()))
                })?;
                IntegrandSpec::EvenPolynomial(parse_poly_file(&text, big_n * n, &full)?)
            }
        };
        let spec = match t.coeff {
            Some(c) if c < 0.0 => return semantic(src, t.at, format!("coefficient {c} is negative")),
            Some(c) => IntegrandSpec::scaled(c, spec),
            None => spec,
        };
        specs.push(spec);
    }
    let spec = if specs.len() == 1 {
        specs.pop().unwrap()
    } else {
        IntegrandSpec::Sum(specs)
    };
    spec.validate_for(shape).or_else(|e| semantic(src, 0, e.to_string()))?;
    Ok(spec)
}
