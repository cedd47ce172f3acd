use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Real `rows × cols` matrix stored row-major. Row `a` is a target component,
/// column `i` a partial derivative direction.
#[derive(Clone, PartialEq)]
pub struct GradMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl GradMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                got: (1, data.len()),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidIntegrand("ragged matrix rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    /// A single row, i.e. the scalar case `N = 1`.
    pub fn row(values: &[f64]) -> Self {
        Self {
            rows: 1,
            cols: values.len(),
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, a: usize, i: usize) -> f64 {
        self.data[a * self.cols + i]
    }

    pub fn set(&mut self, a: usize, i: usize, v: f64) {
        self.data[a * self.cols + i] = v;
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// Column `i` as an `N`-vector, i.e. `z e_i`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.rows).map(|a| self.get(a, i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn check_shape(&self, shape: (usize, usize)) -> Result<()> {
        if self.shape() == shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: shape,
                got: self.shape(),
            })
        }
    }

    /// `self + t * dir`.
    pub fn axpy(&self, t: f64, dir: &Self) -> Self {
        let mut out = self.clone();
        for (o, d) in out.data.iter_mut().zip(&dir.data) {
            *o += t * d;
        }
        out
    }
}

impl fmt::Debug for GradMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradMat{}x{}[", self.rows, self.cols)?;
        for a in 0..self.rows {
            if a > 0 {
                write!(f, "; ")?;
            }
            for i in 0..self.cols {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(a, i))?;
            }
        }
        write!(f, "]")
    }
}

impl Add for &GradMat {
    type Output = GradMat;
    fn add(self, rhs: &GradMat) -> GradMat {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &GradMat {
    type Output = GradMat;
    fn sub(self, rhs: &GradMat) -> GradMat {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &GradMat {
    type Output = GradMat;
    fn neg(self) -> GradMat {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &GradMat {
    type Output = GradMat;
    fn mul(self, c: f64) -> GradMat {
        self.scale(c)
    }
}

impl AddAssign<&GradMat> for GradMat {
    fn add_assign(&mut self, rhs: &GradMat) {
        for (o, d) in self.data.iter_mut().zip(&rhs.data) {
            *o += d;
        }
    }
}

impl SubAssign<&GradMat> for GradMat {
    fn sub_assign(&mut self, rhs: &GradMat) {
        for (o, d) in self.data.iter_mut().zip(&rhs.data) {
            *o -= d;
        }
    }
}
