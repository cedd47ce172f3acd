/// Symmetric banded matrix, lower band stored row by row:
/// entry `(i, j)` with `j ≤ i ≤ j + bw` lives at `i * (bw + 1) + (i − j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Adds to `(i, j)` and, implicitly, `(j, i)`. Only call once per unordered pair
    /// with `i ≥ j`.
    pub fn add_lower(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j <= i && i - j <= self.bw);
        self.data[i * (self.bw + 1) + (i - j)] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[i * (self.bw + 1) + (i - j)]
        }
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.n).fold(0.0, |m, i| m.max(self.data[i * (self.bw + 1)].abs()))
    }

    /// Solves `A x = b` by banded Cholesky; `None` if `A` is not positive definite.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut l = self.data.clone();
        for j in 0..n {
            for i in j..(j + w).min(n) {
                let lo = i.saturating_sub(bw);
                let mut s = l[i * w + (i - j)];
                for k in lo..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return None;
                    }
                    l[j * w] = s.sqrt();
                } else {
                    l[i * w + (i - j)] = s / l[j * w];
                }
            }
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= l[i * w + (i - k)] * y[k];
            }
            y[i] = s / l[i * w];
        }
        for i in (0..n).rev() {
            let hi = (i + w).min(n);
            let mut s = y[i];
            for k in (i + 1)..hi {
                s -= l[k * w + (k - i)] * y[k];
            }
            y[i] = s / l[i * w];
        }
        Some(y)
    }
}
