//! Banded matrix storage and a banded Cholesky factorization.

use crate::error::{invalid, HpError, Result};

/// A rectangular matrix with a fixed number of consecutive nonzeros per row.
///
/// Row `i` stores `width` values starting at column `first_col[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowBanded {
    rows: usize,
    cols: usize,
    width: usize,
    first_col: Vec<usize>,
    values: Vec<f64>,
}

impl RowBanded {
    pub fn zeros(rows: usize, cols: usize, width: usize) -> Self {
        Self {
            rows,
            cols,
            width,
            first_col: vec![0; rows],
            values: vec![0.0; rows * width],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Structural nonzeros per row.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn first_col(&self, i: usize) -> usize {
        self.first_col[i]
    }

    /// Stored values of row `i`, starting at [`first_col`](Self::first_col).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub(crate) fn set_row(&mut self, i: usize, first_col: usize, values: &[f64]) {
        debug_assert_eq!(values.len(), self.width);
        debug_assert!(first_col + self.width <= self.cols);
        self.first_col[i] = first_col;
        self.values[i * self.width..(i + 1) * self.width].copy_from_slice(values);
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let f = self.first_col[i];
        if j >= f && j < f + self.width {
            self.row(i)[j - f]
        } else {
            0.0
        }
    }

    /// `self * x`, accumulating each row in ascending column order.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(invalid(format!(
                "vector of length {} for a matrix with {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let f = self.first_col[i];
                let row = self.row(i);
                let mut acc = row[0] * x[f];
                for (k, v) in row.iter().enumerate().skip(1) {
                    acc += v * x[f + k];
                }
                acc
            })
            .collect())
    }

    /// `selfᵀ * diag(w) * y`.
    pub fn transpose_weighted_matvec(&self, w: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let f = self.first_col[i];
            let wy = w[i] * y[i];
            for (k, v) in self.row(i).iter().enumerate() {
                out[f + k] += v * wy;
            }
        }
        out
    }

    /// Accumulates `selfᵀ diag(w) self` (scaled by `scale`) into `target`.
    pub fn accumulate_gram(&self, w: Option<&[f64]>, scale: f64, target: &mut SymBanded) {
        for i in 0..self.rows {
            let f = self.first_col[i];
            let row = self.row(i);
            let wi = scale * w.map_or(1.0, |w| w[i]);
            for p in 0..self.width {
                for q in 0..=p {
                    target.add(f + p, f + q, wi * row[p] * row[q]);
                }
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Symmetric banded matrix; only the lower band is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded {
    n: usize,
    bandwidth: usize,
    // row-major lower band: entry (i, j), j <= i, at i * (bandwidth + 1) + (i - j)
    data: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0);
        for i in 0..n {
            m.add(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of sub-diagonals (equal to the number of super-diagonals).
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bandwidth).then(|| i * (self.bandwidth + 1) + (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.index(i, j).map_or(0.0, |k| self.data[k])
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .index(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bandwidth));
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(self.bandwidth);
            let hi = (i + self.bandwidth).min(n - 1);
            out[i] = (lo..=hi).map(|j| self.get(i, j) * x[j]).sum();
        }
        out
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth);
                let hi = (i + self.bandwidth).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Lower-triangular banded Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    l: SymBanded,
}

impl BandCholesky {
    /// Factorizes `a`, failing on the first pivot that is not safely positive.
    pub fn factor(a: &SymBanded) -> Result<Self> {
        let n = a.dim();
        let kd = a.bandwidth();
        let max_diag = (0..n).map(|i| a.get(i, i).abs()).fold(0.0, f64::max);
        let pivot_floor = f64::EPSILON * (kd + 1) as f64 * max_diag;
        let mut l = SymBanded::zeros(n, kd);
        for j in 0..n {
            let lo = j.saturating_sub(kd);
            let mut d = a.get(j, j);
            for k in lo..j {
                let v = l.get(j, k);
                d -= v * v;
            }
            if !(d > pivot_floor) || !d.is_finite() {
                return Err(HpError::Singular {
                    index: j,
                    guidance: "increase lambda or supply more distinct data sites".into(),
                });
            }
            let ljj = d.sqrt();
            l.add(j, j, ljj);
            for i in (j + 1)..(j + kd + 1).min(n) {
                let lo_i = i.saturating_sub(kd);
                let mut s = a.get(i, j);
                for k in lo_i.max(lo)..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.add(i, j, s / ljj);
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.l.dim();
        if rhs.len() != n {
            return Err(invalid(format!(
                "right-hand side of length {} for a system of size {n}",
                rhs.len()
            )));
        }
        let kd = self.l.bandwidth();
        let mut y = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(kd);
            let mut s = y[i];
            for k in lo..i {
                s -= self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let hi = (i + kd).min(n - 1);
            let mut s = y[i];
            for k in (i + 1)..=hi {
                s -= self.l.get(k, i) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        Ok(y)
    }

    /// Crude condition estimate `(max L_ii / min L_ii)^2`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.l.dim();
        let (lo, hi) = (0..n)
            .map(|i| self.l.get(i, i))
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
        (hi / lo).powi(2)
    }
}

/// Solves the symmetric positive definite banded system `a x = rhs`.
pub fn solve_spd_banded(a: &SymBanded, rhs: &[f64]) -> Result<Vec<f64>> {
    BandCholesky::factor(a)?.solve(rhs)
}
