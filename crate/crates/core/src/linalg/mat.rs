//! Dense row-major complex matrix used by all kernels.

use num_complex::Complex64 as C64;
use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let v: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Mat::from_rows(&v)
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    /// Mutable access to two distinct rows at once.
    pub fn two_rows_mut(&mut self, i: usize, j: usize) -> (&mut [C64], &mut [C64]) {
        assert!(i < j && j < self.rows);
        let c = self.cols;
        let (a, b) = self.data.split_at_mut(j * c);
        (&mut a[i * c..(i + 1) * c], &mut b[..c])
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Row vector times matrix: `xᵀ A`.
    pub fn vecmat(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: C64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn shifted(&self, shift: C64) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= shift;
        }
        m
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Submatrix `[r0, r1) × [c0, c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        Mat::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// First `k` columns.
    pub fn leading_cols(&self, k: usize) -> Mat {
        self.block(0, self.rows, 0, k)
    }

    /// Removes row `r` and column `c`.
    pub fn remove_row_col(&self, r: usize, c: usize) -> Mat {
        Mat::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            self[(if i < r { i } else { i + 1 }, if j < c { j } else { j + 1 })]
        })
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_norm(x: &[C64]) -> f64 {
    // scaled to avoid overflow on the huge intermediates of inverse iteration
    let s = x
        .iter()
        .map(|a| a.re.abs().max(a.im.abs()))
        .fold(0.0, f64::max);
    if s == 0.0 {
        return 0.0;
    }
    s * x.iter().map(|a| (a / s).norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(x: &mut [C64]) -> f64 {
    let n = vec_norm(x);
    if n > 0.0 {
        for a in x.iter_mut() {
            *a /= n;
        }
    }
    n
}

pub fn dot_conj(x: &[C64], y: &[C64]) -> C64 {
    // xᴴ y
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Spectral norm estimate by power iteration on `AᴴA`; relative accuracy
/// around 1e-8, enough for tolerance thresholds.
pub fn norm2_estimate(a: &Mat) -> f64 {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return 0.0;
    }
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i as f64 * 0.754_877_666).fract(), 0.0))
        .collect();
    normalize(&mut x);
    let mut est = 0.0;
    for _ in 0..100 {
        let y = a.matvec(&x);
        let ny = vec_norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let conj_y: Vec<C64> = y.iter().map(|v| v.conj()).collect();
        let mut z: Vec<C64> = a.vecmat(&conj_y).iter().map(|v| v.conj()).collect();
        let nz = normalize(&mut z);
        let new = nz.sqrt();
        x = z;
        if (new - est).abs() <= 1e-10 * new {
            return new.max(ny);
        }
        est = new;
    }
    est
}
