//! Upper Hessenberg matrices and Hessenberg pencils with exact structural zeros.

use super::mat::Mat;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct UpperHessenberg {
    a: Mat,
}

impl UpperHessenberg {
    /// Wraps a square matrix; entries below the first subdiagonal must be exactly zero.
    pub fn new(a: Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::IndexOutOfRange {
                index: a.cols(),
                dim: a.rows(),
            });
        }
        let n = a.rows();
        for i in 2..n {
            for j in 0..i - 1 {
                if a[(i, j)] != ZERO {
                    return Err(Error::NotProper);
                }
            }
        }
        Ok(UpperHessenberg { a })
    }

    /// Wraps a square matrix after writing exact zeros below the subdiagonal.
    /// Returns the largest discarded magnitude alongside.
    pub fn truncate(mut a: Mat) -> (Self, f64) {
        let dropped = zero_below_subdiagonal(&mut a);
        (UpperHessenberg { a }, dropped)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.a
    }

    pub fn into_mat(self) -> Mat {
        self.a
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.a[(i, j)]
    }

    pub fn subdiag(&self, i: usize) -> C64 {
        self.a[(i + 1, i)]
    }

    pub fn fro_norm(&self) -> f64 {
        self.a.fro_norm()
    }

    /// Trailing principal block starting at `k`.
    pub fn trailing(&self, k: usize) -> UpperHessenberg {
        let n = self.dim();
        UpperHessenberg {
            a: self.a.block(k, n, k, n),
        }
    }

    /// Euclidean norm of the part strictly above the first superdiagonal.
    pub fn above_superdiagonal(&self) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| if j >= i + 2 { self.a[(i, j)] } else { ZERO })
    }
}

/// Writes zeros below the first subdiagonal, returning the largest discarded magnitude.
pub fn zero_below_subdiagonal(a: &mut Mat) -> f64 {
    let mut dropped = 0.0f64;
    for i in 2..a.rows() {
        for j in 0..(i - 1).min(a.cols()) {
            dropped = dropped.max(a[(i, j)].norm());
            a[(i, j)] = ZERO;
        }
    }
    dropped
}

/// Point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Pole {
    Finite(C64),
    Infinite,
}

impl Pole {
    /// Projective pair `(h, k)` with ratio equal to the pole.
    pub fn pair(&self) -> (C64, C64) {
        match *self {
            Pole::Finite(x) => (x, C64::new(1.0, 0.0)),
            Pole::Infinite => (C64::new(1.0, 0.0), ZERO),
        }
    }

    pub fn from_pair(h: C64, k: C64) -> Pole {
        if k == ZERO {
            Pole::Infinite
        } else {
            Pole::Finite(h / k)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Pole::Infinite)
    }
}

impl std::fmt::Display for Pole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pole::Finite(x) => write!(f, "{x}"),
            Pole::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HessenbergPencil {
    pub h: UpperHessenberg,
    pub k: UpperHessenberg,
}

impl HessenbergPencil {
    pub fn new(h: UpperHessenberg, k: UpperHessenberg) -> Result<Self> {
        if h.dim() != k.dim() {
            return Err(Error::IndexOutOfRange {
                index: k.dim(),
                dim: h.dim(),
            });
        }
        Ok(HessenbergPencil { h, k })
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Projective pair at pole position `i` (zero-based).
    pub fn pole_pair(&self, i: usize) -> (C64, C64) {
        (self.h.subdiag(i), self.k.subdiag(i))
    }

    pub fn pole(&self, i: usize) -> Pole {
        let (h, k) = self.pole_pair(i);
        Pole::from_pair(h, k)
    }

    pub fn poles(&self) -> Vec<Pole> {
        (0..self.dim().saturating_sub(1))
            .map(|i| self.pole(i))
            .collect()
    }
}
