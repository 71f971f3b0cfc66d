//! Core transformations: 2×2 unitary blocks embedded at rows/columns `(i, i+1)`.
//!
//! The active block is `[[c, s], [-conj(s), c]]` with `c` real and non-negative.
//! Indices are zero-based throughout the crate.

use super::mat::Mat;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoreTransformation {
    pub index: usize,
    pub c: f64,
    pub s: C64,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

impl CoreTransformation {
    pub fn identity(index: usize) -> Self {
        CoreTransformation {
            index,
            c: 1.0,
            s: ZERO,
        }
    }

    pub fn adjoint(&self) -> Self {
        CoreTransformation {
            index: self.index,
            c: self.c,
            s: -self.s,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.c == 1.0 && self.s == ZERO
    }

    /// Deviation of `|c|² + |s|²` from one.
    pub fn unitarity_defect(&self) -> f64 {
        (self.c * self.c + self.s.norm_sqr() - 1.0).abs()
    }

    /// `G · (a, b)ᵀ`.
    #[inline]
    pub fn apply_pair(&self, a: C64, b: C64) -> (C64, C64) {
        (self.c * a + self.s * b, -self.s.conj() * a + self.c * b)
    }

    /// `(a, b) · Gᴴ`.
    #[inline]
    pub fn apply_pair_row_adj(&self, a: C64, b: C64) -> (C64, C64) {
        (self.c * a + self.s.conj() * b, -self.s * a + self.c * b)
    }

    /// Dense `m × m` embedding.
    pub fn to_dense(&self, m: usize) -> Mat {
        let mut g = Mat::identity(m);
        let i = self.index;
        g[(i, i)] = C64::new(self.c, 0.0);
        g[(i, i + 1)] = self.s;
        g[(i + 1, i)] = -self.s.conj();
        g[(i + 1, i + 1)] = C64::new(self.c, 0.0);
        g
    }
}

/// Core with `G · (a, b)ᵀ = (r, 0)ᵀ`, `|r| = ‖(a, b)‖`.
pub fn make_core(a: C64, b: C64, index: usize) -> Result<CoreTransformation> {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 && nb == 0.0 {
        return Err(Error::ZeroPair);
    }
    if nb == 0.0 {
        return Ok(CoreTransformation::identity(index));
    }
    if na == 0.0 {
        return Ok(CoreTransformation {
            index,
            c: 0.0,
            s: b.conj() / nb,
        });
    }
    let n = na.hypot(nb);
    let phase = a / na;
    Ok(CoreTransformation {
        index,
        c: na / n,
        s: phase * b.conj() / n,
    })
}

/// Core with `G · (a, b)ᵀ = (0, r)ᵀ`.
pub fn make_core_top(a: C64, b: C64, index: usize) -> Result<CoreTransformation> {
    let g = make_core(b, a, index)?;
    Ok(CoreTransformation {
        index,
        c: g.c,
        s: -g.s.conj(),
    })
}

/// Core with `(a, b) · Gᴴ = (0, r)`: annihilates the left entry of a row pair
/// by a right multiplication.
pub fn make_core_row_left(a: C64, b: C64, index: usize) -> Result<CoreTransformation> {
    // (a,b)Gᴴ = conj(G (ā, b̄))ᵀ
    make_core_top(a.conj(), b.conj(), index)
}

/// Core with `(a, b) · Gᴴ = (r, 0)`.
pub fn make_core_row_right(a: C64, b: C64, index: usize) -> Result<CoreTransformation> {
    make_core(a.conj(), b.conj(), index)
}

fn check(idx: usize, dim: usize) -> Result<()> {
    if idx + 1 >= dim {
        Err(Error::IndexOutOfRange { index: idx, dim })
    } else {
        Ok(())
    }
}

/// `A ← G A` restricted to columns `[c0, c1)`.
pub fn left_apply_range(g: &CoreTransformation, a: &mut Mat, c0: usize, c1: usize) {
    let i = g.index;
    let (r0, r1) = a.two_rows_mut(i, i + 1);
    for j in c0..c1 {
        let (x, y) = g.apply_pair(r0[j], r1[j]);
        r0[j] = x;
        r1[j] = y;
    }
}

/// `A ← A Gᴴ` restricted to rows `[r0, r1)`.
pub fn right_apply_adj_range(g: &CoreTransformation, a: &mut Mat, r0: usize, r1: usize) {
    let i = g.index;
    for r in r0..r1 {
        let (x, y) = g.apply_pair_row_adj(a[(r, i)], a[(r, i + 1)]);
        a[(r, i)] = x;
        a[(r, i + 1)] = y;
    }
}

/// `G A` as a new matrix.
pub fn apply_core_left(g: &CoreTransformation, a: &Mat) -> Result<Mat> {
    check(g.index, a.rows())?;
    let mut out = a.clone();
    left_apply_range(g, &mut out, 0, a.cols());
    Ok(out)
}

/// `A G` as a new matrix.
pub fn apply_core_right(g: &CoreTransformation, a: &Mat) -> Result<Mat> {
    check(g.index, a.cols())?;
    let mut out = a.clone();
    right_apply_adj_range(&g.adjoint(), &mut out, 0, a.rows());
    Ok(out)
}

/// `G x` on a vector in place.
pub fn apply_core_vec(g: &CoreTransformation, x: &mut [C64]) {
    let i = g.index;
    let (a, b) = g.apply_pair(x[i], x[i + 1]);
    x[i] = a;
    x[i + 1] = b;
}

/// Dense product `G_1 G_2 ⋯ G_k` of a core sequence.
pub fn assemble(cores: &[CoreTransformation], m: usize) -> Mat {
    let mut q = Mat::identity(m);
    for g in cores.iter().rev() {
        left_apply_range(g, &mut q, 0, m);
    }
    q
}
