//! RQ factorization of (shifted) Hessenberg matrices and the solves built on it.

use super::core::{make_core_row_left, right_apply_adj_range, CoreTransformation};
use super::hessenberg::{HessenbergPencil, UpperHessenberg};
use super::mat::Mat;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// RQ factorization `A = R·Q̂` of a Hessenberg matrix, `Q̂ = C_0 C_1 ⋯ C_{m−2}`.
#[derive(Clone, Debug)]
pub struct RqFactors {
    pub r: Mat,
    /// `cores[i]` acts on indices `(i, i+1)`.
    pub cores: Vec<CoreTransformation>,
}

/// Factorizes a square matrix that is upper Hessenberg (entries below the
/// subdiagonal are ignored and treated as zero).
pub fn rq_hessenberg(mut a: Mat) -> RqFactors {
    let m = a.rows();
    let mut cores = vec![CoreTransformation::identity(0); m.saturating_sub(1)];
    for i in (0..m.saturating_sub(1)).rev() {
        let g = make_core_row_left(a[(i + 1, i)], a[(i + 1, i + 1)], i)
            .unwrap_or_else(|_| CoreTransformation::identity(i));
        right_apply_adj_range(&g, &mut a, 0, i + 2);
        a[(i + 1, i)] = ZERO;
        cores[i] = g;
    }
    for i in 2..m {
        for j in 0..i - 1 {
            a[(i, j)] = ZERO;
        }
    }
    RqFactors { r: a, cores }
}

pub fn rq_factorize_shifted(h: &UpperHessenberg, shift: C64) -> Result<RqFactors> {
    if !is_proper(h, 0.0) {
        return Err(Error::NotProper);
    }
    Ok(rq_hessenberg(h.as_mat().shifted(shift)))
}

impl RqFactors {
    pub fn dim(&self) -> usize {
        self.r.rows()
    }

    /// `Q̂ x`.
    pub fn apply_q(&self, x: &mut [C64]) {
        for g in self.cores.iter().rev() {
            super::core::apply_core_vec(g, x);
        }
    }

    /// `Q̂ᴴ x`.
    pub fn apply_q_adj(&self, x: &mut [C64]) {
        for g in &self.cores {
            super::core::apply_core_vec(&g.adjoint(), x);
        }
    }

    /// `R` with `R(0,0)` lifted to magnitude `floor` when smaller.
    fn regularized_r00(&self, floor: f64) -> C64 {
        let r00 = self.r[(0, 0)];
        if r00.norm() >= floor {
            r00
        } else if r00 == ZERO {
            C64::new(floor, 0.0)
        } else {
            r00 / r00.norm() * floor
        }
    }

    /// Solves `A y = x` with `R(0,0)` regularized to at least `floor`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, x: &[C64], floor: f64) -> Result<Vec<C64>> {
        let m = self.dim();
        let mut z = x.to_vec();
        for i in (0..m).rev() {
            let mut acc = z[i];
            for j in i + 1..m {
                acc -= self.r[(i, j)] * z[j];
            }
            let d = if i == 0 {
                self.regularized_r00(floor)
            } else {
                self.r[(i, i)]
            };
            if d == ZERO {
                return Err(Error::SingularSolve);
            }
            z[i] = acc / d;
        }
        self.apply_q_adj(&mut z);
        if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SingularSolve);
        }
        Ok(z)
    }

    /// Solves `Aᴴ y = x` with the same regularization.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_adjoint(&self, x: &[C64], floor: f64) -> Result<Vec<C64>> {
        let m = self.dim();
        let mut z = x.to_vec();
        self.apply_q(&mut z);
        for i in 0..m {
            let mut acc = z[i];
            for j in 0..i {
                acc -= self.r[(j, i)].conj() * z[j];
            }
            let d = if i == 0 {
                self.regularized_r00(floor)
            } else {
                self.r[(i, i)]
            };
            if d == ZERO {
                return Err(Error::SingularSolve);
            }
            z[i] = acc / d.conj();
        }
        if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SingularSolve);
        }
        Ok(z)
    }

    /// Dense `R·Q̂`, used by tests.
    pub fn reconstruct(&self) -> Mat {
        let m = self.dim();
        let q = super::core::assemble(&self.cores, m);
        self.r.matmul(&q)
    }
}

/// `min_i |h(i+1,i)| > tol·‖H‖_F`.
pub fn is_proper(h: &UpperHessenberg, tol: f64) -> bool {
    let bound = tol * h.fro_norm();
    (0..h.dim().saturating_sub(1)).all(|i| h.subdiag(i).norm() > bound)
}

/// Subdiagonal pairs never vanish together, and the first columns and the last
/// rows of `H` and `K` are linearly independent.
pub fn is_proper_pencil(p: &HessenbergPencil, tol: f64) -> bool {
    let m = p.dim();
    let scale = p.h.fro_norm().max(p.k.fro_norm());
    let bound = tol * scale;
    let pairs_ok =
        (0..m.saturating_sub(1)).all(|i| p.h.subdiag(i).norm() + p.k.subdiag(i).norm() > bound);
    if !pairs_ok {
        return false;
    }
    if m == 1 {
        return p.h.get(0, 0).norm() + p.k.get(0, 0).norm() > bound;
    }
    let h = p.h.as_mat();
    let k = p.k.as_mat();
    let hc = h.col(0);
    let kc = k.col(0);
    let hr = h.row(m - 1).to_vec();
    let kr = k.row(m - 1).to_vec();
    independent(&hc, &kc, bound) && independent(&hr, &kr, bound)
}

/// Rank-revealing QR of the two-column matrix `[a b]`: independent when the
/// second diagonal entry of `R` exceeds `tol`.
fn independent(a: &[C64], b: &[C64], tol: f64) -> bool {
    let (mut u, mut v) = (a.to_vec(), b.to_vec());
    let (nu, nv) = (super::mat::vec_norm(&u), super::mat::vec_norm(&v));
    if nv > nu {
        std::mem::swap(&mut u, &mut v);
    }
    let n1 = super::mat::vec_norm(&u);
    if n1 <= tol {
        return false;
    }
    let proj = super::mat::dot_conj(&u, &v) / (n1 * n1);
    let resid: Vec<C64> = v.iter().zip(&u).map(|(vi, ui)| vi - proj * ui).collect();
    super::mat::vec_norm(&resid) > tol
}
