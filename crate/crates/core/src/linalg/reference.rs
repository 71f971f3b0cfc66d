//! Reference dense eigensolvers and 2-norms backed by LAPACK. Used only by
//! metrics and test oracles, never inside the downdating algorithms.

use super::hessenberg::{HessenbergPencil, UpperHessenberg};
use super::mat::Mat;
use crate::error::{Error, Result};
use ndarray::Array2;
use ndarray_linalg::{Eig, EigGeneralized, GeneralizedEigenvalue, SVD};
use num_complex::Complex64 as C64;

pub fn to_ndarray(a: &Mat) -> Array2<C64> {
    Array2::from_shape_vec((a.rows(), a.cols()), a.as_slice().to_vec())
        .expect("shape matches data length")
}

pub fn eigenvalues(a: &Mat) -> Result<Vec<C64>> {
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    let (vals, _) = to_ndarray(a)
        .eig()
        .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;
    Ok(vals.to_vec())
}

pub fn reference_eigen(h: &UpperHessenberg) -> Result<Vec<C64>> {
    eigenvalues(h.as_mat())
}

/// Generalized eigenvalues `λ` with `H v = λ K v`; infinite ones are reported
/// as `f64::INFINITY`.
pub fn reference_eigen_pencil(p: &HessenbergPencil) -> Result<Vec<C64>> {
    let a = to_ndarray(p.h.as_mat());
    let b = to_ndarray(p.k.as_mat());
    let (vals, _) = (a, b)
        .eig_generalized(None)
        .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;
    Ok(vals
        .iter()
        .map(|v| match v {
            GeneralizedEigenvalue::Finite(x, _) => *x,
            GeneralizedEigenvalue::Indeterminate(_) => C64::new(f64::INFINITY, 0.0),
        })
        .collect())
}

pub fn singular_values(a: &Mat) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    match to_ndarray(a).svd(false, false) {
        Ok((_, s, _)) => s.to_vec(),
        Err(_) => vec![f64::NAN],
    }
}

/// Spectral norm.
pub fn norm2(a: &Mat) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}
