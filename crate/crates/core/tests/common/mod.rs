#![allow(dead_code)]

use orthorec::linalg::{Mat, Pole};
use orthorec::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Complex point uniformly in the square `[-1, 1]²`.
pub fn point(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `m` nodes in `[-1, 1]²` with pairwise distance at least `sep`.
pub fn separated_nodes(rng: &mut ChaCha8Rng, m: usize, sep: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(m);
    while out.len() < m {
        let z = point(rng);
        if out.iter().all(|y| (y - z).norm() >= sep) {
            out.push(z);
        }
    }
    out
}

/// Weights with modulus in `[0.5, 1.5]` and random phase.
pub fn weights(rng: &mut ChaCha8Rng, m: usize) -> Vec<C64> {
    (0..m)
        .map(|_| {
            C64::from_polar(
                rng.gen_range(0.5..1.5),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect()
}

/// Finite poles outside the node square, at distance at least 0.5 from it.
pub fn outside_poles(rng: &mut ChaCha8Rng, n: usize) -> Vec<Pole> {
    (0..n)
        .map(|_| {
            let r = rng.gen_range(2.0..4.0);
            Pole::Finite(C64::from_polar(
                r,
                rng.gen_range(0.0..std::f64::consts::TAU),
            ))
        })
        .collect()
}

pub fn random_mat(rng: &mut ChaCha8Rng, r: usize, cols: usize) -> Mat {
    Mat::from_fn(r, cols, |_, _| point(rng))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .map(|(i, j)| (a[(i, j)] - b[(i, j)]).norm())
        .fold(0.0, f64::max)
}

pub fn max_modulus_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .map(|(i, j)| (a[(i, j)].norm() - b[(i, j)].norm()).abs())
        .fold(0.0, f64::max)
}

/// `A U⁻¹` for upper triangular `U`, by column back-substitution.
pub fn right_solve_upper(a: &Mat, u: &Mat) -> Mat {
    let n = u.rows();
    let mut x = Mat::zeros(a.rows(), n);
    for i in 0..a.rows() {
        for j in 0..n {
            let mut s = a[(i, j)];
            for l in 0..j {
                s -= x[(i, l)] * u[(l, j)];
            }
            x[(i, j)] = s / u[(j, j)];
        }
    }
    x
}

/// Dense matrix from real rows.
pub fn real(rows: &[&[f64]]) -> Mat {
    Mat::from_real_rows(rows)
}
