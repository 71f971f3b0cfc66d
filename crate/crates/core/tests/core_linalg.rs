mod common;

use common::*;
use orthorec::linalg::core::{apply_core_vec, make_core_row_left, make_core_row_right};
use orthorec::linalg::{
    apply_core_left, apply_core_right, assemble, is_proper, is_proper_pencil, make_core,
    make_core_top, reference_eigen, rq_factorize_shifted, CoreTransformation, HessenbergPencil,
    Mat, Pole, UpperHessenberg,
};
use orthorec::{Error, C64};
use proptest::prelude::*;

const TOL: f64 = 1e-14;

/// Chebyshev recurrence matrix written out entry by entry.
fn chebyshev_h(m: usize) -> UpperHessenberg {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = Mat::from_fn(m, m, |i, j| {
        if i.abs_diff(j) != 1 {
            c(0.0, 0.0)
        } else if i.min(j) == 0 {
            c(s, 0.0)
        } else {
            c(0.5, 0.0)
        }
    });
    UpperHessenberg::new(a).unwrap()
}

#[test]
fn make_core_nothing_to_annihilate_is_identity() {
    let g = make_core(c(1.0, 0.0), c(0.0, 0.0), 0).unwrap();
    assert_eq!(g.c, 1.0);
    assert_eq!(g.s, c(0.0, 0.0));
}

#[test]
fn make_core_on_second_axis_is_a_swap() {
    let g = make_core(c(0.0, 0.0), c(1.0, 0.0), 0).unwrap();
    assert_eq!(g.c, 0.0);
    assert!((g.s.norm() - 1.0).abs() < TOL);
}

#[test]
fn make_core_three_four() {
    let g = make_core(c(3.0, 0.0), c(4.0, 0.0), 0).unwrap();
    assert!((g.c - 0.6).abs() < TOL);
    assert!((g.s.norm() - 0.8).abs() < TOL);
    let (r, zero) = g.apply_pair(c(3.0, 0.0), c(4.0, 0.0));
    assert!((r.norm() - 5.0).abs() < TOL);
    assert!(zero.norm() < TOL);
}

#[test]
fn make_core_zero_pair_is_rejected() {
    assert!(matches!(
        make_core(c(0.0, 0.0), c(0.0, 0.0), 0),
        Err(Error::ZeroPair)
    ));
}

#[test]
fn make_core_top_annihilates_the_first_entry() {
    let g = make_core_top(c(1.0, 2.0), c(-0.5, 0.25), 3).unwrap();
    let (zero, r) = g.apply_pair(c(1.0, 2.0), c(-0.5, 0.25));
    assert!(zero.norm() < TOL);
    assert!((r.norm() - (5.0f64 + 0.3125).sqrt()).abs() < TOL);
    assert!(g.c >= 0.0);
}

#[test]
fn row_cores_annihilate_from_the_right() {
    let (a, b) = (c(0.3, -1.0), c(2.0, 0.5));
    let g = make_core_row_left(a, b, 0).unwrap();
    let (x, _) = g.apply_pair_row_adj(a, b);
    assert!(x.norm() < TOL);
    let g = make_core_row_right(a, b, 0).unwrap();
    let (_, y) = g.apply_pair_row_adj(a, b);
    assert!(y.norm() < TOL);
}

#[test]
fn identity_core_leaves_matrix_unchanged() {
    let mut rng = rng(1);
    let a = random_mat(&mut rng, 4, 3);
    let id = CoreTransformation::identity(1);
    assert_eq!(apply_core_left(&id, &a).unwrap(), a);
    assert_eq!(
        apply_core_right(&id, &random_mat(&mut rng, 3, 4))
            .unwrap()
            .rows(),
        3
    );
}

#[test]
fn swap_core_moves_first_axis() {
    let g = make_core(c(0.0, 0.0), c(1.0, 0.0), 0).unwrap();
    let mut x = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    apply_core_vec(&g, &mut x);
    assert!(x[0].norm() < TOL);
    assert!((x[1].norm() - 1.0).abs() < TOL);
}

#[test]
fn core_applied_to_column() {
    let g = make_core(c(3.0, 0.0), c(4.0, 0.0), 0).unwrap();
    let col = real(&[&[3.0], &[4.0], &[0.0]]);
    let out = apply_core_left(&g, &col).unwrap();
    assert!((out[(0, 0)].norm() - 5.0).abs() < TOL);
    assert!(out[(1, 0)].norm() < TOL);
    assert_eq!(out[(2, 0)], c(0.0, 0.0));
}

#[test]
fn core_index_out_of_range() {
    let g = CoreTransformation::identity(2);
    assert!(matches!(
        apply_core_left(&g, &Mat::identity(3)),
        Err(Error::IndexOutOfRange { .. })
    ));
}

#[test]
fn apply_core_right_matches_dense_product() {
    let mut rng = rng(2);
    let a = random_mat(&mut rng, 5, 5);
    let g = make_core(point(&mut rng), point(&mut rng), 2).unwrap();
    let dense = a.matmul(&g.to_dense(5));
    assert!(max_abs_diff(&apply_core_right(&g, &a).unwrap(), &dense) < TOL);
    let dense = g.to_dense(5).matmul(&a);
    assert!(max_abs_diff(&apply_core_left(&g, &a).unwrap(), &dense) < TOL);
}

#[test]
fn rq_perfect_shift_two_by_two() {
    let h = UpperHessenberg::new(real(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
    let f = rq_factorize_shifted(&h, c(1.0, 0.0)).unwrap();
    assert!(f.r[(0, 0)].norm() < TOL);
    let q = assemble(&f.cores, 2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((q[(0, 0)].norm() - s).abs() < TOL);
    assert!((q[(0, 1)].norm() - s).abs() < TOL);
    // the first row of Q̂ is the eigenvector for eigenvalue 1
    let row: Vec<C64> = (0..2).map(|j| q[(0, j)]).collect();
    assert!((row[0] - row[1]).norm() < TOL);
}

#[test]
fn rq_of_one_by_one() {
    let h = UpperHessenberg::new(Mat::identity(1)).unwrap();
    let f = rq_factorize_shifted(&h, c(0.0, 0.0)).unwrap();
    assert_eq!(f.r[(0, 0)], c(1.0, 0.0));
    assert!(f.cores.is_empty());
}

#[test]
fn rq_rejects_improper_matrix() {
    let h = UpperHessenberg::new(real(&[&[1.0, 1.0], &[0.0, 2.0]])).unwrap();
    assert!(matches!(
        rq_factorize_shifted(&h, c(0.5, 0.0)),
        Err(Error::NotProper)
    ));
}

#[test]
fn rq_of_random_normal_matrix() {
    let mut rng = rng(3);
    let z = separated_nodes(&mut rng, 6, 0.05);
    let w = weights(&mut rng, 6);
    let sol =
        orthorec::iep::solve_hiep(&orthorec::iep::InnerProductSpec::new(z, w).unwrap()).unwrap();
    let shift = c(3.0, 3.0);
    let f = rq_factorize_shifted(&sol.h, shift).unwrap();
    for i in 0..6 {
        assert!(f.r[(i, i)].norm() > 0.0);
    }
    let a = sol.h.as_mat().shifted(shift);
    assert!(max_abs_diff(&f.reconstruct(), &a) <= 1e-13);
}

#[test]
fn rq_solves_match_dense_multiplication() {
    let mut rng = rng(4);
    let (h, _) = UpperHessenberg::truncate(random_mat(&mut rng, 7, 7));
    let f = rq_factorize_shifted(&h, c(0.1, 0.0)).unwrap();
    let a = h.as_mat().shifted(c(0.1, 0.0));
    let x: Vec<C64> = (0..7).map(|_| point(&mut rng)).collect();
    let y = f.solve(&x, 0.0).unwrap();
    let back = a.matvec(&y);
    assert!(back.iter().zip(&x).all(|(u, v)| (u - v).norm() < 1e-10));
    let y = f.solve_adjoint(&x, 0.0).unwrap();
    let back = a.adjoint().matvec(&y);
    assert!(back.iter().zip(&x).all(|(u, v)| (u - v).norm() < 1e-10));
}

#[test]
fn properness_of_matrices() {
    let h = UpperHessenberg::new(real(&[&[1.0, 2.0], &[0.0, 3.0]])).unwrap();
    assert!(!is_proper(&h, 0.0));
    assert!(is_proper(&chebyshev_h(8), 1e-14));
}

#[test]
fn properness_of_pencils() {
    let h = UpperHessenberg::new(real(&[&[1.0, 2.0], &[0.0, 3.0]])).unwrap();
    let k = UpperHessenberg::new(real(&[&[1.0, 0.0], &[1.0, 1.0]])).unwrap();
    let p = HessenbergPencil::new(h, k).unwrap();
    assert!(is_proper_pencil(&p, 0.0));
    assert_eq!(p.pole(0), Pole::Finite(c(0.0, 0.0)));
}

#[test]
fn hessenberg_wrapper_rejects_fill() {
    let a = real(&[&[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0], &[1.0, 1.0, 1.0]]);
    assert!(UpperHessenberg::new(a.clone()).is_err());
    let (h, dropped) = UpperHessenberg::truncate(a);
    assert_eq!(dropped, 1.0);
    assert_eq!(h.get(2, 0), c(0.0, 0.0));
}

#[test]
fn pole_pairs_round_trip() {
    for p in [Pole::Infinite, Pole::Finite(c(2.0, -1.0))] {
        let (h, k) = p.pair();
        assert_eq!(Pole::from_pair(h, k), p);
    }
}

#[test]
fn reference_eigenvalues() {
    let one = UpperHessenberg::new(Mat::diag(&[c(0.5, 2.0)])).unwrap();
    assert!((reference_eigen(&one).unwrap()[0] - c(0.5, 2.0)).norm() < TOL);

    let swap = UpperHessenberg::new(real(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
    let mut e: Vec<f64> = reference_eigen(&swap)
        .unwrap()
        .iter()
        .map(|v| v.re)
        .collect();
    e.sort_by(f64::total_cmp);
    assert!((e[0] + 1.0).abs() < TOL && (e[1] - 1.0).abs() < TOL);

    let mut e: Vec<f64> = reference_eigen(&chebyshev_h(4))
        .unwrap()
        .iter()
        .map(|v| v.re)
        .collect();
    e.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = (1..=4)
        .map(|j| (std::f64::consts::PI * (j as f64 - 0.5) / 4.0).cos())
        .collect();
    want.sort_by(f64::total_cmp);
    for (a, b) in e.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

fn arb_c64() -> impl Strategy<Value = C64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #[test]
    fn cores_are_unitary(a in arb_c64(), b in arb_c64()) {
        prop_assume!(a.norm() + b.norm() > 1e-6);
        let g = make_core(a, b, 0).unwrap();
        prop_assert!(g.c >= 0.0);
        prop_assert!(g.unitarity_defect() < 1e-14);
        let d = g.to_dense(2);
        let e = d.adjoint().matmul(&d).sub(&Mat::identity(2));
        prop_assert!(e.max_abs() < 1e-14);
        let (r, zero) = g.apply_pair(a, b);
        prop_assert!(zero.norm() <= 1e-14 * (a.norm() + b.norm()));
        prop_assert!((r.norm() - a.norm().hypot(b.norm())).abs() <= 1e-14 * r.norm().max(1.0));
    }

    #[test]
    fn core_products_are_unitary(seed in 0u64..1000, m in 2usize..9) {
        let mut rng = rng(seed);
        let cores: Vec<_> = (0..3 * m)
            .map(|t| make_core(point(&mut rng), point(&mut rng), t % (m - 1)).unwrap())
            .collect();
        let q = assemble(&cores, m);
        prop_assert!(q.adjoint().matmul(&q).sub(&Mat::identity(m)).max_abs() < 1e-13);
    }

    #[test]
    fn rq_reconstructs(seed in 0u64..1000, m in 1usize..10, sr in -2.0..2.0f64) {
        let mut rng = rng(seed);
        let (h, _) = UpperHessenberg::truncate(random_mat(&mut rng, m, m));
        let f = rq_factorize_shifted(&h, c(sr, 0.0)).unwrap();
        let a = h.as_mat().shifted(c(sr, 0.0));
        prop_assert!(max_abs_diff(&f.reconstruct(), &a) <= 1e-13 * a.fro_norm().max(1.0));
        for i in 1..m {
            for j in 0..i {
                prop_assert_eq!(f.r[(i, j)], c(0.0, 0.0));
            }
        }
    }
}
