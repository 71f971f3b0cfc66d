mod common;

use common::*;
use orthorec::iep::{solve_hiep, solve_hpiep, HpiepSolution, InnerProductSpec, PoleSet};
use orthorec::linalg::{
    reference_eigen_pencil, HessenbergPencil, Mat, Pole, ToleranceConfig, UpperHessenberg,
};
use orthorec::metrics::{
    err_node_pencil, err_pole, err_recurrence_pencil, err_weight, match_nodes,
};
use orthorec::poly::{
    downdate_eigenvector, eigenvector_from_recurrence, DowndateRequest, RefinementConfig,
};
use orthorec::rational::{
    change_first_pole, change_last_pole, downdate_eigenvector_pencil, downdate_pencil,
    left_eigenvector_from_orf, move_pole_pencil, pole_swap, right_eigenvector, LeftVectorSource,
    PencilDowndateRequest, PencilMethod,
};
use orthorec::C64;
use proptest::prelude::*;

fn finite(p: Pole) -> C64 {
    match p {
        Pole::Finite(x) => x,
        Pole::Infinite => panic!("expected a finite pole"),
    }
}

fn random_solution(seed: u64, m: usize) -> HpiepSolution {
    let mut rng = rng(seed);
    let z = separated_nodes(&mut rng, m, 1e-2);
    let w = weights(&mut rng, m);
    let poles = outside_poles(&mut rng, m - 1);
    solve_hpiep(&InnerProductSpec::new(z, w).unwrap(), &PoleSet::new(poles)).unwrap()
}

fn spectrum(p: &HessenbergPencil) -> Vec<C64> {
    reference_eigen_pencil(p).unwrap()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[test]
fn swap_exchanges_neighbouring_poles() {
    let mut rng = rng(31);
    let mut h = random_mat(&mut rng, 3, 3);
    let mut k = random_mat(&mut rng, 3, 3);
    h[(2, 0)] = c(0.0, 0.0);
    k[(2, 0)] = c(0.0, 0.0);
    h[(1, 0)] = c(1.0, 0.0);
    k[(1, 0)] = c(1.0, 0.0);
    h[(2, 1)] = c(2.0, 0.0);
    k[(2, 1)] = c(1.0, 0.0);
    let p = HessenbergPencil::new(
        UpperHessenberg::new(h).unwrap(),
        UpperHessenberg::new(k).unwrap(),
    )
    .unwrap();
    let (q, _, _) = pole_swap(&p, 0).unwrap();
    assert!((finite(q.pole(0)) - c(2.0, 0.0)).norm() < 1e-13);
    assert!((finite(q.pole(1)) - c(1.0, 0.0)).norm() < 1e-13);
    assert!(match_nodes(&spectrum(&p), &spectrum(&q)).err < 1e-12);
}

#[test]
fn swapping_equal_poles_is_a_no_op() {
    let mut rng = rng(32);
    let z = separated_nodes(&mut rng, 4, 0.05);
    let poles = vec![Pole::Finite(c(3.0, 0.0)); 3];
    let ps = solve_hpiep(
        &InnerProductSpec::new(z, weights(&mut rng, 4)).unwrap(),
        &PoleSet::new(poles),
    )
    .unwrap();
    let (q, r, s) = pole_swap(&ps.pencil, 1).unwrap();
    assert!(r.is_identity() && s.is_identity());
    assert_eq!(q, ps.pencil);
}

#[test]
fn swap_in_a_random_pencil_keeps_other_poles() {
    let ps = random_solution(33, 5);
    let before = ps.pencil.poles();
    let (q, _, _) = pole_swap(&ps.pencil, 1).unwrap();
    let after = q.poles();
    let rel = |a: Pole, b: Pole| (finite(a) - finite(b)).norm() / finite(b).norm();
    assert!(rel(after[1], before[2]) < 1e-12 && rel(after[2], before[1]) < 1e-12);
    assert!(rel(after[0], before[0]) < 1e-12 && rel(after[3], before[3]) < 1e-12);
    assert!(match_nodes(&ps.nodes, &spectrum(&q)).err < 1e-12);
}

#[test]
fn change_last_pole_to_itself() {
    let ps = random_solution(34, 4);
    let last = ps.pencil.pole(2);
    let (q, g) = change_last_pole(&ps.pencil, last).unwrap();
    assert!((g.s.norm()) < 1e-12);
    assert!(max_modulus_diff(q.h.as_mat(), ps.pencil.h.as_mat()) < 1e-12);
}

#[test]
fn change_last_pole_from_infinity_to_zero() {
    let spec =
        InnerProductSpec::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0); 2]).unwrap();
    let ps = solve_hpiep(&spec, &PoleSet::infinite(1)).unwrap();
    assert_eq!(ps.pencil.k.subdiag(0), c(0.0, 0.0));
    let (q, _) = change_last_pole(&ps.pencil, Pole::Finite(c(0.0, 0.0))).unwrap();
    let (h, k) = q.pole_pair(0);
    assert!(h.norm() < 1e-15 && k.norm() > 0.1);
    assert!(match_nodes(&ps.nodes, &spectrum(&q)).err < 1e-14);
}

#[test]
fn change_last_pole_in_a_random_pencil() {
    let ps = random_solution(35, 6);
    let xi = c(3.0, 2.0);
    let (q, _) = change_last_pole(&ps.pencil, Pole::Finite(xi)).unwrap();
    assert!((finite(q.pole(4)) - xi).norm() < 1e-12 * xi.norm());
    assert!(match_nodes(&ps.nodes, &spectrum(&q)).err < 1e-12);
}

#[test]
fn change_first_pole_examples() {
    let spec =
        InnerProductSpec::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0); 2]).unwrap();
    let ps = solve_hpiep(&spec, &PoleSet::new(vec![Pole::Finite(c(0.0, 0.0))])).unwrap();
    let (q, g) = change_first_pole(&ps.pencil, ps.pencil.pole(0)).unwrap();
    assert!(g.s.norm() < 1e-12);
    assert_eq!(q.poles().len(), 1);
    let (q, _) = change_first_pole(&ps.pencil, Pole::Infinite).unwrap();
    assert_eq!(q.k.subdiag(0), c(0.0, 0.0));
    assert!(match_nodes(&ps.nodes, &spectrum(&q)).err < 1e-14);
}

#[test]
fn move_pole_round_trip() {
    let ps = random_solution(36, 7);
    let (moved, ops) = move_pole_pencil(&ps.pencil, 1, 5).unwrap();
    assert!(!ops.is_empty());
    let (back, _) = move_pole_pencil(&moved, 5, 1).unwrap();
    let rel = |a: Pole, b: Pole| (finite(a) - finite(b)).norm() / finite(b).norm();
    for (a, b) in back.poles().into_iter().zip(ps.pencil.poles()) {
        assert!(rel(a, b) < 1e-11);
    }
}

#[test]
fn two_node_pencil_downdate() {
    let spec =
        InnerProductSpec::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0); 2]).unwrap();
    let ps = solve_hpiep(&spec, &PoleSet::new(vec![Pole::Finite(c(0.0, 0.0))])).unwrap();
    for method in [PencilMethod::Implicit, PencilMethod::Eigenvector] {
        let req = PencilDowndateRequest::new(c(1.0, 0.0), 0, method);
        let out = downdate_pencil(&ps.pencil, &ps.poles, c(1.0, 0.0), &req).unwrap();
        let p = &out.pencil_reduced;
        assert_eq!(p.dim(), 1);
        assert!(
            (p.h.get(0, 0) / p.k.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-14,
            "{method:?}"
        );
        assert!(out.poles.is_empty());
    }
}

#[test]
fn left_vector_is_the_dense_left_null_vector() {
    let ps = random_solution(37, 2);
    let z = ps.nodes[0];
    let r = left_eigenvector_from_orf(&ps.pencil, ps.weights[0], z).unwrap();
    let a = ps.pencil.h.as_mat().sub(&ps.pencil.k.as_mat().scale(z));
    // rᴴA = 0 for a 2×2 singular A gives r ∝ conj(a10, −a00)
    let oracle = [a[(1, 0)].conj(), -a[(0, 0)].conj()];
    let n = (oracle[0].norm_sqr() + oracle[1].norm_sqr()).sqrt();
    assert!((dot(&r, &oracle).norm() / n - 1.0).abs() < 1e-12);
}

#[test]
fn right_vector_is_the_dense_null_vector() {
    let ps = random_solution(38, 2);
    let z = ps.nodes[1];
    let s = right_eigenvector(
        &ps.pencil,
        z,
        &[c(1.0, 0.0); 2],
        &RefinementConfig::default(),
        &ToleranceConfig::default(),
    )
    .unwrap();
    let a = ps.pencil.h.as_mat().sub(&ps.pencil.k.as_mat().scale(z));
    let oracle = [a[(0, 1)], -a[(0, 0)]];
    let n = (oracle[0].norm_sqr() + oracle[1].norm_sqr()).sqrt();
    assert!((dot(&s.x, &oracle).norm() / n - 1.0).abs() < 1e-12);

    let one = HessenbergPencil::new(
        UpperHessenberg::new(Mat::diag(&[c(2.0, 0.0)])).unwrap(),
        UpperHessenberg::new(Mat::identity(1)).unwrap(),
    )
    .unwrap();
    let s = right_eigenvector(
        &one,
        c(2.0, 0.0),
        &[c(1.0, 0.0)],
        &RefinementConfig::default(),
        &ToleranceConfig::default(),
    )
    .unwrap();
    assert_eq!(s.x, vec![c(1.0, 0.0)]);
}

#[test]
fn left_vector_with_infinite_poles_is_the_polynomial_eigenvector() {
    let mut rng = rng(39);
    let z = separated_nodes(&mut rng, 6, 0.05);
    let w = weights(&mut rng, 6);
    let spec = InnerProductSpec::new(z.clone(), w.clone()).unwrap();
    let ps = solve_hpiep(&spec, &PoleSet::infinite(5)).unwrap();
    assert_eq!(ps.pencil.k.as_mat(), &Mat::identity(6));
    let hs = solve_hiep(&spec).unwrap();
    let r = left_eigenvector_from_orf(&ps.pencil, w[2], z[2]).unwrap();
    let x = eigenvector_from_recurrence(&hs.h, w[2], z[2]).unwrap();
    // H agrees up to a unimodular diagonal similarity, so compare moduli
    for (a, b) in r.iter().zip(&x) {
        assert!((a.norm() - b.norm()).abs() < 1e-12);
    }
}

#[test]
fn eigenvector_method_with_infinite_poles_matches_matrix_method() {
    let mut rng = rng(40);
    let z = separated_nodes(&mut rng, 8, 0.05);
    let w = weights(&mut rng, 8);
    let spec = InnerProductSpec::new(z.clone(), w.clone()).unwrap();
    let hs = solve_hiep(&spec).unwrap();
    let ps = solve_hpiep(&spec, &PoleSet::infinite(7)).unwrap();
    let poly = downdate_eigenvector(&hs.h, w[3], &DowndateRequest::new(z[3])).unwrap();
    let req = PencilDowndateRequest::new(z[3], 6, PencilMethod::Eigenvector);
    let rat = downdate_eigenvector_pencil(&ps.pencil, &ps.poles, w[3], &req).unwrap();
    let hk = right_solve_upper(rat.pencil_reduced.h.as_mat(), rat.pencil_reduced.k.as_mat());
    assert!(max_modulus_diff(&hk, poly.h_reduced.as_mat()) < 1e-9);
}

#[test]
fn eigenvector_conditions_on_a_random_pencil() {
    let ps = random_solution(41, 10);
    let req =
        PencilDowndateRequest::new(ps.nodes[4], 3, PencilMethod::Eigenvector).with_refinement(2, 1);
    let out = downdate_pencil(&ps.pencil, &ps.poles, ps.weights[4], &req).unwrap();
    let cond = out.conditions.unwrap();
    assert!(cond.left.residual <= cond.left.residual_bound);
    assert!(cond.right.residual <= cond.right.residual_bound);
}

#[test]
fn every_node_of_a_random_pencil() {
    let ps = random_solution(42, 10);
    for j in 0..10 {
        let rest: Vec<C64> = ps
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, v)| *v)
            .collect();
        let pos = j % 9;
        let mut kept = ps.poles.clone();
        kept.remove(pos);
        for method in [PencilMethod::Implicit, PencilMethod::Eigenvector] {
            let req = PencilDowndateRequest::new(ps.nodes[j], pos, method);
            let out = downdate_pencil(&ps.pencil, &ps.poles, ps.weights[j], &req).unwrap();
            assert_eq!(out.poles, kept);
            assert!(
                err_node_pencil(&rest, &out.pencil_reduced).unwrap() < 1e-9,
                "{method:?} node {j}"
            );
            assert!(
                err_pole(&out.pencil_reduced, &kept) < 1e-9,
                "{method:?} node {j}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pencil_downdates_keep_the_solution(seed in 0u64..10_000, m in 3usize..11, both in any::<bool>()) {
        let ps = random_solution(seed, m);
        let mut rng = rng(seed ^ 0x5eed);
        let j = rand::Rng::gen_range(&mut rng, 0..m);
        let pos = rand::Rng::gen_range(&mut rng, 0..m - 1);
        let rest_z: Vec<C64> = ps.nodes.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| *v).collect();
        let rest_w: Vec<C64> = ps.weights.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| *v).collect();
        let source = if both { LeftVectorSource::Recurrence } else { LeftVectorSource::RightImage };
        for method in [PencilMethod::Implicit, PencilMethod::Eigenvector] {
            let mut req = PencilDowndateRequest::new(ps.nodes[j], pos, method);
            req.left_vector = source;
            let out = downdate_pencil(&ps.pencil, &ps.poles, ps.weights[j], &req).unwrap();
            let next = ps.apply_downdate(j, &out);
            prop_assert!(err_node_pencil(&rest_z, &next.pencil).unwrap() < 1e-9);
            prop_assert!(err_pole(&next.pencil, &next.poles) < 1e-9);
            prop_assert!(err_weight(&next.q, &rest_w) < 1e-10);
            prop_assert!(err_recurrence_pencil(&rest_z, &next.q, &next.pencil) < 1e-10);
        }
    }

    #[test]
    fn pole_swaps_preserve_the_spectrum(seed in 0u64..10_000, m in 3usize..9) {
        let ps = random_solution(seed, m);
        let i = (seed as usize) % (m - 2);
        let (q, r, s) = pole_swap(&ps.pencil, i).unwrap();
        prop_assert!(r.unitarity_defect() < 1e-14 && s.unitarity_defect() < 1e-14);
        prop_assert!(match_nodes(&ps.nodes, &spectrum(&q)).err < 1e-10);
    }
}
