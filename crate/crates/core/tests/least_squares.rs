mod common;

use common::*;
use orthorec::iep::{solve_hiep, solve_hpiep, HiepSolution, InnerProductSpec, PoleSet};
use orthorec::linalg::mat::vec_norm;
use orthorec::linalg::Pole;
use orthorec::lsq::{
    evaluate_basis, evaluate_model, lsq_fit, read_data_csv, slide_window, write_model_json,
    ApproximantModel, SlidePlan, WindowMethod, WindowSolution, WindowState,
};
use orthorec::poly::{PolyMethod, RefinementConfig};
use orthorec::rational::{LeftVectorSource, PencilMethod};
use orthorec::{Error, C64};
use proptest::prelude::*;

fn real_nodes(m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| c(-1.0 + 2.0 * j as f64 / (m - 1) as f64, 0.0))
        .collect()
}

fn runge(z: C64) -> C64 {
    c(1.0, 0.0) / (c(1.0, 0.0) + z * z * 4.0)
}

#[test]
fn constant_data_gives_one_coefficient() {
    let mut rng = rng(61);
    let z = separated_nodes(&mut rng, 9, 0.05);
    let w = weights(&mut rng, 9);
    let sol = solve_hiep(&InnerProductSpec::new(z, w.clone()).unwrap()).unwrap();
    let k = c(2.0, -1.0);
    let model = lsq_fit(&sol, &[k; 9], 5).unwrap();
    assert!((model.coefficients[0] - k * vec_norm(&w)).norm() < 1e-12);
    assert!(model.coefficients[1..].iter().all(|a| a.norm() < 1e-12));
}

#[test]
fn full_degree_interpolates() {
    let z = real_nodes(12);
    let f: Vec<C64> = z.iter().map(|x| runge(*x)).collect();
    let sol =
        solve_hiep(&InnerProductSpec::new(z.clone(), vec![c(1.0, 0.0); 12]).unwrap()).unwrap();
    let model = lsq_fit(&sol, &f, 12).unwrap();
    for (x, fx) in z.iter().zip(&f) {
        assert!((evaluate_model(&model, *x).unwrap() - fx).norm() < 1e-9);
    }
}

#[test]
fn residual_is_orthogonal_to_the_monomials() {
    // normal equations: Σ |w_j|² (g(z_j) − f_j) conj(z_j)^k = 0 for k < n
    let mut rng = rng(62);
    let m = 15;
    let n = 6;
    let z = separated_nodes(&mut rng, m, 0.05);
    let w = weights(&mut rng, m);
    let f: Vec<C64> = z.iter().map(|x| x.exp()).collect();
    let sol = solve_hiep(&InnerProductSpec::new(z.clone(), w.clone()).unwrap()).unwrap();
    let model = lsq_fit(&sol, &f, n).unwrap();
    let res: Vec<C64> = z
        .iter()
        .zip(&f)
        .map(|(x, fx)| evaluate_model(&model, *x).unwrap() - fx)
        .collect();
    for k in 0..n {
        let ip: C64 = (0..m)
            .map(|j| w[j].norm_sqr() * res[j] * z[j].conj().powu(k as u32))
            .sum();
        assert!(ip.norm() < 1e-11, "k={k}: {ip}");
    }
    // and the fit is no worse than the best constant
    let best_const: C64 = (0..m).map(|j| w[j].norm_sqr() * f[j]).sum::<C64>()
        / w.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let e_fit: f64 = (0..m).map(|j| w[j].norm_sqr() * res[j].norm_sqr()).sum();
    let e_const: f64 = (0..m)
        .map(|j| w[j].norm_sqr() * (best_const - f[j]).norm_sqr())
        .sum();
    assert!(e_fit <= e_const);
}

#[test]
fn first_basis_function_is_constant() {
    let mut rng = rng(63);
    let z = separated_nodes(&mut rng, 6, 0.05);
    let w = weights(&mut rng, 6);
    let sol = solve_hiep(&InnerProductSpec::new(z, w.clone()).unwrap()).unwrap();
    for x in [c(0.1, 0.2), c(-3.0, 1.0)] {
        let r = evaluate_basis(&sol, x, 1).unwrap();
        assert!((r[0] - c(1.0 / vec_norm(&w), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn basis_values_reproduce_the_basis_matrix() {
    let mut rng = rng(64);
    let m = 8;
    let z = separated_nodes(&mut rng, m, 0.05);
    let w = weights(&mut rng, m);
    let spec = InnerProductSpec::new(z.clone(), w.clone()).unwrap();
    let poly = solve_hiep(&spec).unwrap();
    let rat = solve_hpiep(&spec, &PoleSet::new(outside_poles(&mut rng, m - 1))).unwrap();
    for j in 0..m {
        let rp = evaluate_basis(&poly, z[j], m).unwrap();
        let rr = evaluate_basis(&rat, z[j], m).unwrap();
        for d in 0..m {
            assert!((w[j] * rp[d] - poly.q[(j, d)]).norm() < 1e-10);
            assert!((w[j] * rr[d] - rat.q[(j, d)]).norm() < 1e-10);
        }
    }
}

#[test]
fn model_edge_cases() {
    let sol =
        solve_hiep(&InnerProductSpec::new(real_nodes(4), vec![c(1.0, 0.0); 4]).unwrap()).unwrap();
    let model = lsq_fit(&sol, &[c(0.0, 0.0); 4], 3).unwrap();
    assert_eq!(evaluate_model(&model, c(0.3, 0.0)).unwrap(), c(0.0, 0.0));
    assert!(matches!(
        lsq_fit(&sol, &[c(0.0, 0.0); 4], 5),
        Err(Error::DegreeTooLarge { n: 5, m: 4 })
    ));
    assert!(lsq_fit(&sol, &[c(0.0, 0.0); 3], 2).is_err());

    let rat = solve_hpiep(
        &InnerProductSpec::new(real_nodes(4), vec![c(1.0, 0.0); 4]).unwrap(),
        &PoleSet::new(vec![
            Pole::Finite(c(0.0, 2.0)),
            Pole::Infinite,
            Pole::Infinite,
        ]),
    )
    .unwrap();
    let model = lsq_fit(&rat, &[c(1.0, 0.0); 4], 3).unwrap();
    assert!(matches!(
        evaluate_model(&model, c(0.0, 2.0)),
        Err(Error::EvaluationAtPole)
    ));
}

#[test]
fn model_json_round_trip() {
    let z = real_nodes(10);
    let f: Vec<C64> = z.iter().map(|x| runge(*x)).collect();
    let sol = solve_hiep(&InnerProductSpec::new(z, vec![c(1.0, 0.0); 10]).unwrap()).unwrap();
    let model = lsq_fit(&sol, &f, 6).unwrap();
    let mut buf = Vec::new();
    write_model_json(&model, &mut buf).unwrap();
    let back: ApproximantModel = serde_json::from_slice(&buf).unwrap();
    let x = c(0.37, 0.0);
    assert!(
        (evaluate_model(&back, x).unwrap() - evaluate_model(&model, x).unwrap()).norm() < 1e-15
    );
}

#[test]
fn csv_reader() {
    let text = "z_re,z_im,w_re,w_im,f_re,f_im\n0.5, 0, 1, 0, 2, -1\n-0.5,0,1,0,3,0\n";
    let (z, w, f) = read_data_csv(text.as_bytes()).unwrap();
    assert_eq!(z, vec![c(0.5, 0.0), c(-0.5, 0.0)]);
    assert_eq!(w, vec![c(1.0, 0.0); 2]);
    assert_eq!(f[0], c(2.0, -1.0));
    assert!(read_data_csv("a,b\n1,2\n".as_bytes()).is_err());
    assert!(read_data_csv("a,b,c,d,e,f\n1,2,3,4,5,x\n".as_bytes()).is_err());
}

fn poly_window(z: &[C64]) -> WindowState {
    let m = z.len();
    let sol =
        solve_hiep(&InnerProductSpec::new(z.to_vec(), vec![c(1.0, 0.0); m]).unwrap()).unwrap();
    WindowState::new(
        WindowSolution::Poly(sol),
        z.iter().map(|x| runge(*x)).collect(),
    )
    .unwrap()
}

fn poly_h(s: &WindowState) -> &HiepSolution {
    match &s.solution {
        WindowSolution::Poly(p) => p,
        WindowSolution::Rational(_) => unreachable!(),
    }
}

#[test]
fn drop_and_readd_round_trip() {
    let z = real_nodes(14);
    let state = poly_window(&z);
    let plan = SlidePlan {
        drop_count: 2,
        drop_pole_positions: vec![],
        new_nodes: z[..2].to_vec(),
        new_weights: vec![c(1.0, 0.0); 2],
        new_values: z[..2].iter().map(|x| runge(*x)).collect(),
        new_poles: vec![],
    };
    for method in [PolyMethod::Implicit1, PolyMethod::Eigenvector] {
        let next = slide_window(
            &state,
            &plan,
            WindowMethod::Poly(method),
            RefinementConfig::default(),
            LeftVectorSource::default(),
        )
        .unwrap();
        assert_eq!(next.k, 1);
        assert_eq!(next.solution.nodes().len(), 14);
        assert!(max_modulus_diff(poly_h(&next).h.as_mat(), poly_h(&state).h.as_mat()) < 1e-9);
    }
}

#[test]
fn rational_drop_and_readd_round_trip() {
    let z = real_nodes(10);
    let poles = vec![Pole::Infinite; 9];
    let sol = solve_hpiep(
        &InnerProductSpec::new(z.clone(), vec![c(1.0, 0.0); 10]).unwrap(),
        &PoleSet::new(poles),
    )
    .unwrap();
    let state = WindowState::new(
        WindowSolution::Rational(sol.clone()),
        z.iter().map(|x| runge(*x)).collect(),
    )
    .unwrap();
    let plan = SlidePlan {
        drop_count: 2,
        drop_pole_positions: vec![8, 7],
        new_nodes: z[..2].to_vec(),
        new_weights: vec![c(1.0, 0.0); 2],
        new_values: z[..2].iter().map(|x| runge(*x)).collect(),
        new_poles: vec![(Pole::Infinite, None); 2],
    };
    for method in [PencilMethod::Implicit, PencilMethod::Eigenvector] {
        let next = slide_window(
            &state,
            &plan,
            WindowMethod::Pencil(method),
            RefinementConfig::default(),
            LeftVectorSource::default(),
        )
        .unwrap();
        let WindowSolution::Rational(p) = &next.solution else {
            unreachable!()
        };
        let a = right_solve_upper(p.pencil.h.as_mat(), p.pencil.k.as_mat());
        let b = right_solve_upper(sol.pencil.h.as_mat(), sol.pencil.k.as_mat());
        assert!(max_modulus_diff(&a, &b) < 1e-9, "{method:?}");
    }
}

#[test]
fn mismatched_window_method_is_rejected() {
    let state = poly_window(&real_nodes(6));
    let plan = SlidePlan {
        drop_count: 0,
        drop_pole_positions: vec![],
        new_nodes: vec![],
        new_weights: vec![],
        new_values: vec![],
        new_poles: vec![],
    };
    let r = slide_window(
        &state,
        &plan,
        WindowMethod::Pencil(PencilMethod::Implicit),
        RefinementConfig::default(),
        LeftVectorSource::default(),
    );
    assert!(matches!(r, Err(Error::ConfigInvalid(_))));
    assert!(WindowState::new(state.solution.clone(), vec![]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficients_are_basis_projections(seed in 0u64..10_000, m in 2usize..12, frac in 0.0..1.0f64) {
        let mut rng = rng(seed);
        let z = separated_nodes(&mut rng, m, 1e-2);
        let w = weights(&mut rng, m);
        let f: Vec<C64> = (0..m).map(|_| point(&mut rng)).collect();
        let n = 1 + ((m - 1) as f64 * frac) as usize;
        let sol = solve_hiep(&InnerProductSpec::new(z.clone(), w.clone()).unwrap()).unwrap();
        let model = lsq_fit(&sol, &f, n).unwrap();
        // weighted residual is orthogonal to the first n basis vectors
        let res: Vec<C64> = (0..m).map(|j| w[j] * (evaluate_model(&model, z[j]).unwrap() - f[j])).collect();
        for d in 0..n {
            let ip: C64 = (0..m).map(|j| sol.q[(j, d)].conj() * res[j]).sum();
            prop_assert!(ip.norm() < 1e-10);
        }
    }
}
