//! Inverse eigenvalue problems: building `(Q, H)` or `(Q, H, K)` from nodes,
//! weights and poles, and enlarging a solution by one node.

use crate::error::{Error, Result};
use crate::linalg::hessenberg::zero_below_subdiagonal;
use crate::linalg::mat::{dot_conj, vec_norm, Mat};
use crate::linalg::transform::Transform;
use crate::linalg::{
    is_proper_pencil, HessenbergPencil, Pole, ToleranceConfig, UpperHessenberg, EPS,
};
use crate::poly::{fix_weight_phase, restore_weight_structure, DowndateOutcome};
use crate::rational::{self, PencilDowndateOutcome};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative tolerance under which two nodes are considered equal.
pub const NODE_DISTINCT_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerProductSpec {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

impl InnerProductSpec {
    pub fn new(nodes: Vec<C64>, weights: Vec<C64>) -> Result<Self> {
        let s = InnerProductSpec { nodes, weights };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.weights.len() {
            return Err(Error::ConfigInvalid(format!(
                "{} nodes but {} weights",
                self.nodes.len(),
                self.weights.len()
            )));
        }
        if self
            .nodes
            .iter()
            .chain(&self.weights)
            .any(|z| !z.is_finite())
        {
            return Err(Error::ConfigInvalid("non-finite node or weight".into()));
        }
        if self.weights.contains(&ZERO) {
            return Err(Error::ConfigInvalid("zero weight".into()));
        }
        let scale = self.nodes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                if (a - b).norm() <= NODE_DISTINCT_TOL * scale {
                    return Err(Error::DuplicateNode {
                        node: a.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn weight_norm(&self) -> f64 {
        vec_norm(&self.weights)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub poles: Vec<Pole>,
}

impl PoleSet {
    pub fn new(poles: Vec<Pole>) -> Self {
        PoleSet { poles }
    }

    pub fn infinite(n: usize) -> Self {
        PoleSet {
            poles: vec![Pole::Infinite; n],
        }
    }

    pub fn check_against(&self, nodes: &[C64]) -> Result<()> {
        let scale = nodes.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for p in &self.poles {
            if let Pole::Finite(x) = p {
                if !x.is_finite() {
                    return Err(Error::ConfigInvalid("non-finite pole".into()));
                }
                if nodes
                    .iter()
                    .any(|z| (z - x).norm() <= NODE_DISTINCT_TOL * scale)
                {
                    return Err(Error::PoleEqualsNode {
                        pole: x.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct HiepSolution {
    pub q: Mat,
    pub h: UpperHessenberg,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct HpiepSolution {
    pub q: Mat,
    pub pencil: HessenbergPencil,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    pub poles: Vec<Pole>,
}

/// Two passes of classical Gram-Schmidt against `basis`; returns the
/// accumulated coefficients.
fn orthogonalize(basis: &[Vec<C64>], v: &mut [C64]) -> Vec<C64> {
    let mut coef = vec![ZERO; basis.len()];
    for _ in 0..2 {
        let c: Vec<C64> = basis.iter().map(|q| dot_conj(q, v)).collect();
        for (q, ci) in basis.iter().zip(&c) {
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= ci * qi;
            }
        }
        for (a, b) in coef.iter_mut().zip(&c) {
            *a += b;
        }
    }
    coef
}

fn columns_to_mat(cols: &[Vec<C64>], rows: usize) -> Mat {
    Mat::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

fn start_vector(spec: &InnerProductSpec) -> Vec<C64> {
    let nw = spec.weight_norm();
    spec.weights.iter().map(|w| w / nw).collect()
}

fn breakdown(step: usize, beta: f64, scale: f64, m: usize) -> Result<()> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN counts as breakdown
    if !(beta > 10.0 * m as f64 * EPS * scale) {
        return Err(Error::Breakdown {
            step,
            reason: format!("Krylov vector collapsed (norm {beta:.3e})"),
        });
    }
    Ok(())
}

/// Arnoldi on `diag(z)` started from `w/‖w‖`.
pub fn solve_hiep(spec: &InnerProductSpec) -> Result<HiepSolution> {
    spec.validate()?;
    let m = spec.len();
    if m == 0 {
        return Err(Error::ConfigInvalid("empty inner product".into()));
    }
    let z = &spec.nodes;
    let mut basis = vec![start_vector(spec)];
    let mut h = Mat::zeros(m, m);
    for j in 0..m {
        let mut v: Vec<C64> = basis[j].iter().zip(z).map(|(q, z)| q * z).collect();
        let before = vec_norm(&v);
        let c = orthogonalize(&basis, &mut v);
        for (i, ci) in c.iter().enumerate() {
            h[(i, j)] = *ci;
        }
        if j + 1 == m {
            break;
        }
        let beta = vec_norm(&v);
        breakdown(j, beta, before, m)?;
        h[(j + 1, j)] = C64::new(beta, 0.0);
        basis.push(v.iter().map(|x| x / beta).collect());
    }
    Ok(HiepSolution {
        q: columns_to_mat(&basis, m),
        h: UpperHessenberg::new(h)?,
        nodes: spec.nodes.clone(),
        weights: spec.weights.clone(),
    })
}

/// Rational Arnoldi on `diag(z)`: step `j` multiplies by `(Z − ξ_j I)⁻¹`,
/// or by `Z` for an infinite pole.
pub fn solve_hpiep(spec: &InnerProductSpec, poles: &PoleSet) -> Result<HpiepSolution> {
    spec.validate()?;
    let m = spec.len();
    if m == 0 {
        return Err(Error::ConfigInvalid("empty inner product".into()));
    }
    if poles.poles.len() != m - 1 {
        return Err(Error::ConfigInvalid(format!(
            "{} poles supplied for {} nodes",
            poles.poles.len(),
            m
        )));
    }
    poles.check_against(&spec.nodes)?;
    let z = &spec.nodes;
    let mut basis = vec![start_vector(spec)];
    let mut h = Mat::zeros(m, m);
    let mut k = Mat::zeros(m, m);
    for j in 0..m - 1 {
        let mut v: Vec<C64> = match poles.poles[j] {
            Pole::Finite(xi) => basis[j].iter().zip(z).map(|(q, z)| q / (z - xi)).collect(),
            Pole::Infinite => basis[j].iter().zip(z).map(|(q, z)| q * z).collect(),
        };
        let before = vec_norm(&v);
        let mut c = orthogonalize(&basis, &mut v);
        let beta = vec_norm(&v);
        breakdown(j, beta, before, m)?;
        c.push(C64::new(beta, 0.0));
        basis.push(v.iter().map(|x| x / beta).collect());
        match poles.poles[j] {
            Pole::Finite(xi) => {
                for (i, ci) in c.iter().enumerate() {
                    k[(i, j)] = *ci;
                    h[(i, j)] = xi * ci;
                }
                h[(j, j)] += ONE;
            }
            Pole::Infinite => {
                for (i, ci) in c.iter().enumerate() {
                    h[(i, j)] = *ci;
                }
                k[(j, j)] = ONE;
            }
        }
    }
    let last: Vec<C64> = basis[m - 1].iter().zip(z).map(|(q, z)| q * z).collect();
    for (i, q) in basis.iter().enumerate() {
        h[(i, m - 1)] = dot_conj(q, &last);
    }
    k[(m - 1, m - 1)] = ONE;
    let mut pencil = HessenbergPencil::new(
        UpperHessenberg::new(h.clone())?,
        UpperHessenberg::new(k.clone())?,
    )?;
    if m > 1 && !is_proper_pencil(&pencil, ToleranceConfig::default().properness_tol) {
        // The last column is free. `K e_m = e_m` can leave the last rows
        // dependent (nodes ±1 with pole 0); take it from a finite `η` instead:
        // `(Z − ηI)v = q_m`, `K e_m = Qᴴv`, `H e_m = ηQᴴv + e_m`.
        let eta = C64::new(
            2.0 * z.iter().map(|x| x.norm()).fold(1.0, f64::max) + 1.0,
            0.0,
        );
        let v: Vec<C64> = basis[m - 1]
            .iter()
            .zip(z)
            .map(|(q, z)| q / (z - eta))
            .collect();
        for (i, q) in basis.iter().enumerate() {
            let ci = dot_conj(q, &v);
            k[(i, m - 1)] = ci;
            h[(i, m - 1)] = eta * ci;
        }
        h[(m - 1, m - 1)] += ONE;
        pencil = HessenbergPencil::new(UpperHessenberg::new(h)?, UpperHessenberg::new(k)?)?;
    }
    Ok(HpiepSolution {
        q: columns_to_mat(&basis, m),
        pencil,
        nodes: spec.nodes.clone(),
        weights: spec.weights.clone(),
        poles: poles.poles.clone(),
    })
}

fn check_new_node(nodes: &[C64], z_new: C64, w_new: C64) -> Result<()> {
    if w_new == ZERO || !w_new.is_finite() || !z_new.is_finite() {
        return Err(Error::ConfigInvalid("invalid node or weight".into()));
    }
    let scale = nodes.iter().map(|z| z.norm()).fold(z_new.norm(), f64::max);
    if nodes
        .iter()
        .any(|z| (z - z_new).norm() <= NODE_DISTINCT_TOL * scale)
    {
        return Err(Error::Breakdown {
            step: nodes.len(),
            reason: format!("node {z_new} already present"),
        });
    }
    Ok(())
}

/// `[[0, Q], [1, 0]]`: the new node is the last row, its coordinate the first column.
fn extend_basis(q: &Mat) -> Mat {
    let m = q.rows();
    Mat::from_fn(m + 1, m + 1, |i, j| match (i == m, j == 0) {
        (true, true) => ONE,
        (false, false) => q[(i, j - 1)],
        _ => ZERO,
    })
}

fn embed(first: C64, a: &Mat) -> Mat {
    let m = a.rows();
    Mat::from_fn(m + 1, m + 1, |i, j| match (i, j) {
        (0, 0) => first,
        (0, _) | (_, 0) => ZERO,
        _ => a[(i - 1, j - 1)],
    })
}

/// Weight image `Q_extᴴ w_ext` of the extended problem.
fn extended_weight_image(m: usize, w_new: C64, wnorm: f64) -> Vec<C64> {
    let mut t = vec![ZERO; m + 1];
    t[0] = w_new;
    if m > 0 {
        t[1] = C64::new(wnorm, 0.0);
    }
    t
}

impl HiepSolution {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn empty() -> Self {
        HiepSolution {
            q: Mat::zeros(0, 0),
            h: UpperHessenberg::new(Mat::zeros(0, 0)).expect("empty matrix"),
            nodes: vec![],
            weights: vec![],
        }
    }

    /// Adds the node `z_new` with weight `w_new`.
    pub fn update_node(&self, z_new: C64, w_new: C64) -> Result<HiepSolution> {
        check_new_node(&self.nodes, z_new, w_new)?;
        let m = self.dim();
        let mut q = extend_basis(&self.q);
        let mut a = embed(z_new, self.h.as_mat());
        let mut t = extended_weight_image(m, w_new, vec_norm(&self.weights));
        let mut ops = restore_weight_structure(&mut a, &mut t);
        fix_weight_phase(&mut a, &mut t, &mut ops);
        ops.apply_to_basis(&mut q);
        zero_below_subdiagonal(&mut a);
        let mut nodes = self.nodes.clone();
        nodes.push(z_new);
        let mut weights = self.weights.clone();
        weights.push(w_new);
        Ok(HiepSolution {
            q,
            h: UpperHessenberg::truncate(a).0,
            nodes,
            weights,
        })
    }

    /// Replays a downdate of node `j` on the tracked basis.
    pub fn apply_downdate(&self, j: usize, out: &DowndateOutcome) -> HiepSolution {
        let q = propagate_basis(&self.q, &out.pre, Some(j), &out.post);
        let mut nodes = self.nodes.clone();
        nodes.remove(j);
        let mut weights = self.weights.clone();
        weights.remove(j);
        HiepSolution {
            q,
            h: out.h_reduced.clone(),
            nodes,
            weights,
        }
    }
}

impl HpiepSolution {
    pub fn dim(&self) -> usize {
        self.pencil.dim()
    }

    pub fn empty() -> Self {
        let e = UpperHessenberg::new(Mat::zeros(0, 0)).expect("empty matrix");
        HpiepSolution {
            q: Mat::zeros(0, 0),
            pencil: HessenbergPencil::new(e.clone(), e).expect("same size"),
            nodes: vec![],
            weights: vec![],
            poles: vec![],
        }
    }

    /// Adds the node `z_new` with weight `w_new`; `xi_new` becomes the last pole.
    pub fn update_node(&self, z_new: C64, w_new: C64, xi_new: Pole) -> Result<HpiepSolution> {
        check_new_node(&self.nodes, z_new, w_new)?;
        if let Pole::Finite(x) = xi_new {
            let scale = z_new.norm().max(1.0);
            if (x - z_new).norm() <= NODE_DISTINCT_TOL * scale
                || self
                    .nodes
                    .iter()
                    .any(|z| (z - x).norm() <= NODE_DISTINCT_TOL * scale)
            {
                return Err(Error::PoleEqualsNode {
                    pole: x.to_string(),
                });
            }
        }
        let m = self.dim();
        let mut q = extend_basis(&self.q);
        let h = embed(z_new, self.pencil.h.as_mat());
        let k = embed(ONE, self.pencil.k.as_mat());
        let t = extended_weight_image(m, w_new, vec_norm(&self.weights));
        let (pencil, ops) = rational::absorb_new_node(h, k, t, xi_new)?;
        ops.apply_to_basis(&mut q);
        let mut nodes = self.nodes.clone();
        nodes.push(z_new);
        let mut weights = self.weights.clone();
        weights.push(w_new);
        let mut poles = self.poles.clone();
        if m > 0 {
            poles.push(xi_new);
        }
        Ok(HpiepSolution {
            q,
            pencil,
            nodes,
            weights,
            poles,
        })
    }

    /// Reorders the poles by moving position `from` to position `to`.
    pub fn move_pole(&self, from: usize, to: usize) -> Result<HpiepSolution> {
        let (pencil, ops) = rational::move_pole_pencil(&self.pencil, from, to)?;
        let mut q = self.q.clone();
        ops.apply_to_basis(&mut q);
        let mut poles = self.poles.clone();
        let xi = poles.remove(from);
        poles.insert(to, xi);
        Ok(HpiepSolution {
            q,
            pencil,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            poles,
        })
    }

    pub fn apply_downdate(&self, j: usize, out: &PencilDowndateOutcome) -> HpiepSolution {
        let q = propagate_basis(&self.q, &out.pre, Some(j), &out.post);
        let mut nodes = self.nodes.clone();
        nodes.remove(j);
        let mut weights = self.weights.clone();
        weights.remove(j);
        HpiepSolution {
            q,
            pencil: out.pencil_reduced.clone(),
            nodes,
            weights,
            poles: out.poles.clone(),
        }
    }
}

/// Applies `pre` to `Q`, drops the deflated first column together with the
/// row of the removed node (when given), then applies `post`.
pub fn propagate_basis(q: &Mat, pre: &Transform, drop_row: Option<usize>, post: &Transform) -> Mat {
    let mut a = q.clone();
    pre.apply_to_basis(&mut a);
    let mut a = match drop_row {
        Some(j) => a.remove_row_col(j, 0),
        None => a,
    };
    post.apply_to_basis(&mut a);
    a
}
