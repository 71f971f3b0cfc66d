//! Discrete least squares in the orthonormal basis carried by an IEP solution,
//! and the sliding-window driver built on downdating and updating.

use crate::error::{Error, Result};
use crate::iep::{HiepSolution, HpiepSolution};
use crate::linalg::mat::{vec_norm, Mat};
use crate::linalg::{Pole, ToleranceConfig};
use crate::poly::{
    downdate_with, recurrence_unscaled, DowndateRequest, PolyMethod, RefinementConfig,
};
use crate::rational::{downdate_pencil, LeftVectorSource, PencilDowndateRequest, PencilMethod};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Anything that carries an orthonormal basis `Q` with `Q e₀ = w/‖w‖` and the
/// recurrence generating it.
pub trait OrthogonalBasis {
    fn basis(&self) -> &Mat;
    fn weights(&self) -> &[C64];
    /// `(H, Some(K))` for pencils, `(H, None)` for matrices.
    fn recurrence(&self) -> (&Mat, Option<&Mat>);
    /// Poles in position order; empty for polynomials.
    fn pole_list(&self) -> &[Pole] {
        &[]
    }
}

impl OrthogonalBasis for HiepSolution {
    fn basis(&self) -> &Mat {
        &self.q
    }
    fn weights(&self) -> &[C64] {
        &self.weights
    }
    fn recurrence(&self) -> (&Mat, Option<&Mat>) {
        (self.h.as_mat(), None)
    }
}

impl OrthogonalBasis for HpiepSolution {
    fn basis(&self) -> &Mat {
        &self.q
    }
    fn weights(&self) -> &[C64] {
        &self.weights
    }
    fn recurrence(&self) -> (&Mat, Option<&Mat>) {
        (self.pencil.h.as_mat(), Some(self.pencil.k.as_mat()))
    }
    fn pole_list(&self) -> &[Pole] {
        &self.poles
    }
}

/// `g(z) = Σ α_d r_d(z)` with the recurrence needed to evaluate `r_0 … r_{n−1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproximantModel {
    pub coefficients: Vec<C64>,
    /// Leading `n × n` block of `H`, row-major.
    pub h: Vec<C64>,
    /// Leading `n × n` block of `K` for rational models.
    pub k: Option<Vec<C64>>,
    pub poles: Vec<Pole>,
    pub weight_norm: f64,
}

impl ApproximantModel {
    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    fn blocks(&self) -> (Mat, Option<Mat>) {
        let n = self.degree();
        let h = Mat::from_fn(n, n, |i, j| self.h[i * n + j]);
        let k = self
            .k
            .as_ref()
            .map(|k| Mat::from_fn(n, n, |i, j| k[i * n + j]));
        (h, k)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }
}

fn flatten(a: &Mat, n: usize) -> Vec<C64> {
    (0..n * n).map(|t| a[(t / n, t % n)]).collect()
}

/// Least-squares coefficients `α = Q_nᴴ (w ∘ f)`.
pub fn lsq_fit(sol: &impl OrthogonalBasis, f: &[C64], n: usize) -> Result<ApproximantModel> {
    let q = sol.basis();
    let w = sol.weights();
    let m = q.rows();
    if f.len() != m {
        return Err(Error::IndexOutOfRange {
            index: f.len(),
            dim: m,
        });
    }
    if n > m {
        return Err(Error::DegreeTooLarge { n, m });
    }
    let wf: Vec<C64> = w.iter().zip(f).map(|(a, b)| a * b).collect();
    let coefficients = (0..n)
        .map(|d| (0..m).map(|j| q[(j, d)].conj() * wf[j]).sum())
        .collect();
    let (h, k) = sol.recurrence();
    Ok(ApproximantModel {
        coefficients,
        h: flatten(h, n),
        k: k.map(|k| flatten(k, n)),
        poles: sol
            .pole_list()
            .iter()
            .take(n.saturating_sub(1))
            .copied()
            .collect(),
        weight_norm: vec_norm(w),
    })
}

fn basis_values(
    h: &Mat,
    k: Option<&Mat>,
    poles: &[Pole],
    weight_norm: f64,
    z: C64,
    n: usize,
) -> Result<Vec<C64>> {
    if n == 0 {
        return Ok(vec![]);
    }
    if k.is_some() {
        for xi in poles.iter().take(n - 1) {
            if let Pole::Finite(x) = xi {
                if (z - x).norm() <= 1e-14 * x.norm().max(1.0) {
                    return Err(Error::EvaluationAtPole);
                }
            }
        }
    }
    let y = recurrence_unscaled(h, k, z, n).map_err(|e| match (e, k) {
        (Error::RecurrenceBreakdown { .. }, Some(_)) => Error::EvaluationAtPole,
        (e, _) => e,
    })?;
    Ok(y.into_iter().map(|v| v / weight_norm).collect())
}

/// Values `r_0(z), …, r_{n−1}(z)` of the orthonormal basis.
pub fn evaluate_basis(sol: &impl OrthogonalBasis, z: C64, n: usize) -> Result<Vec<C64>> {
    let (h, k) = sol.recurrence();
    let m = h.rows();
    if n > m {
        return Err(Error::DegreeTooLarge { n, m });
    }
    basis_values(h, k, sol.pole_list(), vec_norm(sol.weights()), z, n)
}

pub fn evaluate_model(model: &ApproximantModel, z: C64) -> Result<C64> {
    let n = model.degree();
    if n == 0 {
        return Ok(ZERO);
    }
    let (h, k) = model.blocks();
    let r = basis_values(&h, k.as_ref(), &model.poles, model.weight_norm, z, n)?;
    Ok(model.coefficients.iter().zip(&r).map(|(a, b)| a * b).sum())
}

/// Solution carried through a sliding window.
#[derive(Clone, Debug)]
pub enum WindowSolution {
    Poly(HiepSolution),
    Rational(HpiepSolution),
}

impl WindowSolution {
    pub fn dim(&self) -> usize {
        match self {
            WindowSolution::Poly(s) => s.dim(),
            WindowSolution::Rational(s) => s.dim(),
        }
    }

    pub fn nodes(&self) -> &[C64] {
        match self {
            WindowSolution::Poly(s) => &s.nodes,
            WindowSolution::Rational(s) => &s.nodes,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowMethod {
    Poly(PolyMethod),
    Pencil(PencilMethod),
}

#[derive(Clone, Debug)]
pub struct WindowState {
    pub solution: WindowSolution,
    /// Data values in node order.
    pub values: Vec<C64>,
    /// Number of completed slides.
    pub k: usize,
}

impl WindowState {
    pub fn new(solution: WindowSolution, values: Vec<C64>) -> Result<Self> {
        if values.len() != solution.dim() {
            return Err(Error::IndexOutOfRange {
                index: values.len(),
                dim: solution.dim(),
            });
        }
        Ok(WindowState {
            solution,
            values,
            k: 0,
        })
    }
}

/// One slide: the first `drop_count` nodes are removed, then the new nodes
/// are appended.
#[derive(Clone, Debug)]
pub struct SlidePlan {
    pub drop_count: usize,
    /// Pole position removed with each dropped node, at the time of its
    /// removal. Ignored for polynomial windows.
    pub drop_pole_positions: Vec<usize>,
    pub new_nodes: Vec<C64>,
    pub new_weights: Vec<C64>,
    pub new_values: Vec<C64>,
    /// Pole added with each new node and the position it is moved to
    /// afterwards (`None` keeps it last).
    pub new_poles: Vec<(Pole, Option<usize>)>,
}

pub fn slide_window(
    state: &WindowState,
    plan: &SlidePlan,
    method: WindowMethod,
    refinement: RefinementConfig,
    left_vector: LeftVectorSource,
) -> Result<WindowState> {
    let step = state.k + 1;
    let at = |e: Error| Error::AtStep {
        step,
        source: Box::new(e),
    };
    if plan.new_nodes.len() != plan.new_weights.len()
        || plan.new_nodes.len() != plan.new_values.len()
    {
        return Err(Error::ConfigInvalid(
            "slide plan lists differ in length".into(),
        ));
    }
    let mut values = state.values.clone();
    let solution = match (&state.solution, method) {
        (WindowSolution::Poly(s), WindowMethod::Poly(pm)) => {
            let mut s = s.clone();
            for _ in 0..plan.drop_count {
                let req = DowndateRequest::new(s.nodes[0])
                    .with_refinement(refinement.n_ir, refinement.batch);
                let out = downdate_with(pm, &s.h, s.weights[0], &req).map_err(at)?;
                s = s.apply_downdate(0, &out);
                values.remove(0);
            }
            for (z, w) in plan.new_nodes.iter().zip(&plan.new_weights) {
                s = s.update_node(*z, *w).map_err(at)?;
            }
            WindowSolution::Poly(s)
        }
        (WindowSolution::Rational(s), WindowMethod::Pencil(pm)) => {
            if plan.drop_pole_positions.len() != plan.drop_count
                || plan.new_poles.len() != plan.new_nodes.len()
            {
                return Err(Error::ConfigInvalid(
                    "slide plan needs one pole per node".into(),
                ));
            }
            let mut s = s.clone();
            for &pos in &plan.drop_pole_positions {
                let mut req = PencilDowndateRequest::new(s.nodes[0], pos, pm);
                req.refinement = refinement;
                req.tol = ToleranceConfig::default();
                req.left_vector = left_vector;
                let out = downdate_pencil(&s.pencil, &s.poles, s.weights[0], &req).map_err(at)?;
                s = s.apply_downdate(0, &out);
                values.remove(0);
            }
            for ((z, w), (xi, target)) in plan
                .new_nodes
                .iter()
                .zip(&plan.new_weights)
                .zip(&plan.new_poles)
            {
                s = s.update_node(*z, *w, *xi).map_err(at)?;
                if let Some(t) = *target {
                    let last = s.dim() - 2;
                    if t != last {
                        s = s.move_pole(last, t).map_err(at)?;
                    }
                }
            }
            WindowSolution::Rational(s)
        }
        _ => {
            return Err(Error::ConfigInvalid(
                "window method does not match the solution type".into(),
            ))
        }
    };
    values.extend_from_slice(&plan.new_values);
    Ok(WindowState {
        solution,
        values,
        k: step,
    })
}

/// Reads `z_re, z_im, w_re, w_im, f_re, f_im` rows.
pub fn read_data_csv(reader: impl Read) -> Result<(Vec<C64>, Vec<C64>, Vec<C64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let (mut z, mut w, mut f) = (vec![], vec![], vec![]);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        if rec.len() != 6 {
            return Err(Error::ConfigInvalid(format!(
                "expected 6 columns, found {}",
                rec.len()
            )));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::ConfigInvalid(format!("{s}: {e}")))
            })
            .collect::<Result<_>>()?;
        z.push(C64::new(v[0], v[1]));
        w.push(C64::new(v[2], v[3]));
        f.push(C64::new(v[4], v[5]));
    }
    Ok((z, w, f))
}

pub fn read_data_csv_file(path: &Path) -> Result<(Vec<C64>, Vec<C64>, Vec<C64>)> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))?;
    read_data_csv(file)
}

pub fn write_model_json(model: &ApproximantModel, mut out: impl Write) -> Result<()> {
    let s = model.to_json()?;
    out.write_all(s.as_bytes())
        .map_err(|e| Error::ConfigInvalid(e.to_string()))
}
