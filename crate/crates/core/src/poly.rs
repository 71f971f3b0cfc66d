//! Removing a node from a polynomial recurrence matrix: the explicit and
//! implicit perfect-shift RQ methods and the eigenvector method.

use crate::error::{Error, Result};
use crate::linalg::core::{
    left_apply_range, make_core, make_core_row_left, right_apply_adj_range, CoreTransformation,
};
use crate::linalg::hessenberg::zero_below_subdiagonal;
use crate::linalg::mat::{norm2_estimate, normalize, vec_norm, Mat};
use crate::linalg::rq::{rq_hessenberg, RqFactors};
use crate::linalg::transform::{Op, Transform};
use crate::linalg::{is_proper, ToleranceConfig, UpperHessenberg};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepPolicy {
    One,
    /// Always two RQ steps followed by weight restoration.
    Two,
    /// A second step only when the first leaves a coupling above the threshold.
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementConfig {
    /// Maximum number of refinement rounds.
    pub n_ir: usize,
    /// Rounds executed between two checks of the residual test.
    pub batch: usize,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig { n_ir: 1, batch: 1 }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(Error::ConfigInvalid(
                "refinement batch must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DowndateRequest {
    pub target_node: C64,
    pub steps: StepPolicy,
    pub refinement: RefinementConfig,
    pub tol: ToleranceConfig,
}

impl DowndateRequest {
    pub fn new(target_node: C64) -> Self {
        DowndateRequest {
            target_node,
            steps: StepPolicy::One,
            refinement: RefinementConfig::default(),
            tol: ToleranceConfig::default(),
        }
    }

    pub fn with_steps(mut self, steps: StepPolicy) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_refinement(mut self, n_ir: usize, batch: usize) -> Self {
        self.refinement = RefinementConfig { n_ir, batch };
        self
    }
}

/// Left- and right-hand sides of the two eigenvector quality tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub residual: f64,
    pub residual_bound: f64,
    pub trailing: f64,
    pub trailing_bound: f64,
    pub refinement_rounds: usize,
}

#[derive(Clone, Debug)]
pub struct DowndateOutcome {
    pub h_reduced: UpperHessenberg,
    /// Operations on the full `m`-dimensional problem, before deflation.
    pub pre: Transform,
    /// Operations on the reduced problem, after deflation.
    pub post: Transform,
    /// Coupling between the isolated eigenvalue and the trailing block, before zeroing.
    pub deflation_residual: f64,
    pub steps_taken: usize,
    pub conditions: Option<ConditionRecord>,
}

fn check_input(h: &UpperHessenberg) -> Result<()> {
    if h.dim() < 2 || !is_proper(h, 0.0) {
        return Err(Error::NotProper);
    }
    Ok(())
}

/// Applies `H ← G H Gᴴ` on a dense matrix.
fn similarity(a: &mut Mat, g: &CoreTransformation) {
    let n = a.rows();
    left_apply_range(g, a, 0, n);
    right_apply_adj_range(g, a, 0, n);
}

/// One explicit perfect-shift RQ step: `Q̂R̂ + z̃I` with `H − z̃I = R̂Q̂`.
pub fn explicit_step(a: &Mat, shift: C64, ops: &mut Transform) -> Mat {
    let m = a.rows();
    let RqFactors { mut r, cores } = rq_hessenberg(a.shifted(shift));
    for g in cores.iter().rev() {
        left_apply_range(g, &mut r, g.index, m);
        ops.push(Op::Similarity(*g));
    }
    zero_below_subdiagonal(&mut r);
    for i in 0..m {
        r[(i, i)] += shift;
    }
    r
}

/// One implicit perfect-shift RQ step: initial core from the last row of
/// `H − z̃I`, then an upward bulge chase.
pub fn implicit_step(a: &mut Mat, shift: C64, ops: &mut Transform) {
    let m = a.rows();
    let g = make_core_row_left(a[(m - 1, m - 2)], a[(m - 1, m - 1)] - shift, m - 2)
        .unwrap_or_else(|_| CoreTransformation::identity(m - 2));
    similarity(a, &g);
    ops.push(Op::Similarity(g));
    for i in (0..m.saturating_sub(2)).rev() {
        let g = make_core_row_left(a[(i + 2, i)], a[(i + 2, i + 1)], i)
            .unwrap_or_else(|_| CoreTransformation::identity(i));
        right_apply_adj_range(&g, a, 0, m);
        a[(i + 2, i)] = ZERO;
        left_apply_range(&g, a, 0, m);
        ops.push(Op::Similarity(g));
    }
    zero_below_subdiagonal(a);
}

/// Restores `Qe₁ ∝ w` after the weight image acquired a second nonzero:
/// one core maps `(v₀, v₁)` onto the first axis and the resulting bulge is
/// chased off the bottom of the matrix.
pub fn restore_weight_structure(a: &mut Mat, v: &mut [C64]) -> Transform {
    let n = a.rows();
    let mut ops = Transform::new();
    if n < 2 || v[1] == ZERO {
        return ops;
    }
    let g = make_core(v[0], v[1], 0).expect("v₁ is nonzero");
    similarity(a, &g);
    crate::linalg::core::apply_core_vec(&g, v);
    v[1] = ZERO;
    ops.push(Op::Similarity(g));
    for i in 1..n.saturating_sub(1) {
        let g = match make_core(a[(i, i - 1)], a[(i + 1, i - 1)], i) {
            Ok(g) => g,
            Err(_) => CoreTransformation::identity(i),
        };
        left_apply_range(&g, a, 0, n);
        a[(i + 1, i - 1)] = ZERO;
        right_apply_adj_range(&g, a, 0, n);
        ops.push(Op::Similarity(g));
    }
    zero_below_subdiagonal(a);
    ops
}

/// Scales the first coordinate so that the weight image becomes real positive.
pub fn fix_weight_phase(a: &mut Mat, v: &mut [C64], ops: &mut Transform) {
    let t = v[0];
    if t == ZERO || (t.im == 0.0 && t.re > 0.0) {
        return;
    }
    let d = t.conj() / t.norm();
    let n = a.rows();
    for j in 0..n {
        a[(0, j)] *= d;
    }
    for i in 0..n {
        a[(i, 0)] *= d.conj();
    }
    v[0] = C64::new(t.norm(), 0.0);
    ops.push(Op::Phase {
        index: 0,
        d,
        similarity: true,
    });
}

/// Drops the leading row and column; returns the reduced matrix and the
/// coupling that was discarded from the first column.
fn deflate(a: &Mat) -> (Mat, f64) {
    let n = a.rows();
    let coupling = (1..n).map(|i| a[(i, 0)].norm()).fold(0.0, f64::max);
    (a.block(1, n, 1, n), coupling)
}

/// Finishes a matrix-method downdate: deflation, optional weight restoration,
/// phase normalization.
fn finish(
    a: Mat,
    pre: Transform,
    steps_taken: usize,
    conditions: Option<ConditionRecord>,
) -> DowndateOutcome {
    let m = a.rows();
    let mut t = vec![ZERO; m];
    t[0] = C64::new(1.0, 0.0);
    pre.apply_left_vec(&mut t);
    let (mut red, coupling) = deflate(&a);
    let mut v: Vec<C64> = t[1..].to_vec();
    let mut post = if v.len() > 1 && v[1..].iter().any(|x| *x != ZERO) {
        restore_weight_structure(&mut red, &mut v)
    } else {
        Transform::new()
    };
    fix_weight_phase(&mut red, &mut v, &mut post);
    let (h_reduced, _) = UpperHessenberg::truncate(red);
    DowndateOutcome {
        h_reduced,
        pre,
        post,
        deflation_residual: coupling,
        steps_taken,
        conditions,
    }
}

fn run_matrix_method(
    h: &UpperHessenberg,
    req: &DowndateRequest,
    step: impl Fn(&Mat, C64, &mut Transform) -> Mat,
) -> Result<DowndateOutcome> {
    check_input(h)?;
    let z = req.target_node;
    let threshold = req.tol.deflation_threshold(h.fro_norm());
    let mut ops = Transform::new();
    let mut a = step(h.as_mat(), z, &mut ops);
    let mut steps = 1;
    let coupling = a[(1, 0)].norm();
    let second = match req.steps {
        StepPolicy::One => false,
        StepPolicy::Two => true,
        StepPolicy::Adaptive => coupling > threshold,
    };
    if second {
        a = step(&a, z, &mut ops);
        steps = 2;
    }
    let coupling = a[(1, 0)].norm();
    if coupling > threshold {
        return Err(Error::DeflationFailed {
            residual: coupling,
            threshold,
        });
    }
    Ok(finish(a, ops, steps, None))
}

pub fn downdate_explicit(h: &UpperHessenberg, req: &DowndateRequest) -> Result<DowndateOutcome> {
    run_matrix_method(h, req, explicit_step)
}

pub fn downdate_implicit(h: &UpperHessenberg, req: &DowndateRequest) -> Result<DowndateOutcome> {
    run_matrix_method(h, req, |a, z, ops| {
        let mut b = a.clone();
        implicit_step(&mut b, z, ops);
        b
    })
}

/// Evaluates the orthonormal polynomials at `z` through the recurrence in `H`:
/// `y_k ∝ p_k(z)`, with `y_0 = 1`.
pub fn recurrence_values(h: &Mat, k: Option<&Mat>, z: C64, n: usize) -> Result<Vec<C64>> {
    recurrence_run(h, k, z, n, true)
}

/// Same recurrence without intermediate rescaling, so that `y_0 = 1` fixes
/// the scale of every entry.
pub(crate) fn recurrence_unscaled(h: &Mat, k: Option<&Mat>, z: C64, n: usize) -> Result<Vec<C64>> {
    recurrence_run(h, k, z, n, false)
}

fn recurrence_run(h: &Mat, k: Option<&Mat>, z: C64, n: usize, rescale: bool) -> Result<Vec<C64>> {
    let m = h.rows();
    let n = n.min(m);
    let mut y = vec![ZERO; n];
    if n == 0 {
        return Ok(y);
    }
    y[0] = C64::new(1.0, 0.0);
    for col in 0..n - 1 {
        let kk = |i: usize| match k {
            Some(k) => k[(i, col)],
            None => {
                if i == col {
                    C64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            }
        };
        let mut acc = ZERO;
        for i in 0..=col {
            acc += y[i] * (h[(i, col)] - z * kk(i));
        }
        let d = h[(col + 1, col)] - z * kk(col + 1);
        if d == ZERO {
            return Err(Error::RecurrenceBreakdown { index: col });
        }
        y[col + 1] = -acc / d;
        let big = y[col + 1].norm();
        if rescale && big > 1e150 {
            for v in y.iter_mut().take(col + 2) {
                *v /= big;
            }
        }
    }
    Ok(y)
}

/// Unit eigenvector of `H` for the node `z̃` built from the recurrence:
/// `x ∝ w̄_j (p_0(z_j), …, p_{m−1}(z_j))ᴴ`.
pub fn eigenvector_from_recurrence(h: &UpperHessenberg, w_j: C64, z: C64) -> Result<Vec<C64>> {
    let y = recurrence_values(h.as_mat(), None, z, h.dim())?;
    let mut x: Vec<C64> = y.iter().map(|v| (w_j * v).conj()).collect();
    if normalize(&mut x) == 0.0 {
        return Err(Error::RecurrenceBreakdown { index: 0 });
    }
    Ok(x)
}

/// `(H − z̃I)x` for a Hessenberg `H`.
fn shifted_residual(h: &Mat, z: C64, x: &[C64]) -> Vec<C64> {
    let m = h.rows();
    (0..m)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let mut acc = -z * x[i];
            for j in lo..m {
                acc += h[(i, j)] * x[j];
            }
            acc
        })
        .collect()
}

/// Weighted residual vector `ε̂_i = r_i / ‖(x_{i−1}, …, x_m)‖` with `x_0 := 0`.
pub fn trailing_ratios(r: &[C64], x: &[C64]) -> Vec<f64> {
    let m = x.len();
    let mut tail = vec![0.0f64; m + 1];
    for i in (0..m).rev() {
        tail[i] = tail[i + 1].hypot(x[i].norm());
    }
    (0..m)
        .map(|i| {
            let d = tail[i.saturating_sub(1)];
            if d == 0.0 {
                if r[i] == ZERO {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                r[i].norm() / d
            }
        })
        .collect()
}

pub fn trailing_measure(r: &[C64], x: &[C64]) -> f64 {
    trailing_ratios(r, x)
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug)]
pub struct Refined {
    pub x: Vec<C64>,
    pub rounds: usize,
    pub residual: f64,
    pub bound: f64,
}

impl Refined {
    pub fn satisfied(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Refinement loop shared by the matrix and pencil methods: `step` is one
/// inverse-iteration solve, `residual` the norm being driven below `bound`.
pub(crate) fn refine_with(
    x: &[C64],
    cfg: &RefinementConfig,
    bound: f64,
    residual: impl Fn(&[C64]) -> f64,
    mut step: impl FnMut(&[C64]) -> Result<Vec<C64>>,
) -> Result<Refined> {
    cfg.validate()?;
    let mut best = x.to_vec();
    normalize(&mut best);
    let mut best_res = residual(&best);
    let mut rounds = 0;
    if best_res <= bound {
        return Ok(Refined {
            x: best,
            rounds,
            residual: best_res,
            bound,
        });
    }
    let mut cur = best.clone();
    while rounds < cfg.n_ir {
        let steps = cfg.batch.min(cfg.n_ir - rounds);
        for _ in 0..steps {
            let mut y = step(&cur)?;
            if normalize(&mut y) == 0.0 {
                return Err(Error::SingularSolve);
            }
            cur = y;
            let res = residual(&cur);
            if res <= best_res {
                best_res = res;
                best = cur.clone();
            }
        }
        rounds += steps;
        if best_res <= bound {
            break;
        }
    }
    Ok(Refined {
        x: best,
        rounds,
        residual: best_res,
        bound,
    })
}

/// Inverse-iteration refinement of an approximate eigenvector, at most
/// `n_ir` rounds, testing the residual every `batch` rounds.
pub fn iterative_refinement(
    h: &UpperHessenberg,
    z: C64,
    x: &[C64],
    cfg: &RefinementConfig,
    tol: &ToleranceConfig,
) -> Result<Refined> {
    let a = h.as_mat();
    let shifted = a.shifted(z);
    let bound = tol.deflation_factor * tol.eps_mach * norm2_estimate(&shifted);
    let floor = tol.eps_mach * h.fro_norm();
    let mut rq = None;
    refine_with(
        x,
        cfg,
        bound,
        |v| vec_norm(&shifted_residual(a, z, v)),
        |v| {
            rq.get_or_insert_with(|| rq_hessenberg(shifted.clone()))
                .solve(v, floor)
        },
    )
}

#[derive(Clone, Debug)]
pub struct TrailingAccurate {
    pub x: Vec<C64>,
    pub achieved: f64,
    pub bound: f64,
}

impl TrailingAccurate {
    pub fn satisfied(&self) -> bool {
        self.achieved <= self.bound
    }

    pub(crate) fn into_result(self) -> Result<TrailingAccurate> {
        if self.satisfied() {
            Ok(self)
        } else {
            Err(Error::TrailingAccuracyFailed {
                achieved: self.achieved,
                bound: self.bound,
            })
        }
    }
}

/// Recomputes the entries of `x` from its largest one down to the end by
/// solving rows `i+1` of the Hessenberg `a` upward from the last row. For a
/// vector that decays towards the bottom this keeps the small trailing
/// entries accurate relative to their own size.
pub fn backsolve_tail(a: &Mat, x: &[C64]) -> Vec<C64> {
    let m = x.len();
    if m < 2 {
        return x.to_vec();
    }
    let p = (0..m).fold(0, |b, i| if x[i].norm() > x[b].norm() { i } else { b });
    let mut y = vec![ZERO; m];
    y[m - 1] = C64::new(1.0, 0.0);
    for i in (p..m - 1).rev() {
        let mut acc = ZERO;
        for j in i + 1..m {
            acc += a[(i + 1, j)] * y[j];
        }
        let d = a[(i + 1, i)];
        if d == ZERO {
            return x.to_vec();
        }
        y[i] = -acc / d;
        let big = y[i].norm();
        if big > 1e100 {
            for v in &mut y[i..] {
                *v /= big;
            }
        }
    }
    let s = x[p] / y[p];
    if !s.is_finite() {
        return x.to_vec();
    }
    let mut out = x[..p].to_vec();
    out.extend(y[p..].iter().map(|v| v * s));
    out
}

type VecMap<'a> = dyn Fn(&[C64]) -> Vec<C64> + 'a;

/// Search for a trailing-accurate vector among `x`, its inverse-iteration
/// successors and (when `polish` is given) their back-solved variants.
/// Returns the best candidate found, whether or not it meets `bound`.
pub(crate) fn trailing_with(
    x: &[C64],
    attempts: usize,
    bound: f64,
    residual: impl Fn(&[C64]) -> Vec<C64>,
    mut step: impl FnMut(&[C64]) -> Result<Vec<C64>>,
    polish: Option<&VecMap<'_>>,
) -> Result<TrailingAccurate> {
    let mut best = x.to_vec();
    normalize(&mut best);
    let mut best_val = trailing_measure(&residual(&best), &best);
    let consider = |v: &[C64], best: &mut Vec<C64>, best_val: &mut f64| {
        let mut c = v.to_vec();
        if normalize(&mut c) == 0.0 || c.iter().any(|e| !e.is_finite()) {
            return;
        }
        let val = trailing_measure(&residual(&c), &c);
        if val < *best_val {
            *best_val = val;
            *best = c;
        }
    };
    if let Some(f) = polish {
        let start = best.clone();
        consider(&f(&start), &mut best, &mut best_val);
    }
    let mut cur = x.to_vec();
    normalize(&mut cur);
    for _ in 0..attempts {
        if best_val <= bound {
            break;
        }
        let mut y = step(&cur)?;
        if normalize(&mut y) == 0.0 {
            return Err(Error::SingularSolve);
        }
        cur = y;
        consider(&cur, &mut best, &mut best_val);
        if let Some(f) = polish {
            consider(&f(&cur), &mut best, &mut best_val);
        }
    }
    Ok(TrailingAccurate {
        x: best,
        achieved: best_val,
        bound,
    })
}

/// Produces an eigenvector whose residual is small relative to its trailing
/// entries. Starting from `x`, inverse iteration on the RQ factors is
/// repeated (at most `max(n_ir, 1)` times) until the weighted residual
/// meets `ε‖H‖_F`.
pub fn trailing_accurate_eigenvector(
    h: &UpperHessenberg,
    z: C64,
    x: &[C64],
    cfg: &RefinementConfig,
    tol: &ToleranceConfig,
) -> Result<TrailingAccurate> {
    let a = h.as_mat();
    let shifted = a.shifted(z);
    let bound = tol.eps_mach * h.fro_norm();
    let floor = tol.eps_mach * h.fro_norm();
    let mut rq = None;
    trailing_with(
        x,
        cfg.n_ir.max(1),
        bound,
        |v| shifted_residual(a, z, v),
        |v| {
            rq.get_or_insert_with(|| rq_hessenberg(a.shifted(z)))
                .solve(v, floor)
        },
        Some(&|v: &[C64]| backsolve_tail(&shifted, v)),
    )
    .and_then(TrailingAccurate::into_result)
}

/// Cores `G_{m−2}, …, G_0` (in application order) with `G_0 ⋯ G_{m−2} x = αe₁`.
pub fn cores_to_e1(x: &[C64]) -> Vec<CoreTransformation> {
    let m = x.len();
    let mut v = x.to_vec();
    let mut out = Vec::with_capacity(m.saturating_sub(1));
    for i in (0..m.saturating_sub(1)).rev() {
        let g = make_core(v[i], v[i + 1], i).unwrap_or_else(|_| CoreTransformation::identity(i));
        crate::linalg::core::apply_core_vec(&g, &mut v);
        v[i + 1] = ZERO;
        out.push(g);
    }
    out
}

/// Eigenvector method: recurrence eigenvector, refinement, trailing-accurate
/// eigenvector, reduction to `e₁` and one similarity.
pub fn downdate_eigenvector(
    h: &UpperHessenberg,
    w_j: C64,
    req: &DowndateRequest,
) -> Result<DowndateOutcome> {
    check_input(h)?;
    let z = req.target_node;
    let x0 = eigenvector_from_recurrence(h, w_j, z)?;
    let refined = iterative_refinement(h, z, &x0, &req.refinement, &req.tol)?;
    let mut record = ConditionRecord {
        residual: refined.residual,
        residual_bound: refined.bound,
        refinement_rounds: refined.rounds,
        ..Default::default()
    };
    // a vector missing the trailing test is still used; the step only breaks
    // down when it fails to decouple the eigenvalue
    let dot = match trailing_accurate_eigenvector(h, z, &refined.x, &req.refinement, &req.tol) {
        Ok(t) => t,
        Err(Error::TrailingAccuracyFailed { .. }) => {
            trailing_candidate(h, z, &refined.x, &req.refinement, &req.tol)?
        }
        Err(e) => return Err(e),
    };
    record.trailing = dot.achieved;
    record.trailing_bound = dot.bound;
    let mut a = h.as_mat().clone();
    let mut ops = Transform::new();
    for g in cores_to_e1(&dot.x) {
        similarity(&mut a, &g);
        ops.push(Op::Similarity(g));
    }
    let coupling = (1..a.rows()).map(|i| a[(i, 0)].norm()).fold(0.0, f64::max);
    let threshold = req.tol.deflation_threshold(h.fro_norm());
    if coupling > threshold {
        return Err(Error::Breakdown {
            step: 0,
            reason: format!(
                "eigenvector does not deflate: coupling {coupling:.3e} > {threshold:.3e} \
                 (trailing accuracy {:.3e}, bound {:.3e})",
                dot.achieved, dot.bound
            ),
        });
    }
    zero_below_subdiagonal(&mut a);
    Ok(finish(a, ops, 1, Some(record)))
}

fn trailing_candidate(
    h: &UpperHessenberg,
    z: C64,
    x: &[C64],
    cfg: &RefinementConfig,
    tol: &ToleranceConfig,
) -> Result<TrailingAccurate> {
    let a = h.as_mat();
    let floor = tol.eps_mach * h.fro_norm();
    let shifted = a.shifted(z);
    let rq = rq_hessenberg(shifted.clone());
    trailing_with(
        x,
        cfg.n_ir.max(1),
        tol.eps_mach * h.fro_norm(),
        |v| shifted_residual(a, z, v),
        |v| rq.solve(v, floor),
        Some(&|v: &[C64]| backsolve_tail(&shifted, v)),
    )
}

/// Which downdating algorithm to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum PolyMethod {
    Explicit1,
    Implicit1,
    Implicit2,
    Eigenvector,
}

impl PolyMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PolyMethod::Explicit1 => "explicit1",
            PolyMethod::Implicit1 => "implicit1",
            PolyMethod::Implicit2 => "implicit2",
            PolyMethod::Eigenvector => "eigenvector",
        }
    }

    pub const ALL: [PolyMethod; 4] = [
        PolyMethod::Explicit1,
        PolyMethod::Implicit1,
        PolyMethod::Implicit2,
        PolyMethod::Eigenvector,
    ];
}

pub fn downdate_with(
    method: PolyMethod,
    h: &UpperHessenberg,
    w_j: C64,
    req: &DowndateRequest,
) -> Result<DowndateOutcome> {
    match method {
        PolyMethod::Explicit1 => downdate_explicit(h, &req.with_steps(StepPolicy::One)),
        PolyMethod::Implicit1 => downdate_implicit(h, &req.with_steps(StepPolicy::One)),
        PolyMethod::Implicit2 => downdate_implicit(h, &req.with_steps(StepPolicy::Two)),
        PolyMethod::Eigenvector => downdate_eigenvector(h, w_j, req),
    }
}
