//! Removing a node and a pole from a Hessenberg pencil: pole swapping, pole
//! changing, the implicit RQZ method and the pencil eigenvector method.

use crate::error::{Error, Result};
use crate::linalg::core::{
    apply_core_vec, left_apply_range, make_core, make_core_row_left, right_apply_adj_range,
    CoreTransformation,
};
use crate::linalg::hessenberg::zero_below_subdiagonal;
use crate::linalg::mat::{norm2_estimate, vec_norm, Mat};
use crate::linalg::rq::rq_hessenberg;
use crate::linalg::transform::{Op, Transform};
use crate::linalg::{is_proper_pencil, HessenbergPencil, Pole, ToleranceConfig, UpperHessenberg};
use crate::poly::{
    backsolve_tail, cores_to_e1, recurrence_values, refine_with, trailing_measure, trailing_with,
    ConditionRecord, Refined, RefinementConfig, TrailingAccurate,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Relative distance below which two neighbouring poles are treated as equal.
pub const SWAP_COINCIDENCE_TOL: f64 = 1e-13;

fn left(h: &mut Mat, k: &mut Mat, g: &CoreTransformation, c0: usize) {
    let n = h.cols();
    left_apply_range(g, h, c0, n);
    left_apply_range(g, k, c0, n);
}

fn right(h: &mut Mat, k: &mut Mat, g: &CoreTransformation, r1: usize) {
    right_apply_adj_range(g, h, 0, r1);
    right_apply_adj_range(g, k, 0, r1);
}

/// Swaps the poles at positions `i` and `i + 1` in place. Returns `None`
/// when the two poles coincide and nothing was done.
fn swap_in_place(
    h: &mut Mat,
    k: &mut Mat,
    i: usize,
    ops: &mut Transform,
) -> Result<Option<(CoreTransformation, CoreTransformation)>> {
    let m = h.rows();
    if i + 2 >= m {
        return Err(Error::IndexOutOfRange { index: i, dim: m });
    }
    let (a11, a12, a22) = (h[(i + 1, i)], h[(i + 1, i + 1)], h[(i + 2, i + 1)]);
    let (b11, b12, b22) = (k[(i + 1, i)], k[(i + 1, i + 1)], k[(i + 2, i + 1)]);
    let n1 = a11.norm().hypot(b11.norm());
    let n2 = a22.norm().hypot(b22.norm());
    let m11 = b22 * a11 - a22 * b11;
    if m11.norm() <= SWAP_COINCIDENCE_TOL * n1 * n2 {
        return Ok(None);
    }
    let m12 = b22 * a12 - a22 * b12;
    // (m12, −m11) spans the eigenvector of the 2×2 block for the lower pole
    let s = make_core(m12, -m11, i)?;
    right(h, k, &s, (i + 3).min(m));
    let (hc, kc) = (
        (h[(i + 1, i)], h[(i + 2, i)]),
        (k[(i + 1, i)], k[(i + 2, i)]),
    );
    let (x1, x2) = if hc.0.norm().hypot(hc.1.norm()) >= kc.0.norm().hypot(kc.1.norm()) {
        hc
    } else {
        kc
    };
    let r = make_core(x1, x2, i + 1)?;
    left(h, k, &r, i);
    h[(i + 2, i)] = ZERO;
    k[(i + 2, i)] = ZERO;
    ops.push(Op::Right(s));
    ops.push(Op::Left(r));
    Ok(Some((r, s)))
}

fn change_last_in_place(
    h: &mut Mat,
    k: &mut Mat,
    xi: Pole,
    ops: &mut Transform,
) -> Result<CoreTransformation> {
    let m = h.rows();
    let (ht, kt) = xi.pair();
    let a = kt * h[(m - 1, m - 2)] - ht * k[(m - 1, m - 2)];
    let b = kt * h[(m - 1, m - 1)] - ht * k[(m - 1, m - 1)];
    let g = make_core_row_left(a, b, m - 2).map_err(|_| Error::ShiftIsEigenvalue)?;
    right(h, k, &g, m);
    if xi.is_infinite() {
        k[(m - 1, m - 2)] = ZERO;
    }
    ops.push(Op::Right(g));
    Ok(g)
}

fn change_first_in_place(
    h: &mut Mat,
    k: &mut Mat,
    xi: Pole,
    ops: &mut Transform,
) -> Result<CoreTransformation> {
    let (ht, kt) = xi.pair();
    let a = kt * h[(0, 0)] - ht * k[(0, 0)];
    let b = kt * h[(1, 0)] - ht * k[(1, 0)];
    let g = make_core(a, b, 0).map_err(|_| Error::ShiftIsEigenvalue)?;
    left(h, k, &g, 0);
    if xi.is_infinite() {
        k[(1, 0)] = ZERO;
    }
    ops.push(Op::Left(g));
    Ok(g)
}

fn into_pencil(mut h: Mat, mut k: Mat) -> Result<HessenbergPencil> {
    zero_below_subdiagonal(&mut h);
    zero_below_subdiagonal(&mut k);
    HessenbergPencil::new(
        UpperHessenberg::truncate(h).0,
        UpperHessenberg::truncate(k).0,
    )
}

fn owned(p: &HessenbergPencil) -> (Mat, Mat) {
    (p.h.as_mat().clone(), p.k.as_mat().clone())
}

/// Exchanges the poles at positions `i` and `i + 1`: `P' = R P Sᴴ` with `R`
/// acting on rows `(i+1, i+2)` and `S` on columns `(i, i+1)`. Coinciding
/// poles give identity cores.
pub fn pole_swap(
    p: &HessenbergPencil,
    i: usize,
) -> Result<(HessenbergPencil, CoreTransformation, CoreTransformation)> {
    let (mut h, mut k) = owned(p);
    let mut ops = Transform::new();
    let (r, s) = swap_in_place(&mut h, &mut k, i, &mut ops)?.unwrap_or((
        CoreTransformation::identity(i + 1),
        CoreTransformation::identity(i),
    ));
    Ok((into_pencil(h, k)?, r, s))
}

/// Replaces the last pole by `xi` with one right core on the last two columns.
pub fn change_last_pole(
    p: &HessenbergPencil,
    xi: Pole,
) -> Result<(HessenbergPencil, CoreTransformation)> {
    if p.dim() < 2 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            dim: p.dim(),
        });
    }
    let (mut h, mut k) = owned(p);
    let g = change_last_in_place(&mut h, &mut k, xi, &mut Transform::new())?;
    Ok((into_pencil(h, k)?, g))
}

/// Replaces the first pole by `xi` with one left core on the first two rows.
pub fn change_first_pole(
    p: &HessenbergPencil,
    xi: Pole,
) -> Result<(HessenbergPencil, CoreTransformation)> {
    if p.dim() < 2 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            dim: p.dim(),
        });
    }
    let (mut h, mut k) = owned(p);
    let g = change_first_in_place(&mut h, &mut k, xi, &mut Transform::new())?;
    Ok((into_pencil(h, k)?, g))
}

/// Moves the pole at position `from` to position `to` by adjacent swaps.
fn move_pole(h: &mut Mat, k: &mut Mat, from: usize, to: usize, ops: &mut Transform) -> Result<()> {
    if from < to {
        for i in from..to {
            swap_in_place(h, k, i, ops)?;
        }
    } else {
        for i in (to..from).rev() {
            swap_in_place(h, k, i, ops)?;
        }
    }
    Ok(())
}

/// Moves the pole at position `from` to position `to`; the weight image is
/// left untouched since every left core acts below row 0.
pub fn move_pole_pencil(
    p: &HessenbergPencil,
    from: usize,
    to: usize,
) -> Result<(HessenbergPencil, Transform)> {
    let m = p.dim();
    if from.max(to) + 1 >= m {
        return Err(Error::IndexOutOfRange {
            index: from.max(to),
            dim: m,
        });
    }
    let (mut h, mut k) = owned(p);
    let mut ops = Transform::new();
    move_pole(&mut h, &mut k, from, to, &mut ops)?;
    Ok((into_pencil(h, k)?, ops))
}

fn fix_weight_phase_pencil(h: &mut Mat, k: &mut Mat, t: &mut [C64], ops: &mut Transform) {
    let t0 = t[0];
    if t0 == ZERO || (t0.im == 0.0 && t0.re > 0.0) {
        return;
    }
    let d = t0.conj() / t0.norm();
    for j in 0..h.cols() {
        h[(0, j)] *= d;
        k[(0, j)] *= d;
    }
    t[0] = C64::new(t0.norm(), 0.0);
    ops.push(Op::Phase {
        index: 0,
        d,
        similarity: false,
    });
}

/// Brings an embedded pencil `(diag(z, H), diag(1, K))` with weight image `t`
/// (nonzero in the first two entries) back to a valid solution; the new pole
/// `xi` ends up in the last position.
pub(crate) fn absorb_new_node(
    mut h: Mat,
    mut k: Mat,
    mut t: Vec<C64>,
    xi: Pole,
) -> Result<(HessenbergPencil, Transform)> {
    let m = h.rows();
    let mut ops = Transform::new();
    if m >= 2 {
        let g = make_core(t[0], t[1], 0)?;
        left(&mut h, &mut k, &g, 0);
        apply_core_vec(&g, &mut t);
        t[1] = ZERO;
        ops.push(Op::Left(g));
        // the first pole now equals the new node
        move_pole(&mut h, &mut k, 0, m - 2, &mut ops)?;
        change_last_in_place(&mut h, &mut k, xi, &mut ops)?;
    }
    fix_weight_phase_pencil(&mut h, &mut k, &mut t, &mut ops);
    Ok((into_pencil(h, k)?, ops))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum PencilMethod {
    Implicit,
    Eigenvector,
}

impl PencilMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PencilMethod::Implicit => "implicit",
            PencilMethod::Eigenvector => "eigenvector",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PencilDowndateRequest {
    pub target_node: C64,
    /// Zero-based position of the pole to remove.
    pub target_pole_index: usize,
    pub method: PencilMethod,
    pub refinement: RefinementConfig,
    pub tol: ToleranceConfig,
    pub left_vector: LeftVectorSource,
}

/// Vector reduced by the left cores of the pencil eigenvector method.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeftVectorSource {
    /// The refined recurrence vector `r` itself.
    Recurrence,
    /// `K ṡ` for the trailing-accurate right vector `ṡ`. Equal to `r` up to
    /// scale when `H K⁻¹` is normal, and keeps both reductions consistent
    /// once rounding has moved the pencil away from that.
    #[default]
    RightImage,
}

impl PencilDowndateRequest {
    pub fn new(target_node: C64, target_pole_index: usize, method: PencilMethod) -> Self {
        PencilDowndateRequest {
            target_node,
            target_pole_index,
            method,
            refinement: RefinementConfig::default(),
            tol: ToleranceConfig::default(),
            left_vector: LeftVectorSource::default(),
        }
    }

    pub fn with_refinement(mut self, n_ir: usize, batch: usize) -> Self {
        self.refinement = RefinementConfig { n_ir, batch };
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PencilConditions {
    pub left: ConditionRecord,
    pub right: ConditionRecord,
}

#[derive(Clone, Debug)]
pub struct PencilDowndateOutcome {
    pub pencil_reduced: HessenbergPencil,
    pub pre: Transform,
    pub post: Transform,
    /// Nominal poles of the reduced pencil, in position order.
    pub poles: Vec<Pole>,
    pub deflation_residual: f64,
    pub conditions: Option<PencilConditions>,
}

fn check_pencil_input(
    p: &HessenbergPencil,
    poles: &[Pole],
    req: &PencilDowndateRequest,
) -> Result<()> {
    let m = p.dim();
    if m < 2 || !is_proper_pencil(p, 0.0) {
        return Err(Error::NotProper);
    }
    if req.target_pole_index + 1 >= m || poles.len() + 1 != m {
        return Err(Error::IndexOutOfRange {
            index: req.target_pole_index,
            dim: m,
        });
    }
    req.refinement.validate()
}

fn remaining_poles(poles: &[Pole], removed: usize) -> Vec<Pole> {
    let mut out = poles.to_vec();
    out.remove(removed);
    out
}

fn first_column_coupling(h: &Mat, k: &Mat) -> f64 {
    (1..h.rows())
        .map(|i| h[(i, 0)].norm().max(k[(i, 0)].norm()))
        .fold(0.0, f64::max)
}

fn finish_pencil(
    h: Mat,
    k: Mat,
    pre: Transform,
    poles: Vec<Pole>,
    conditions: Option<PencilConditions>,
) -> Result<PencilDowndateOutcome> {
    let m = h.rows();
    let mut t = vec![ZERO; m];
    t[0] = C64::new(1.0, 0.0);
    pre.apply_left_vec(&mut t);
    let coupling = first_column_coupling(&h, &k);
    let mut rh = h.block(1, m, 1, m);
    let mut rk = k.block(1, m, 1, m);
    let mut v = t[1..].to_vec();
    let mut post = Transform::new();
    fix_weight_phase_pencil(&mut rh, &mut rk, &mut v, &mut post);
    Ok(PencilDowndateOutcome {
        pencil_reduced: into_pencil(rh, rk)?,
        pre,
        post,
        poles,
        deflation_residual: coupling,
        conditions,
    })
}

/// Implicit RQZ downdate: the target pole is moved to the last position and
/// replaced by `z̃`, which is then swapped to the top where it deflates.
pub fn downdate_implicit_rqz(
    p: &HessenbergPencil,
    poles: &[Pole],
    req: &PencilDowndateRequest,
) -> Result<PencilDowndateOutcome> {
    check_pencil_input(p, poles, req)?;
    let m = p.dim();
    let z = req.target_node;
    let (mut h, mut k) = owned(p);
    let mut ops = Transform::new();
    move_pole(&mut h, &mut k, req.target_pole_index, m - 2, &mut ops)?;
    change_last_in_place(&mut h, &mut k, Pole::Finite(z), &mut ops)?;
    move_pole(&mut h, &mut k, m - 2, 0, &mut ops)?;
    // first columns of H and K are now parallel: one core clears both
    let hc = (h[(0, 0)], h[(1, 0)]);
    let kc = (k[(0, 0)], k[(1, 0)]);
    let (a, b) = if kc.0.norm().hypot(kc.1.norm()) >= hc.0.norm().hypot(hc.1.norm()) {
        kc
    } else {
        hc
    };
    let g = make_core(a, b, 0)?;
    left(&mut h, &mut k, &g, 0);
    ops.push(Op::Left(g));
    let coupling = first_column_coupling(&h, &k);
    let threshold = req.tol.deflation_threshold(h.fro_norm().max(k.fro_norm()));
    if coupling > threshold {
        return Err(Error::DeflationFailed {
            residual: coupling,
            threshold,
        });
    }
    finish_pencil(
        h,
        k,
        ops,
        remaining_poles(poles, req.target_pole_index),
        None,
    )
}

/// Unit left eigenvector `r` with `rᴴ(H − z̃K) ≈ 0` from the rational
/// recurrence: `r ∝ w̄_j (r_0(z̃), …, r_{m−1}(z̃))ᴴ`.
pub fn left_eigenvector_from_orf(p: &HessenbergPencil, w_j: C64, z: C64) -> Result<Vec<C64>> {
    let y = recurrence_values(p.h.as_mat(), Some(p.k.as_mat()), z, p.dim())?;
    let mut r: Vec<C64> = y.iter().map(|v| (w_j * v).conj()).collect();
    if crate::linalg::mat::normalize(&mut r) == 0.0 {
        return Err(Error::RecurrenceBreakdown { index: 0 });
    }
    Ok(r)
}

fn pencil_shift(h: &Mat, k: &Mat, z: C64) -> Mat {
    h.sub(&k.scale(z))
}

/// `Aᴴ r` for a dense `A`.
fn adjoint_apply(a: &Mat, r: &[C64]) -> Vec<C64> {
    a.vecmat(&r.iter().map(|x| x.conj()).collect::<Vec<_>>())
        .into_iter()
        .map(|x| x.conj())
        .collect()
}

/// Unit right eigenvector `s` with `(H − z̃K)s ≈ 0` by inverse iteration on
/// the RQ factors of `H − z̃K`, started from `start`.
pub fn right_eigenvector(
    p: &HessenbergPencil,
    z: C64,
    start: &[C64],
    cfg: &RefinementConfig,
    tol: &ToleranceConfig,
) -> Result<Refined> {
    let a = pencil_shift(p.h.as_mat(), p.k.as_mat(), z);
    right_eigenvector_dense(&a, &a, start, cfg, tol, p.h.fro_norm().max(p.k.fro_norm()))
}

/// `solve_on` is Hessenberg and shares its right null space with `measure_on`.
fn right_eigenvector_dense(
    solve_on: &Mat,
    measure_on: &Mat,
    start: &[C64],
    cfg: &RefinementConfig,
    tol: &ToleranceConfig,
    scale: f64,
) -> Result<Refined> {
    if solve_on.rows() == 1 {
        let res = measure_on[(0, 0)].norm();
        return Ok(Refined {
            x: vec![C64::new(1.0, 0.0)],
            rounds: 0,
            residual: res,
            bound: res,
        });
    }
    let bound = tol.deflation_factor * tol.eps_mach * norm2_estimate(measure_on);
    let floor = tol.eps_mach * scale;
    let rq = rq_hessenberg(solve_on.clone());
    // at least one solve: the start vector carries no information about s
    let cfg = RefinementConfig {
        n_ir: cfg.n_ir.max(1),
        batch: cfg.batch,
    };
    let mut first = rq.solve(start, floor)?;
    if crate::linalg::mat::normalize(&mut first) == 0.0 {
        return Err(Error::ConvergenceFailure(
            "right eigenvector collapsed".into(),
        ));
    }
    let mut out = refine_with(
        &first,
        &RefinementConfig {
            n_ir: cfg.n_ir - 1,
            batch: cfg.batch,
        },
        bound,
        |v| vec_norm(&measure_on.matvec(v)),
        |v| rq.solve(v, floor),
    )?;
    out.rounds += 1;
    Ok(out)
}

/// Pencil eigenvector method: left eigenvector from the rational recurrence,
/// left cores with `Rᴴṙ = e₁`, then a right eigenvector of the transformed
/// pencil and right cores with `Sᴴṡ = e₁`. See [`LeftVectorSource`] for the
/// vector the left cores reduce.
pub fn downdate_eigenvector_pencil(
    p: &HessenbergPencil,
    poles: &[Pole],
    w_j: C64,
    req: &PencilDowndateRequest,
) -> Result<PencilDowndateOutcome> {
    check_pencil_input(p, poles, req)?;
    let m = p.dim();
    let z = req.target_node;
    let tol = &req.tol;
    let cfg = &req.refinement;
    let (mut h, mut k) = owned(p);
    let mut ops = Transform::new();
    move_pole(&mut h, &mut k, req.target_pole_index, m - 2, &mut ops)?;
    let moved = into_pencil(h.clone(), k.clone())?;
    let trail_bound = tol.eps_mach * h.fro_norm().min(k.fro_norm());
    let floor = tol.eps_mach * h.fro_norm().max(k.fro_norm());

    let a = pencil_shift(&h, &k, z);
    let rq = rq_hessenberg(a.clone());
    let r0 = left_eigenvector_from_orf(&moved, w_j, z)?;
    let left_bound = tol.deflation_factor * tol.eps_mach * norm2_estimate(&a);
    let r = refine_with(
        &r0,
        cfg,
        left_bound,
        |v| vec_norm(&adjoint_apply(&a, v)),
        |v| rq.solve_adjoint(v, floor),
    )?;
    let right_of = |start: &[C64], measure_on: &Mat| -> Result<(Refined, TrailingAccurate)> {
        let s = right_eigenvector_dense(&a, measure_on, start, cfg, tol, floor / tol.eps_mach)?;
        let sdot = trailing_with(
            &s.x,
            cfg.n_ir.max(1),
            trail_bound,
            |v| measure_on.matvec(v),
            |v| rq.solve(v, floor),
            Some(&|v: &[C64]| backsolve_tail(&a, v)),
        )?;
        Ok((s, sdot))
    };
    // the right null space is not changed by the left cores, so with
    // `RightImage` the right vector is computed once, up front
    let early = match req.left_vector {
        LeftVectorSource::Recurrence => None,
        LeftVectorSource::RightImage => Some(right_of(&r.x, &a)?),
    };
    let rdot = match &early {
        None => trailing_with(
            &r.x,
            cfg.n_ir.max(1),
            trail_bound,
            |v| adjoint_apply(&a, v),
            |v| rq.solve_adjoint(v, floor),
            None,
        )?,
        Some((_, sdot)) => {
            let mut x = k.matvec(&sdot.x);
            if crate::linalg::mat::normalize(&mut x) == 0.0 {
                return Err(Error::SingularSolve);
            }
            let achieved = trailing_measure(&adjoint_apply(&a, &x), &x);
            TrailingAccurate {
                x,
                achieved,
                bound: trail_bound,
            }
        }
    };
    let mut conditions = PencilConditions {
        left: ConditionRecord {
            residual: r.residual,
            residual_bound: r.bound,
            trailing: rdot.achieved,
            trailing_bound: rdot.bound,
            refinement_rounds: r.rounds,
        },
        right: ConditionRecord::default(),
    };
    for g in cores_to_e1(&rdot.x) {
        left(&mut h, &mut k, &g, 0);
        ops.push(Op::Left(g));
    }

    let at = pencil_shift(&h, &k, z);
    let (s, sdot) = match early {
        None => right_of(&rdot.x, &at)?,
        Some((s, sdot)) => {
            let res = at.matvec(&sdot.x);
            let s = Refined {
                residual: vec_norm(&at.matvec(&s.x)),
                ..s
            };
            let achieved = trailing_measure(&res, &sdot.x);
            (s, TrailingAccurate { achieved, ..sdot })
        }
    };
    conditions.right = ConditionRecord {
        residual: s.residual,
        residual_bound: s.bound,
        trailing: sdot.achieved,
        trailing_bound: sdot.bound,
        refinement_rounds: s.rounds,
    };
    for g in cores_to_e1(&sdot.x) {
        right(&mut h, &mut k, &g, m);
        ops.push(Op::Right(g));
    }
    let coupling = first_column_coupling(&h, &k);
    let threshold = tol.deflation_threshold(h.fro_norm().max(k.fro_norm()));
    if coupling > threshold {
        return Err(Error::Breakdown {
            step: 0,
            reason: format!(
                "eigenvectors do not deflate: coupling {coupling:.3e} > {threshold:.3e} \
                 (left trailing {:.3e}/{:.3e}, right trailing {:.3e}/{:.3e})",
                rdot.achieved, rdot.bound, sdot.achieved, sdot.bound
            ),
        });
    }
    finish_pencil(
        h,
        k,
        ops,
        remaining_poles(poles, req.target_pole_index),
        Some(conditions),
    )
}

pub fn downdate_pencil(
    p: &HessenbergPencil,
    poles: &[Pole],
    w_j: C64,
    req: &PencilDowndateRequest,
) -> Result<PencilDowndateOutcome> {
    match req.method {
        PencilMethod::Implicit => downdate_implicit_rqz(p, poles, req),
        PencilMethod::Eigenvector => downdate_eigenvector_pencil(p, poles, w_j, req),
    }
}
