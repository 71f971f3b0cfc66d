//! Error measures for recurrence matrices, pencils, bases and approximants.

use crate::error::Result;
use crate::iep::{HiepSolution, HpiepSolution};
use crate::linalg::reference::{norm2, reference_eigen, reference_eigen_pencil};
use crate::linalg::{HessenbergPencil, Mat, Pole, UpperHessenberg};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use crate::iep::propagate_basis;

/// `‖QᴴQ − I‖₂`.
pub fn err_orthogonality(q: &Mat) -> f64 {
    let g = q.adjoint().matmul(q);
    norm2(&g.sub(&Mat::identity(q.cols())))
}

/// `diag(z) · A`.
fn scale_rows(z: &[C64], a: &Mat) -> Mat {
    Mat::from_fn(a.rows(), a.cols(), |i, j| z[i] * a[(i, j)])
}

fn relative(num: f64, a: f64, b: f64) -> f64 {
    let d = a.max(b);
    if d == 0.0 {
        num
    } else {
        num / d
    }
}

/// `‖ZQ − QH‖₂ / max(‖ZQ‖₂, ‖QH‖₂)`.
pub fn err_recurrence(z: &[C64], q: &Mat, h: &UpperHessenberg) -> f64 {
    let zq = scale_rows(z, q);
    let qh = q.matmul(h.as_mat());
    relative(norm2(&zq.sub(&qh)), norm2(&zq), norm2(&qh))
}

/// `‖ZQK − QH‖₂ / max(‖ZQK‖₂, ‖QH‖₂)`.
pub fn err_recurrence_pencil(z: &[C64], q: &Mat, p: &HessenbergPencil) -> f64 {
    let zqk = scale_rows(z, &q.matmul(p.k.as_mat()));
    let qh = q.matmul(p.h.as_mat());
    relative(norm2(&zqk.sub(&qh)), norm2(&zqk), norm2(&qh))
}

/// `‖ ‖w‖₂ Qe₁ − w ‖₂`.
pub fn err_weight(q: &Mat, w: &[C64]) -> f64 {
    let nw = crate::linalg::mat::vec_norm(w);
    let d: Vec<C64> = w
        .iter()
        .enumerate()
        .map(|(i, wi)| q[(i, 0)] * nw - wi)
        .collect();
    crate::linalg::mat::vec_norm(&d)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeMatch {
    pub err: f64,
    /// Pairs whose runner-up candidate is closer than ten times the pairing error.
    pub ambiguous: usize,
}

/// Greedy pairing: all distances sorted ascending, each node and eigenvalue
/// used once.
pub fn match_nodes(nodes: &[C64], eigs: &[C64]) -> NodeMatch {
    let n = nodes.len().min(eigs.len());
    if n == 0 {
        return NodeMatch::default();
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(nodes.len() * eigs.len());
    for (i, z) in nodes.iter().enumerate() {
        for (j, l) in eigs.iter().enumerate() {
            let d = (z - l).norm();
            pairs.push((if d.is_nan() { f64::INFINITY } else { d }, i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used_n = vec![false; nodes.len()];
    let mut used_e = vec![false; eigs.len()];
    let mut err: f64 = 0.0;
    let mut chosen = Vec::with_capacity(n);
    for (d, i, j) in pairs {
        if !used_n[i] && !used_e[j] {
            used_n[i] = true;
            used_e[j] = true;
            err = err.max(d);
            chosen.push((i, d));
        }
    }
    let mut ambiguous = 0;
    for (i, d) in chosen {
        let mut dist: Vec<f64> = eigs.iter().map(|l| (nodes[i] - l).norm()).collect();
        dist.sort_by(f64::total_cmp);
        if dist.len() > 1 && dist[1] < 10.0 * d.max(f64::MIN_POSITIVE) && dist[1] > 0.0 && d > 0.0 {
            ambiguous += 1;
        }
    }
    NodeMatch { err, ambiguous }
}

/// Largest greedily paired distance between the nodes and the eigenvalues of `H`.
pub fn err_node(nodes: &[C64], h: &UpperHessenberg) -> Result<f64> {
    Ok(match_nodes(nodes, &reference_eigen(h)?).err)
}

pub fn err_node_pencil(nodes: &[C64], p: &HessenbergPencil) -> Result<f64> {
    Ok(match_nodes(nodes, &reference_eigen_pencil(p)?).err)
}

/// Relative deviation for finite poles, `|k/h|` for infinite ones.
pub fn err_pole(p: &HessenbergPencil, poles: &[Pole]) -> f64 {
    let mut err: f64 = 0.0;
    for (i, xi) in poles.iter().enumerate().take(p.dim().saturating_sub(1)) {
        let (h, k) = p.pole_pair(i);
        let e = match xi {
            Pole::Finite(x) => {
                let ratio = h / k;
                if *x == C64::new(0.0, 0.0) {
                    ratio.norm()
                } else {
                    ((ratio - x) / x).norm()
                }
            }
            Pole::Infinite => (k / h).norm(),
        };
        err = err.max(if e.is_nan() { f64::INFINITY } else { e });
    }
    err
}

/// `max |f(x) − g(x)|` over `10m` equidistant points of `[a, b]`, endpoints included.
pub fn err_sup_approx(
    f: impl Fn(f64) -> C64,
    g: impl Fn(f64) -> Result<C64>,
    interval: (f64, f64),
    m: usize,
) -> Result<f64> {
    let n = 10 * m.max(1);
    let (a, b) = interval;
    let mut err: f64 = 0.0;
    for i in 0..n {
        let x = if n == 1 {
            a
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        };
        err = err.max((f(x) - g(x)?).norm());
    }
    Ok(err)
}

/// One step of a run; serializes as `k,err_o,err_r,err_w,err_node[,err_p][,err_f]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub k: usize,
    pub err_o: f64,
    pub err_r: f64,
    pub err_w: f64,
    pub err_node: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err_f: Option<f64>,
}

impl MetricReport {
    pub fn max_error(&self) -> f64 {
        [
            self.err_o,
            self.err_r,
            self.err_w,
            self.err_node,
            self.err_p.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn csv_header(pencil: bool, approx: bool) -> String {
        let mut s = String::from("k,err_o,err_r,err_w,err_node");
        if pencil {
            s.push_str(",err_p");
        }
        if approx {
            s.push_str(",err_f");
        }
        s
    }

    pub fn csv_row(&self, pencil: bool, approx: bool) -> String {
        let mut s = format!(
            "{},{:.6e},{:.6e},{:.6e},{:.6e}",
            self.k, self.err_o, self.err_r, self.err_w, self.err_node
        );
        if pencil {
            s.push_str(&format!(",{:.6e}", self.err_p.unwrap_or(f64::NAN)));
        }
        if approx {
            s.push_str(&format!(",{:.6e}", self.err_f.unwrap_or(f64::NAN)));
        }
        s
    }
}

pub fn report_hiep(k: usize, sol: &HiepSolution) -> Result<MetricReport> {
    Ok(MetricReport {
        k,
        err_o: err_orthogonality(&sol.q),
        err_r: err_recurrence(&sol.nodes, &sol.q, &sol.h),
        err_w: err_weight(&sol.q, &sol.weights),
        err_node: err_node(&sol.nodes, &sol.h)?,
        err_p: None,
        err_f: None,
    })
}

pub fn report_hpiep(k: usize, sol: &HpiepSolution) -> Result<MetricReport> {
    Ok(MetricReport {
        k,
        err_o: err_orthogonality(&sol.q),
        err_r: err_recurrence_pencil(&sol.nodes, &sol.q, &sol.pencil),
        err_w: err_weight(&sol.q, &sol.weights),
        err_node: err_node_pencil(&sol.nodes, &sol.pencil)?,
        err_p: Some(err_pole(&sol.pencil, &sol.poles)),
        err_f: None,
    })
}

/// `‖H̃ᴴH̃ − I‖₂`, the unitarity defect of a recurrence matrix for nodes on the unit circle.
pub fn unitarity_defect(h: &UpperHessenberg) -> f64 {
    err_orthogonality(h.as_mat())
}

/// `‖·‖₂` of the part of `H̃` strictly above the first superdiagonal.
pub fn tridiagonality_defect(h: &UpperHessenberg) -> f64 {
    norm2(&h.above_superdiagonal())
}
