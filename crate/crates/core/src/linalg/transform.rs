//! Recorded sequences of unitary operations, replayed on bases and vectors.

use super::core::{apply_core_vec, right_apply_adj_range, CoreTransformation};
use super::mat::Mat;
use num_complex::Complex64 as C64;

/// One unitary operation applied to a matrix or pencil.
///
/// `Left(G)`: `A ← G A`. `Right(G)`: `A ← A Gᴴ`. `Similarity(G)`: both.
/// `Phase { index, d }`: row `index` scaled by `d` (and, for a similarity,
/// column `index` by `conj(d)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    Left(CoreTransformation),
    Right(CoreTransformation),
    Similarity(CoreTransformation),
    Phase {
        index: usize,
        d: C64,
        similarity: bool,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transform {
    pub ops: Vec<Op>,
}

impl Transform {
    pub fn new() -> Self {
        Transform { ops: Vec::new() }
    }

    pub fn push(&mut self, op: Op) {
        self.ops.push(op);
    }

    pub fn extend(&mut self, other: &Transform) {
        self.ops.extend_from_slice(&other.ops);
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Applies the row-side action to a vector: `x ← U x`.
    pub fn apply_left_vec(&self, x: &mut [C64]) {
        for op in &self.ops {
            match op {
                Op::Left(g) | Op::Similarity(g) => apply_core_vec(g, x),
                Op::Right(_) => {}
                Op::Phase { index, d, .. } => x[*index] *= d,
            }
        }
    }

    /// Replays the row-side action on a basis: `Q ← Q Uᴴ`.
    pub fn apply_to_basis(&self, q: &mut Mat) {
        let rows = q.rows();
        for op in &self.ops {
            match op {
                Op::Left(g) | Op::Similarity(g) => right_apply_adj_range(g, q, 0, rows),
                Op::Right(_) => {}
                Op::Phase { index, d, .. } => {
                    for r in 0..rows {
                        q[(r, *index)] *= d.conj();
                    }
                }
            }
        }
    }

    /// Number of core transformations recorded.
    pub fn core_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| !matches!(o, Op::Phase { .. }))
            .count()
    }
}
