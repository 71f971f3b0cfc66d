//! Node, weight and pole generators for the experiments.

use crate::linalg::Pole;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use super::orders::balanced_circle_order;

/// `m` equidistant points on the unit circle, listed in balanced order.
pub fn unit_circle_balanced(m: usize) -> Vec<C64> {
    balanced_circle_order(m)
        .into_iter()
        .map(|o| C64::from_polar(1.0, 2.0 * PI * o as f64 / m as f64))
        .collect()
}

/// Roots of the Chebyshev polynomial of the first kind of degree `m`.
pub fn chebyshev_nodes(m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| C64::new((PI * (j as f64 + 0.5) / m as f64).cos(), 0.0))
        .collect()
}

/// `z_j = j/m`, `j = 1, …, m`.
pub fn equidistant_unit_interval(m: usize) -> Vec<C64> {
    (1..=m)
        .map(|j| C64::new(j as f64 / m as f64, 0.0))
        .collect()
}

pub fn uniform_weights(m: usize, value: f64) -> Vec<C64> {
    vec![C64::new(value, 0.0); m]
}

/// `m − 1` poles in pairs on radii `1 − δ` and `1 + δ`. The pair angles are
/// equidistant and follow the balanced order; an odd leftover pole is placed
/// at infinity.
pub fn circle_pole_pairs(m: usize, delta: f64) -> Vec<Pole> {
    let count = m.saturating_sub(1);
    let pairs = count / 2;
    let mut poles = Vec::with_capacity(count);
    for o in balanced_circle_order(pairs) {
        let theta = 2.0 * PI * o as f64 / pairs as f64;
        poles.push(Pole::Finite(C64::from_polar(1.0 - delta, theta)));
        poles.push(Pole::Finite(C64::from_polar(1.0 + delta, theta)));
    }
    if count % 2 == 1 {
        poles.push(Pole::Infinite);
    }
    poles
}

/// Equidistant grid on `[a, b]` with `m` points; returns the nodes and the spacing.
pub fn real_grid(a: f64, b: f64, m: usize) -> (Vec<f64>, f64) {
    let dx = if m > 1 { (b - a) / (m - 1) as f64 } else { 0.0 };
    ((0..m).map(|j| a + j as f64 * dx).collect(), dx)
}

/// One-based pole `ξ_j` of the real-line window: conjugate pairs between
/// consecutive nodes, offset `δ` from the axis.
pub fn window_pole(a: f64, dx: f64, delta: f64, j: usize) -> Pole {
    let jf = j as f64;
    if j % 2 == 1 {
        Pole::Finite(C64::new(a + (jf - 0.5) * dx, delta))
    } else {
        Pole::Finite(C64::new(a + (jf - 1.5) * dx, -delta))
    }
}

/// Test function `f(x) = 1/(cos²x + 1)`.
pub fn test_function(x: f64) -> C64 {
    C64::new(1.0 / (x.cos().powi(2) + 1.0), 0.0)
}

pub fn test_function_complex(z: C64) -> C64 {
    let c = z.cos();
    C64::new(1.0, 0.0) / (c * c + 1.0)
}

/// Singularity pair of the test function with real part `π/2 + jπ`:
/// `arccos(i) + jπ` and `arccos(−i) + jπ` on the principal branch.
pub fn singularity_pair(j: i64) -> [C64; 2] {
    let shift = C64::new(j as f64 * PI, 0.0);
    let i = C64::new(0.0, 1.0);
    [i.acos() + shift, (-i).acos() + shift]
}

/// Range `j_lo..=j_hi` of the singularity pairs used on `[0, απ]`: every
/// pair with real part inside the interval plus three more on each side.
pub fn singularity_range(alpha: f64) -> (i64, i64) {
    let inside = if alpha >= 0.5 {
        (alpha - 0.5).floor() as i64 + 1
    } else {
        0
    };
    (-3, inside - 1 + 3)
}

/// Poles for the rational least-squares space of dimension `n`: the chosen
/// singularities by increasing real part, then infinite poles up to `n − 1`
/// and further infinite poles up to `total`.
pub fn lsq_poles(alpha: f64, n: usize, total: usize) -> (Vec<Pole>, i64) {
    let (lo, hi) = singularity_range(alpha);
    let mut poles: Vec<Pole> = (lo..=hi)
        .flat_map(singularity_pair)
        .map(Pole::Finite)
        .collect();
    poles.truncate(n.saturating_sub(1).min(total));
    poles.resize(total, Pole::Infinite);
    (poles, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singularities_are_poles_of_the_test_function() {
        for j in -3..4 {
            for s in singularity_pair(j) {
                let c = s.cos();
                assert!((c * c + 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pole_counts() {
        let (p1, _) = lsq_poles(1.0, 25, 200);
        assert_eq!(p1.iter().filter(|p| !p.is_infinite()).count(), 14);
        let (p6, _) = lsq_poles(6.0, 25, 200);
        assert_eq!(p6.iter().filter(|p| !p.is_infinite()).count(), 24);
        assert_eq!(p6.len(), 200);
    }

    #[test]
    fn window_poles_pair_up() {
        let (a, dx, d) = (0.0, 0.1, 0.1);
        let (p1, p2) = (window_pole(a, dx, d, 1), window_pole(a, dx, d, 2));
        match (p1, p2) {
            (Pole::Finite(x), Pole::Finite(y)) => assert!((x - y.conj()).norm() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn circle_pairs() {
        let p = circle_pole_pairs(7, 0.1);
        assert_eq!(p.len(), 6);
        if let (Pole::Finite(a), Pole::Finite(b)) = (p[0], p[1]) {
            assert!((a.norm() - 0.9).abs() < 1e-15 && (b.norm() - 1.1).abs() < 1e-15);
            assert!((a.arg() - b.arg()).abs() < 1e-15);
        }
    }
}
