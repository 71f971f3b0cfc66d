//! Node orderings used by the downdating experiments.

/// Balanced ordering of the equidistant grid `0..m` on the circle: every new
/// index is as far as possible from the ones already taken.
///
/// For even `m` the even indices come first (in the balanced order of the
/// half grid) followed by the odd ones, so that dropping the second half of
/// the order leaves an equidistant grid. Odd `m` uses largest-gap insertion
/// with ties going to the smaller index.
pub fn balanced_circle_order(m: usize) -> Vec<usize> {
    match m {
        0 => vec![],
        1 => vec![0],
        _ if m.is_multiple_of(2) => {
            let half = balanced_circle_order(m / 2);
            half.iter()
                .map(|i| 2 * i)
                .chain(half.iter().map(|i| 2 * i + 1))
                .collect()
        }
        _ => gap_insertion(m),
    }
}

fn gap_insertion(m: usize) -> Vec<usize> {
    let mut taken = vec![0usize];
    while taken.len() < m {
        let mut sorted = taken.clone();
        sorted.sort_unstable();
        let mut best: Option<(usize, usize)> = None;
        for (n, &a) in sorted.iter().enumerate() {
            let b = if n + 1 < sorted.len() {
                sorted[n + 1]
            } else {
                m + sorted[0]
            };
            let gap = b - a;
            if gap < 2 {
                continue;
            }
            let mid = (a + gap / 2) % m;
            match best {
                Some((g, i)) if g > gap || (g == gap && i <= mid) => {}
                _ => best = Some((gap, mid)),
            }
        }
        taken.push(
            best.expect("an open gap remains while indices are missing")
                .1,
        );
    }
    taken
}

/// One-based indices `2, m, 4, m−2, 6, …` of the even nodes, alternating
/// between the smallest and the largest remaining one.
pub fn equidistant_downdate_order(m: usize) -> Vec<usize> {
    let evens: Vec<usize> = (1..=m).filter(|i| i % 2 == 0).collect();
    let (mut lo, mut hi) = (0usize, evens.len());
    let mut out = Vec::with_capacity(evens.len());
    let mut take_low = true;
    while lo < hi {
        if take_low {
            out.push(evens[lo]);
            lo += 1;
        } else {
            hi -= 1;
            out.push(evens[hi]);
        }
        take_low = !take_low;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_points() {
        assert_eq!(balanced_circle_order(4), vec![0, 2, 1, 3]);
    }

    #[test]
    fn eight_points_bit_reversed() {
        assert_eq!(balanced_circle_order(8), vec![0, 4, 2, 6, 1, 5, 3, 7]);
    }

    #[test]
    fn odd_sizes_are_permutations() {
        for m in [1, 3, 5, 7, 25, 125, 201] {
            let mut o = balanced_circle_order(m);
            o.sort_unstable();
            assert_eq!(o, (0..m).collect::<Vec<_>>());
        }
    }

    #[test]
    fn equidistant_pattern() {
        assert_eq!(equidistant_downdate_order(8), vec![2, 8, 4, 6]);
        assert_eq!(equidistant_downdate_order(2), vec![2]);
        let o = equidistant_downdate_order(250);
        assert_eq!(o.len(), 125);
        assert_eq!(&o[..4], &[2, 250, 4, 248]);
    }
}
