//! Small helpers for points of the integer lattice.
//!
//! Displacements and positions are plain `Vec<i64>`; the canonical ordering
//! used everywhere (ascending ℓ1 norm, ties broken lexicographically) lives
//! here so partitions, encoders, and reports all agree on it.

use std::cmp::Ordering;

/// A site or displacement on the lattice.
pub type Point = Vec<i64>;

/// `a + b`, componentwise.
pub fn add(a: &[i64], b: &[i64]) -> Point {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Adds `b` into `a` in place.
pub fn add_assign(a: &mut [i64], b: &[i64]) {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// `a - b`, componentwise.
pub fn sub(a: &[i64], b: &[i64]) -> Point {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn l1_norm(p: &[i64]) -> i64 {
    p.iter().map(|x| x.abs()).sum()
}

pub fn linf_norm(p: &[i64]) -> i64 {
    p.iter().map(|x| x.abs()).max().unwrap_or(0)
}

pub fn euclid_norm(p: &[i64]) -> f64 {
    p.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

pub fn is_zero(p: &[i64]) -> bool {
    p.iter().all(|&x| x == 0)
}

/// Canonical displacement order: ascending ℓ1 norm, ties lexicographic.
pub fn canonical_cmp(a: &[i64], b: &[i64]) -> Ordering {
    l1_norm(a).cmp(&l1_norm(b)).then_with(|| a.cmp(b))
}

/// All lattice points of the centered cube `[-radius, radius]^dim`.
pub fn centered_window(dim: usize, radius: i64) -> Vec<Point> {
    let mut out = Vec::new();
    let mut current = vec![-radius; dim];
    loop {
        out.push(current.clone());
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == dim {
                return out;
            }
            current[axis] += 1;
            if current[axis] <= radius {
                break;
            }
            current[axis] = -radius;
            axis += 1;
        }
    }
}

/// All sites of the box `[0, extents_1) × ... × [0, extents_d)`.
pub fn box_sites(extents: &[usize]) -> Vec<Point> {
    let mut out = Vec::new();
    let dim = extents.len();
    let mut current = vec![0i64; dim];
    loop {
        out.push(current.clone());
        let mut axis = 0;
        loop {
            if axis == dim {
                return out;
            }
            current[axis] += 1;
            if (current[axis] as usize) < extents[axis] {
                break;
            }
            current[axis] = 0;
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_sorts_by_l1_then_lex() {
        let mut disps = vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1], vec![0, 0]];
        disps.sort_by(|a, b| canonical_cmp(a, b));
        assert_eq!(
            disps,
            vec![vec![0, 0], vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
    }

    #[test]
    fn window_has_expected_size() {
        assert_eq!(centered_window(2, 1).len(), 9);
        assert_eq!(centered_window(1, 3).len(), 7);
        assert_eq!(box_sites(&[4, 2]).len(), 8);
    }
}
