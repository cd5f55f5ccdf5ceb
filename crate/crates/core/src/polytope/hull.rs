//! Brute-force facets, pulling triangulations and simplex volumes for small
//! full-dimensional point sets.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

/// `normal · x ≤ offset` with `‖normal‖ = 1`; `vertices` lie on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: DVector<f64>,
    pub offset: f64,
}

fn diameter(points: &[DVector<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Generalized cross product of the columns of a k×(k−1) matrix.
fn normal_of(diffs: &DMatrix<f64>) -> DVector<f64> {
    let k = diffs.nrows();
    DVector::from_fn(k, |i, _| {
        let minor = diffs.clone().remove_row(i);
        let det = if minor.nrows() == 0 { 1.0 } else { minor.determinant() };
        if i % 2 == 0 {
            det
        } else {
            -det
        }
    })
}

/// All k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Facets of the hull of `points`, which must span `R^k`.
pub fn facets(points: &[DVector<f64>]) -> Vec<Facet> {
    let Some(k) = points.first().map(|p| p.len()) else { return Vec::new() };
    let diam = diameter(points).max(f64::MIN_POSITIVE);
    let eps = 1e-9 * diam;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for subset in combinations(points.len(), k) {
        let base = &points[subset[0]];
        let diffs = DMatrix::from_fn(k, k - 1, |i, j| points[subset[j + 1]][i] - base[i]);
        let n = normal_of(&diffs);
        let norm = n.norm();
        if norm <= 1e-9 * diam.powi(k as i32 - 1) {
            continue;
        }
        let mut n = n / norm;
        let mut c = n.dot(base);
        let side: Vec<f64> = points.iter().map(|p| n.dot(p) - c).collect();
        let above = side.iter().any(|&s| s > eps);
        let below = side.iter().any(|&s| s < -eps);
        if above && below {
            continue;
        }
        if above {
            n = -n;
            c = -c;
        }
        let on: Vec<usize> = (0..points.len()).filter(|&i| side[i].abs() <= eps).collect();
        if seen.insert(on.clone()) {
            out.push(Facet { vertices: on, normal: n, offset: c });
        }
    }
    out
}

/// Orthonormal coordinates of `points` inside their own affine hull.
fn intrinsic(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let k = points[0].len();
    let m = points.len();
    let diffs = DMatrix::from_fn(k, m - 1, |i, j| points[j + 1][i] - points[0][i]);
    let svd = diffs.svd(true, false);
    let u = svd.u.expect("requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-9 * smax).collect();
    let basis = DMatrix::from_fn(k, keep.len(), |i, j| u[(i, keep[j])]);
    points.iter().map(|p| basis.tr_mul(&(p - &points[0]))).collect()
}

/// Pulling triangulation: fan from the first point over the triangulated
/// facets that avoid it. Returns simplices as index lists into `points`.
pub fn pulling_triangulation(points: &[DVector<f64>]) -> Vec<Vec<usize>> {
    let k = points[0].len();
    if points.len() == k + 1 {
        return vec![(0..points.len()).collect()];
    }
    if k == 1 {
        // Two extreme points bound a segment.
        let (lo, hi) = (0..points.len()).fold((0, 0), |(lo, hi), i| {
            (if points[i][0] < points[lo][0] { i } else { lo }, if points[i][0] > points[hi][0] { i } else { hi })
        });
        return vec![vec![lo, hi]];
    }
    let mut out = Vec::new();
    for facet in facets(points) {
        if facet.vertices.contains(&0) {
            continue;
        }
        let sub: Vec<DVector<f64>> = facet.vertices.iter().map(|&i| points[i].clone()).collect();
        for simplex in pulling_triangulation(&intrinsic(&sub)) {
            let mut s = vec![0];
            s.extend(simplex.iter().map(|&j| facet.vertices[j]));
            out.push(s);
        }
    }
    out
}

/// Volume of the simplex on `points` from its Cayley–Menger determinant.
pub fn cayley_menger_volume(points: &[DVector<f64>]) -> f64 {
    let k = points.len() - 1;
    let n = k + 2;
    let mut b = DMatrix::zeros(n, n);
    for i in 1..n {
        b[(0, i)] = 1.0;
        b[(i, 0)] = 1.0;
        for j in 1..n {
            b[(i, j)] = (&points[i - 1] - &points[j - 1]).norm_squared();
        }
    }
    let fact: f64 = (1..=k).map(|x| x as f64).product();
    let sign = if (k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let v2 = sign * b.determinant() / (2f64.powi(k as i32) * fact * fact);
    v2.max(0.0).sqrt()
}
