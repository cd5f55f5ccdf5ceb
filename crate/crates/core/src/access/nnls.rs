//! Nonnegative least squares by the Lawson–Hanson active-set method.

use nalgebra::{DMatrix, DVector};

/// Stationarity tolerance on the scaled gradient.
const GRAD_TOL: f64 = 1e-12;
const SVD_EPS: f64 = 1e-13;

/// Minimizes `‖A x − b‖₂` subject to `x ≥ 0`. Ties among entering indices go
/// to the lowest index.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    if n == 0 {
        return x;
    }
    let scale = a.norm() * b.norm().max(1.0);
    let tol = GRAD_TOL * scale.max(1.0);
    let mut passive = vec![false; n];
    let mut blocked = vec![false; n];
    for _ in 0..3 * n + 10 {
        let w = a.tr_mul(&(b - a * &x));
        let mut best: Option<usize> = None;
        for j in 0..n {
            if !passive[j] && !blocked[j] && w[j] > tol && best.is_none_or(|k| w[j] > w[k]) {
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        passive[j] = true;
        let before = x.clone();
        loop {
            let z = restricted_lstsq(a, b, &passive);
            let bad: Vec<usize> = (0..n).filter(|&i| passive[i] && z[i] <= 0.0).collect();
            if bad.is_empty() {
                x = z;
                break;
            }
            let alpha = bad
                .iter()
                .map(|&i| if x[i] - z[i] > 0.0 { x[i] / (x[i] - z[i]) } else { 0.0 })
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= 0.0 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
        // An index that cannot enter without leaving again is degenerate.
        if x == before {
            blocked[j] = true;
        } else {
            blocked.iter_mut().for_each(|b| *b = false);
        }
    }
    x
}

fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let sub = a.select_columns(&cols);
    let svd = sub.svd(true, true);
    let eps = SVD_EPS * svd.singular_values.max().max(f64::MIN_POSITIVE);
    let zs = svd.solve(b, eps).expect("both factors computed");
    let mut z = DVector::zeros(passive.len());
    for (k, &j) in cols.iter().enumerate() {
        z[j] = zs[k];
    }
    z
}
