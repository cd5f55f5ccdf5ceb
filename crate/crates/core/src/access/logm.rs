//! Principal matrix logarithm by Schur decomposition and inverse scaling and
//! squaring with a Gauss–Legendre Padé kernel.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::channel::CMatrix;
use crate::error::{Error, Result};

/// Eigenvalues below this fraction of `‖M‖_F` count as zero.
const SINGULAR_TOL: f64 = 1e-13;
/// `|Im λ| ≤ NEG_AXIS_TOL·|λ|` with `Re λ < 0` puts λ on the branch cut.
const NEG_AXIS_TOL: f64 = 1e-10;
/// Square roots are taken until `‖T − 1‖₁ ≤ PADE_RADIUS`.
const PADE_RADIUS: f64 = 0.25;
const PADE_NODES: usize = 8;
const MAX_ROOTS: u32 = 64;

/// Spectrum and (when it exists) principal logarithm of one matrix.
#[derive(Clone, Debug)]
pub struct SchurLog {
    pub eigenvalues: Vec<Complex64>,
    pub log: Result<CMatrix>,
}

impl SchurLog {
    /// Sign of the determinant: 0 for numerically singular input.
    pub fn det_sign(&self) -> i8 {
        if self.eigenvalues.is_empty() || matches!(self.log, Err(Error::SingularMatrix)) {
            return 0;
        }
        let arg: f64 = self.eigenvalues.iter().map(|z| z.arg()).sum();
        let c = arg.cos();
        if c > 0.0 {
            1
        } else if c < 0.0 {
            -1
        } else {
            0
        }
    }
}

/// Principal logarithm: eigenvalue imaginary parts of the result lie in `(−π, π]`.
pub fn principal_log(m: &CMatrix) -> Result<CMatrix> {
    schur_log(m).log
}

pub fn schur_log(m: &CMatrix) -> SchurLog {
    let n = m.nrows();
    if !m.is_square() {
        return SchurLog { eigenvalues: Vec::new(), log: Err(Error::ShapeMismatch("logarithm needs a square matrix".into())) };
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return SchurLog { eigenvalues: Vec::new(), log: Err(Error::NonFinite) };
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    if is_diagonal(m) {
        let eigenvalues: Vec<Complex64> = (0..n).map(|i| m[(i, i)]).collect();
        let log = check_spectrum(&eigenvalues, scale)
            .map(|()| CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, eigenvalues.iter().map(|z| z.ln()))));
        return SchurLog { eigenvalues, log };
    }
    let Some((q, t)) = crate::channel::schur(m) else {
        return SchurLog { eigenvalues: Vec::new(), log: Err(Error::NoConvergence) };
    };
    let eigenvalues: Vec<Complex64> = t.diagonal().iter().copied().collect();
    let log = check_spectrum(&eigenvalues, scale).map(|()| {
        let f = if strictly_upper_norm(&t) <= 1e-14 * t.norm() {
            CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, eigenvalues.iter().map(|z| z.ln())))
        } else {
            triangular_log(t)
        };
        &q * f * q.adjoint()
    });
    SchurLog { eigenvalues, log }
}

fn check_spectrum(eigenvalues: &[Complex64], scale: f64) -> Result<()> {
    if eigenvalues.iter().any(|z| z.norm() <= SINGULAR_TOL * scale) {
        return Err(Error::SingularMatrix);
    }
    if eigenvalues.iter().any(|z| z.re < 0.0 && z.im.abs() <= NEG_AXIS_TOL * z.norm()) {
        return Err(Error::NegativeRealEigenvalue);
    }
    Ok(())
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}

fn strictly_upper_norm(t: &CMatrix) -> f64 {
    let n = t.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..j {
            s += t[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn norm1(m: &CMatrix) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Principal square root of an upper triangular matrix with no eigenvalue on
/// the closed negative axis.
fn triangular_sqrt(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let mut r = CMatrix::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

fn triangular_log(mut t: CMatrix) -> CMatrix {
    let n = t.nrows();
    let id = CMatrix::identity(n, n);
    let mut roots = 0u32;
    while norm1(&(&t - &id)) > PADE_RADIUS && roots < MAX_ROOTS {
        t = triangular_sqrt(&t);
        roots += 1;
    }
    let x = &t - &id;
    let mut f = CMatrix::zeros(n, n);
    for &(node, weight) in gauss_legendre() {
        let denom = &id + &x * Complex64::new(node, 0.0);
        let term = denom.solve_upper_triangular(&x).expect("I + sX is nonsingular for ‖X‖ < 1");
        f += term * Complex64::new(weight, 0.0);
    }
    f * Complex64::new(2f64.powi(roots as i32), 0.0)
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let m = PADE_NODES;
        (0..m)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (p, d) = legendre(m, x);
                    dp = d;
                    let dx = p / d;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                let w = 2.0 / ((1.0 - x * x) * dp * dp);
                ((x + 1.0) / 2.0, w / 2.0)
            })
            .collect()
    })
}

/// `(P_m(x), P_m'(x))`.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, m as f64 * (x * p1 - p0) / (x * x - 1.0))
}
