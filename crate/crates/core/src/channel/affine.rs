//! Gell-Mann affine blocks and the super-decoherence map.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Hermitian basis with `Tr(B_α B_β) = δ_{αβ}`.
///
/// Order: `1/√N`, the N−1 diagonal generators, the symmetric off-diagonal
/// elements for `i < j`, then the antisymmetric ones, both lexicographic.
pub fn gell_mann_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    let one = Complex64::new(1.0, 0.0);
    basis.push(CMatrix::identity(n, n) / Complex64::new((n as f64).sqrt(), 0.0));
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut b = CMatrix::zeros(n, n);
        for k in 0..l {
            b[(k, k)] = one / norm;
        }
        b[(l, l)] = Complex64::new(-(l as f64) / norm, 0.0);
        basis.push(b);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            let mut b = CMatrix::zeros(n, n);
            b[(i, j)] = Complex64::new(s, 0.0);
            b[(j, i)] = Complex64::new(s, 0.0);
            basis.push(b);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut b = CMatrix::zeros(n, n);
            b[(i, j)] = Complex64::new(0.0, -s);
            b[(j, i)] = Complex64::new(0.0, s);
            basis.push(b);
        }
    }
    basis
}

/// Column α is the row-major vectorization of `B_α`.
fn basis_change(n: usize) -> CMatrix {
    let basis = gell_mann_basis(n);
    let mut v = CMatrix::zeros(n * n, n * n);
    for (alpha, b) in basis.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                v[(i * n + j, alpha)] = b[(i, j)];
            }
        }
    }
    v
}

/// Blocks of the real matrix `M_{αβ} = Tr(B_α Φ(B_β))`:
///
/// ```text
/// M = | 1   0   0  |
///     | k   D   Q  |
///     | k'  Q'  D' |
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct AffineBlocks {
    pub n: usize,
    pub k: Vec<f64>,
    pub k_prime: Vec<f64>,
    pub d: DMatrix<f64>,
    pub d_prime: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub q_prime: DMatrix<f64>,
}

pub fn gell_mann_affine(superop: &CMatrix) -> Result<AffineBlocks> {
    let nn = superop.nrows();
    let n = (nn as f64).sqrt().round() as usize;
    if !superop.is_square() || n * n != nn || n == 0 {
        return Err(Error::NotSuperoperator(nn));
    }
    let v = basis_change(n);
    let m = v.adjoint() * superop * &v;
    let first_row_dev = (0..nn)
        .map(|b| (m[(0, b)] - Complex64::new(if b == 0 { 1.0 } else { 0.0 }, 0.0)).norm())
        .fold(0.0, f64::max);
    if !(first_row_dev <= 1e-10) {
        return Err(Error::NotTracePreserving { deviation: first_row_dev });
    }
    let m = m.map(|z| z.re);
    let (lo, hi) = (1..n, n..nn);
    let block = |r: std::ops::Range<usize>, c: std::ops::Range<usize>| {
        DMatrix::from_fn(r.len(), c.len(), |i, j| m[(r.start + i, c.start + j)])
    };
    Ok(AffineBlocks {
        n,
        k: lo.clone().map(|i| m[(i, 0)]).collect(),
        k_prime: hi.clone().map(|i| m[(i, 0)]).collect(),
        d: block(lo.clone(), lo.clone()),
        d_prime: block(hi.clone(), hi.clone()),
        q: block(lo.clone(), hi.clone()),
        q_prime: block(hi, lo),
    })
}

impl AffineBlocks {
    /// The full real matrix M in the Gell-Mann basis.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let nn = n * n;
        let mut m = DMatrix::zeros(nn, nn);
        m[(0, 0)] = 1.0;
        for (i, &x) in self.k.iter().enumerate() {
            m[(1 + i, 0)] = x;
        }
        for (i, &x) in self.k_prime.iter().enumerate() {
            m[(n + i, 0)] = x;
        }
        m.view_mut((1, 1), (n - 1, n - 1)).copy_from(&self.d);
        m.view_mut((1, n), (n - 1, nn - n)).copy_from(&self.q);
        m.view_mut((n, 1), (nn - n, n - 1)).copy_from(&self.q_prime);
        m.view_mut((n, n), (nn - n, nn - n)).copy_from(&self.d_prime);
        m
    }

    /// Back to the superoperator in the standard basis.
    pub fn reassemble(&self) -> CMatrix {
        let v = basis_change(self.n);
        &v * super::to_complex(&self.matrix()) * v.adjoint()
    }
}

/// Column-stochastic matrix: `p' = T p`.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix(DMatrix<f64>);

impl StochasticMatrix {
    /// Entries ≥ −1e−14 and column sums 1 within 1e−12.
    pub fn new(t: DMatrix<f64>) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::ShapeMismatch("stochastic matrix must be square".into()));
        }
        if t.iter().any(|&x| !(x >= -1e-14)) {
            return Err(Error::InvalidArgument("negative entry in stochastic matrix".into()));
        }
        if let Some(s) = t.column_iter().map(|c| c.sum()).find(|s| (s - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidArgument(format!("column sums to {s}")));
        }
        Ok(StochasticMatrix(t))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn is_bistochastic(&self) -> bool {
        self.0.row_iter().all(|r| (r.sum() - 1.0).abs() <= 1e-12)
    }
}

/// `T_ij = ⟨i|E(|j⟩⟨j|)|i⟩` read off the superoperator.
pub fn super_decoherence(superop: &CMatrix) -> Result<StochasticMatrix> {
    let nn = superop.nrows();
    let n = (nn as f64).sqrt().round() as usize;
    if !superop.is_square() || n * n != nn {
        return Err(Error::NotSuperoperator(nn));
    }
    StochasticMatrix::new(DMatrix::from_fn(n, n, |i, j| superop[(i * n + i, j * n + j)].re))
}

/// `T = Σ_a K_a ⊙ conj(K_a)`.
pub fn super_decoherence_kraus(kraus: &[CMatrix]) -> Result<StochasticMatrix> {
    let Some(first) = kraus.first() else {
        return Err(Error::InvalidArgument("empty Kraus list".into()));
    };
    let shape = first.shape();
    let mut t = DMatrix::zeros(shape.0, shape.1);
    for k in kraus {
        if k.shape() != shape {
            return Err(Error::ShapeMismatch("Kraus operators differ in shape".into()));
        }
        t += k.map(|z| z.norm_sqr());
    }
    StochasticMatrix::new(t)
}

/// Whether `T(E)^n = T(E^n)` for all `n ≤ r`, via the block conditions
/// `Q D'^{n−2} k' = 0` and `Q D'^{n−2} Q' = 0`.
pub fn tn_commutes(blocks: &AffineBlocks, r: usize) -> bool {
    const TOL: f64 = 1e-10;
    if blocks.n < 2 {
        return true;
    }
    let kp = nalgebra::DVector::from_column_slice(&blocks.k_prime);
    let mut left = blocks.q.clone();
    for n in 2..=r {
        if n > 2 {
            left = &left * &blocks.d_prime;
        }
        let a = (&left * &kp).amax();
        let b = (&left * &blocks.q_prime).amax();
        if a > TOL || b > TOL {
            return false;
        }
    }
    true
}
