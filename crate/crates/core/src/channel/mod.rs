//! Matrix representations of a group: regular, quantum superoperators and
//! classical stochastic permutations.
//!
//! Superoperators act on row-major vectorized operators, so a unitary channel
//! `ρ ↦ UρU†` is the matrix `U ⊗ conj(U)`.

mod affine;

pub use affine::{gell_mann_affine, gell_mann_basis, super_decoherence, super_decoherence_kraus, tn_commutes, AffineBlocks, StochasticMatrix};

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::MixtureWeights;
use crate::error::{Error, Result};
use crate::group::{close_group, ClosedGroup, GeneratorSpec, GroupTable, Monomial, Realization};

pub type CMatrix = DMatrix<Complex64>;

const UNITARITY_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for affine ranks.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepKind {
    Regular,
    UnitarySuperoperator,
    ClassicalPermutation,
    Unistochastic,
}

impl fmt::Display for RepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RepKind::Regular => "regular",
            RepKind::UnitarySuperoperator => "unitary-superoperator",
            RepKind::ClassicalPermutation => "classical-permutation",
            RepKind::Unistochastic => "unistochastic",
        };
        f.write_str(s)
    }
}

/// One matrix per group element, indexed like the group table.
#[derive(Clone)]
pub struct Representation {
    group: Arc<GroupTable>,
    dim: usize,
    matrices: Vec<CMatrix>,
    kind: RepKind,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representation")
            .field("order", &self.order())
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .finish()
    }
}

impl Representation {
    /// Validates `R₀ = 1` and `‖R(ab) − R(a)R(b)‖_F ≤ 1e−12·d` for all pairs.
    pub fn new(group: Arc<GroupTable>, matrices: Vec<CMatrix>, kind: RepKind) -> Result<Self> {
        let g = group.order();
        if matrices.len() != g {
            return Err(Error::LengthMismatch { expected: g, got: matrices.len() });
        }
        let dim = matrices[0].nrows();
        if matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::ShapeMismatch("representation matrices differ in shape".into()));
        }
        let tol = 1e-12 * dim as f64;
        let id_dev = (&matrices[0] - CMatrix::identity(dim, dim)).norm();
        if id_dev > tol {
            return Err(Error::HomomorphismViolation { a: 0, b: 0, deviation: id_dev });
        }
        let monomial: Option<Vec<SparseMonomial>> = matrices.iter().map(SparseMonomial::from_dense).collect();
        for a in 0..g {
            for b in 0..g {
                let ab = group.mul(a, b);
                let deviation = match &monomial {
                    Some(s) => s[a].compose(&s[b]).distance(&s[ab]),
                    None => (&matrices[a] * &matrices[b] - &matrices[ab]).norm(),
                };
                if !(deviation <= tol) {
                    return Err(Error::HomomorphismViolation { a, b, deviation });
                }
            }
        }
        Ok(Representation { group, dim, matrices, kind })
    }

    /// The g×g regular representation `R_α e_β = e_{αβ}`.
    pub fn regular(group: Arc<GroupTable>) -> Self {
        let g = group.order();
        let matrices = (0..g)
            .map(|alpha| {
                let mut m = CMatrix::zeros(g, g);
                for (beta, &img) in group.regular_column_images(alpha).iter().enumerate() {
                    m[(img, beta)] = Complex64::new(1.0, 0.0);
                }
                m
            })
            .collect();
        Representation { group, dim: g, matrices, kind: RepKind::Regular }
    }

    /// Closes `generators` and realizes the resulting group.
    pub fn from_specs(generators: &[GeneratorSpec], realization: Realization) -> Result<Self> {
        realize(&close_group(generators)?, realization)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<GroupTable> {
        Arc::clone(&self.group)
    }

    pub fn order(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, mu: usize) -> &CMatrix {
        &self.matrices[mu]
    }

    /// True when every matrix has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.matrices.iter().all(|m| m.iter().all(|z| z.im == 0.0))
    }

    /// `Σ p_μ R_μ`.
    pub fn mixture(&self, p: &MixtureWeights) -> Result<CMatrix> {
        self.mixture_raw(p.as_slice())
    }

    pub(crate) fn mixture_raw(&self, p: &[f64]) -> Result<CMatrix> {
        if p.len() != self.order() {
            return Err(Error::LengthMismatch { expected: self.order(), got: p.len() });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (m, &w) in self.matrices.iter().zip(p) {
            if w != 0.0 {
                out.zip_apply(m, |o, x| *o += x * w);
            }
        }
        Ok(out)
    }

    /// Uniform average `Φ* = (1/g) Σ R_μ`.
    pub fn uniform_mixture(&self) -> CMatrix {
        self.mixture_raw(&vec![1.0 / self.order() as f64; self.order()]).expect("length matches")
    }

    /// Rank of `{vec(R_μ) − vec(R₀)}`, i.e. the dimension of the polytope.
    pub fn affine_dimension(&self) -> usize {
        affine_rank(&self.difference_matrix())
    }

    /// Columns `realvec(R_μ − R₀)` for `μ ≥ 1`.
    pub(crate) fn difference_matrix(&self) -> DMatrix<f64> {
        let g = self.order();
        let rows = 2 * self.dim * self.dim;
        let r0 = real_vec(&self.matrices[0]);
        let mut a = DMatrix::zeros(rows, g.saturating_sub(1));
        for mu in 1..g {
            a.set_column(mu - 1, &(real_vec(&self.matrices[mu]) - &r0));
        }
        a
    }

    /// Eigenvalues of `Σ p_μ R_μ`.
    pub fn mixture_spectrum(&self, p: &MixtureWeights) -> Result<Vec<Complex64>> {
        Ok(eigenvalues(&self.mixture(p)?))
    }

    /// Hilbert–Schmidt distance table `D(R_μ, R_ν)`.
    pub fn distance_table(&self) -> Vec<Vec<f64>> {
        let g = self.order();
        (0..g)
            .map(|a| (0..g).map(|b| hs_distance(&self.matrices[a], &self.matrices[b]).expect("same shape")).collect())
            .collect()
    }
}

/// Monomial matrix stored column-wise: column j has `value[j]` at row `row[j]`.
struct SparseMonomial {
    row: Vec<usize>,
    value: Vec<Complex64>,
}

impl SparseMonomial {
    fn from_dense(m: &CMatrix) -> Option<Self> {
        let mut row = Vec::with_capacity(m.ncols());
        let mut value = Vec::with_capacity(m.ncols());
        for j in 0..m.ncols() {
            let mut hit = None;
            for i in 0..m.nrows() {
                if m[(i, j)] != Complex64::new(0.0, 0.0) {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some(i);
                }
            }
            let i = hit?;
            row.push(i);
            value.push(m[(i, j)]);
        }
        Some(SparseMonomial { row, value })
    }

    fn compose(&self, rhs: &SparseMonomial) -> SparseMonomial {
        let row = rhs.row.iter().map(|&k| self.row[k]).collect();
        let value = rhs.row.iter().zip(&rhs.value).map(|(&k, &v)| self.value[k] * v).collect();
        SparseMonomial { row, value }
    }

    fn distance(&self, other: &SparseMonomial) -> f64 {
        let mut sq = 0.0;
        for j in 0..self.row.len() {
            if self.row[j] == other.row[j] {
                sq += (self.value[j] - other.value[j]).norm_sqr();
            } else {
                sq += self.value[j].norm_sqr() + other.value[j].norm_sqr();
            }
        }
        sq.sqrt()
    }
}

/// Realizes each closed element as a matrix of the requested kind.
pub fn realize(closed: &ClosedGroup, realization: Realization) -> Result<Representation> {
    let group = Arc::new(closed.table.clone());
    let (kind, matrices): (RepKind, Vec<CMatrix>) = match realization {
        Realization::Regular => return Ok(Representation::regular(group)),
        Realization::Quantum => (
            RepKind::UnitarySuperoperator,
            closed.elements.iter().map(|m| unitary_superoperator(&m.unitary())).collect::<Result<_>>()?,
        ),
        Realization::Classical => {
            if let Some(m) = closed.elements.iter().find(|m| m.has_phases()) {
                return Err(Error::InvalidSpec(format!(
                    "classical realization needs permutations, element {:?} carries phases",
                    m.phases
                )));
            }
            (RepKind::ClassicalPermutation, closed.elements.iter().map(|m| to_complex(&m.permutation_matrix())).collect())
        }
        Realization::Unistochastic => (
            RepKind::Unistochastic,
            closed.elements.iter().map(|m| to_complex(&unistochastic(m))).collect(),
        ),
    };
    Representation::new(group, matrices, kind)
}

fn unistochastic(m: &Monomial) -> DMatrix<f64> {
    // |U_ij|² of a monomial is its permutation pattern.
    m.permutation_matrix()
}

pub fn regular_representation(table: &GroupTable) -> Representation {
    Representation::regular(Arc::new(table.clone()))
}

/// `U ⊗ conj(U)` after checking `‖U†U − 1‖_F ≤ 1e−10`.
pub fn unitary_superoperator(u: &CMatrix) -> Result<CMatrix> {
    if !u.is_square() {
        return Err(Error::ShapeMismatch(format!("{}×{} is not square", u.nrows(), u.ncols())));
    }
    let deviation = (u.adjoint() * u - CMatrix::identity(u.nrows(), u.nrows())).norm();
    if !(deviation <= UNITARITY_TOL) {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(u.kronecker(&u.conjugate()))
}

/// Squared Frobenius distance `‖A − B‖²_F`.
pub fn hs_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok((a - b).norm_squared())
}

/// Checks `K_ij ≥ 0` off the diagonal and zero column sums, within 1e−12.
pub fn kolmogorov_check(k: &DMatrix<f64>) -> bool {
    const TOL: f64 = 1e-12;
    if !k.is_square() {
        return false;
    }
    let n = k.nrows();
    let off_ok = (0..n).all(|i| (0..n).all(|j| i == j || k[(i, j)] >= -TOL));
    off_ok && k.column_iter().all(|c| c.sum().abs() <= TOL)
}

/// Eigenvalues from [`schur`]; empty if it does not converge.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    match schur(m) {
        Some((_, t)) => t.diagonal().iter().copied().collect(),
        None => Vec::new(),
    }
}

/// `M = Q T Qᴴ` with `T` upper triangular. The QR iteration is capped: highly
/// structured inputs (e.g. `a·1 + b·J`) can stall it, in which case it is
/// rerun on `VᴴMV` for a fixed dense unitary `V`.
pub fn schur(m: &CMatrix) -> Option<(CMatrix, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Some((CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)));
    }
    let max_iter = 100 * n.max(10);
    if let Some(s) = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, max_iter) {
        return Some(s.unpack());
    }
    (1..=3).find_map(|k| {
        let v = scrambler(n, k);
        let s = nalgebra::linalg::Schur::try_new(v.adjoint() * m * &v, f64::EPSILON, max_iter)?;
        let (q, t) = s.unpack();
        Some((v * q, t))
    })
}

/// Unitary factor of a deterministic dense matrix; `k` picks the variant.
fn scrambler(n: usize, k: usize) -> CMatrix {
    const GOLDEN: f64 = 0.618_033_988_749_895;
    let a = CMatrix::from_fn(n, n, |i, j| {
        let x = GOLDEN * ((i * n + j + 1) * k) as f64;
        Complex64::from_polar(1.0, std::f64::consts::TAU * x.fract()) + if i == j { Complex64::new(n as f64, 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    a.qr().q()
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Row-major real parts followed by row-major imaginary parts.
pub(crate) fn real_vec(m: &CMatrix) -> DVector<f64> {
    let (r, c) = m.shape();
    let n = r * c;
    let mut v = DVector::zeros(2 * n);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            v[i * c + j] = z.re;
            v[n + i * c + j] = z.im;
        }
    }
    v
}

pub(crate) fn from_real_vec(v: &DVector<f64>, rows: usize, cols: usize) -> CMatrix {
    let n = rows * cols;
    CMatrix::from_fn(rows, cols, |i, j| Complex64::new(v[i * cols + j], v[n + i * cols + j]))
}

/// Orthonormal coordinates on the affine hull of a representation's matrices,
/// with `R₀` at the origin.
#[derive(Clone, Debug)]
pub struct AffineFrame {
    origin: DVector<f64>,
    basis: DMatrix<f64>,
    rows: usize,
    cols: usize,
}

impl AffineFrame {
    pub fn new(rep: &Representation) -> Self {
        let a = rep.difference_matrix();
        let origin = real_vec(rep.matrix(0));
        let d = rep.dim();
        if a.ncols() == 0 {
            return AffineFrame { basis: DMatrix::zeros(origin.len(), 0), origin, rows: d, cols: d };
        }
        let svd = a.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let smax = svd.singular_values.max();
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| smax > 0.0 && svd.singular_values[i] > RANK_TOL * smax)
            .collect();
        let basis = DMatrix::from_fn(u.nrows(), keep.len(), |i, j| u[(i, keep[j])]);
        AffineFrame { origin, basis, rows: d, cols: d }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates of the orthogonal projection of `m` onto the hull.
    pub fn coords(&self, m: &CMatrix) -> DVector<f64> {
        self.basis.tr_mul(&(real_vec(m) - &self.origin))
    }

    /// Frobenius distance from `m` to the affine hull.
    pub fn distance(&self, m: &CMatrix) -> f64 {
        let v = real_vec(m) - &self.origin;
        let proj = &self.basis * self.basis.tr_mul(&v);
        (v - proj).norm()
    }

    /// The matrix with coordinates `x`.
    pub fn point(&self, x: &DVector<f64>) -> CMatrix {
        from_real_vec(&(&self.origin + &self.basis * x), self.rows, self.cols)
    }
}

/// Numerical rank with singular values above `RANK_TOL·σ_max`.
pub(crate) fn affine_rank(a: &DMatrix<f64>) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Phase;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(phases: &[(i64, i64)]) -> GeneratorSpec {
        GeneratorSpec::diagonal(phases).unwrap()
    }

    #[test]
    fn schur_of_structured_matrices() {
        // `s·1 + (1−s)·J/4` stalls the uncapped QR iteration for small s.
        for s in [0.5, 0.01, 0.001] {
            let m = CMatrix::from_fn(4, 4, |i, j| Complex64::new((1.0 - s) / 4.0 + if i == j { s } else { 0.0 }, 0.0));
            let (q, t) = schur(&m).unwrap();
            assert!((&q * &t * q.adjoint() - &m).norm() < 1e-12);
            assert!((q.adjoint() * &q - CMatrix::identity(4, 4)).norm() < 1e-12);
            assert!((0..4).all(|i| (0..i).all(|j| t[(i, j)].norm() < 1e-12)));
        }
    }

    #[test]
    fn superoperator_of_sign_flip() {
        let u = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        let s = unitary_superoperator(&u).unwrap();
        let expect = [1.0, -1.0, -1.0, 1.0];
        assert_eq!(s, CMatrix::from_diagonal(&DVector::from_iterator(4, expect.iter().map(|&x| c(x, 0.0)))));
        assert_eq!(unitary_superoperator(&CMatrix::identity(2, 2)).unwrap(), CMatrix::identity(4, 4));
        let bad = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(unitary_superoperator(&bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn order_four_superoperator_has_no_minus_one() {
        let u = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), Phase::new(1, 4).unwrap().to_complex()]));
        let ev = eigenvalues(&unitary_superoperator(&u).unwrap());
        assert!(ev.iter().all(|z| (z - c(-1.0, 0.0)).norm() > 0.5));
        assert!(ev.iter().any(|z| (z - c(0.0, 1.0)).norm() < 1e-12));
        assert!(ev.iter().any(|z| (z - c(0.0, -1.0)).norm() < 1e-12));
    }

    #[test]
    fn regular_rep_of_z3_is_shift() {
        let rep = regular_representation(&GroupTable::cyclic(3).unwrap());
        let r1 = rep.matrix(1).map(|z| z.re);
        // Brute force from the table: column β has a one in row 1·β.
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(r1, expect);
    }

    #[test]
    fn regular_rep_is_trace_orthogonal() {
        let rep = regular_representation(&GroupTable::cyclic(4).unwrap());
        for a in 0..4 {
            for b in 0..4 {
                let tr = (rep.matrix(a) * rep.matrix(b).adjoint()).trace();
                assert_eq!(tr, c(if a == b { 4.0 } else { 0.0 }, 0.0));
            }
        }
    }

    #[test]
    fn weyl_three_superoperators_are_trace_orthogonal() {
        let rep = Representation::from_specs(&[GeneratorSpec::Weyl { n: 3 }], Realization::Quantum).unwrap();
        assert_eq!(rep.order(), 9);
        assert_eq!(rep.dim(), 9);
        for a in 0..9 {
            for b in 0..9 {
                let tr = (rep.matrix(a) * rep.matrix(b).adjoint()).trace();
                let expect = if a == b { 9.0 } else { 0.0 };
                assert!((tr - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn z2_qubit_realization() {
        let rep = Representation::from_specs(&[diag(&[(0, 1), (1, 2)])], Realization::Quantum).unwrap();
        assert_eq!((rep.order(), rep.dim()), (2, 4));
        let reg = Representation::from_specs(&[diag(&[(0, 1), (1, 2)])], Realization::Regular).unwrap();
        assert_eq!(reg.kind(), RepKind::Regular);
        assert_eq!(reg.dim(), 2);
    }

    #[test]
    fn mixtures() {
        let rep = regular_representation(&GroupTable::cyclic(2).unwrap());
        let u = rep.mixture(&MixtureWeights::uniform(2)).unwrap();
        assert_eq!(u, CMatrix::from_element(2, 2, c(0.5, 0.0)));
        assert_eq!(rep.mixture(&MixtureWeights::identity(2)).unwrap(), CMatrix::identity(2, 2));
        assert!(matches!(rep.mixture(&MixtureWeights::uniform(3)), Err(Error::LengthMismatch { .. })));
        let z3 = Representation::from_specs(&[GeneratorSpec::CyclicRotation { order: 3 }], Realization::Quantum).unwrap();
        let star = z3.uniform_mixture();
        assert!((&star * &star - &star).norm() < 1e-12);
    }

    #[test]
    fn z3_uniform_spectrum() {
        let rep = regular_representation(&GroupTable::cyclic(3).unwrap());
        let mut ev: Vec<f64> = rep.mixture_spectrum(&MixtureWeights::uniform(3)).unwrap().iter().map(|z| z.norm()).collect();
        ev.sort_by(f64::total_cmp);
        assert!(ev[0] < 1e-12 && ev[1] < 1e-12 && (ev[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_dimensions() {
        let dependent = Representation::from_specs(&[GeneratorSpec::CyclicRotation { order: 4 }], Realization::Quantum).unwrap();
        assert_eq!(dependent.affine_dimension(), 2);
        let (a, b, cc) = (dependent.matrix(0), dependent.matrix(1), dependent.matrix(2));
        let d = dependent.matrix(3);
        assert!((a + cc - b - d).norm() < 1e-12);
        let qutrit = Representation::from_specs(&[diag(&[(0, 1), (1, 2), (1, 4)])], Realization::Quantum).unwrap();
        assert_eq!(qutrit.affine_dimension(), 3);
        let trivial = Representation::from_specs(&[], Realization::Quantum).unwrap();
        assert_eq!(trivial.affine_dimension(), 0);
    }

    #[test]
    fn noncyclic_four_is_independent_in_every_realization() {
        let realizations = [
            vec![GeneratorSpec::Pauli { qubits: 1 }],
            vec![diag(&[(0, 1), (0, 1), (1, 2)]), diag(&[(0, 1), (1, 2), (0, 1)])],
            vec![diag(&[(0, 1), (1, 2), (1, 2), (0, 1)]), diag(&[(0, 1), (0, 1), (0, 1), (1, 2)])],
        ];
        for gens in realizations {
            let rep = Representation::from_specs(&gens, Realization::Quantum).unwrap();
            assert_eq!(rep.order(), 4);
            assert_eq!(rep.affine_dimension(), 3);
        }
        let reg = Representation::from_specs(&[GeneratorSpec::Pauli { qubits: 1 }], Realization::Regular).unwrap();
        assert_eq!(reg.affine_dimension(), 3);
    }

    /// `D(Φ₀,Φ₁) = 8r₊r₋ + 8i₊i₋ + 4(r₊+r₋)(i₊+i₋)` and `D(Φ₀,Φ₂) = 8(r₊+r₋)(i₊+i₋)`
    /// for a Z₄ unitary with spectrum counts (r₊, r₋, i₊, i₋) of (1, −1, i, −i).
    #[test]
    fn z4_distances_match_closed_forms() {
        for n in 1..=5usize {
            for rp in 0..=n {
                for rm in 0..=n - rp {
                    for ip in 0..=n - rp - rm {
                        let im = n - rp - rm - ip;
                        let mut phases = vec![(0i64, 4i64); rp];
                        phases.extend(vec![(2, 4); rm]);
                        phases.extend(vec![(1, 4); ip]);
                        phases.extend(vec![(3, 4); im]);
                        let u = Monomial {
                            perm: (0..n).collect(),
                            phases: phases.iter().map(|&(a, b)| Phase::new(a, b).unwrap()).collect(),
                        };
                        let s1 = unitary_superoperator(&u.unitary()).unwrap();
                        let s2 = &s1 * &s1;
                        let id = CMatrix::identity(n * n, n * n);
                        let (rp, rm, ip, im) = (rp as f64, rm as f64, ip as f64, im as f64);
                        let d1 = 8.0 * rp * rm + 8.0 * ip * im + 4.0 * (rp + rm) * (ip + im);
                        let d2 = 8.0 * (rp + rm) * (ip + im);
                        assert!((hs_distance(&id, &s1).unwrap() - d1).abs() < 1e-9);
                        assert!((hs_distance(&id, &s2).unwrap() - d2).abs() < 1e-9);
                        // Unitary-channel identity ‖A−B‖² = 2N² − 2Re Tr(AB†).
                        let tr = (&id * s1.adjoint()).trace().re;
                        assert!((hs_distance(&id, &s1).unwrap() - (2.0 * (n * n) as f64 - 2.0 * tr)).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn z4_distance_examples() {
        let qutrit = Representation::from_specs(&[diag(&[(0, 1), (1, 2), (1, 4)])], Realization::Quantum).unwrap();
        let d = qutrit.distance_table();
        assert!((d[0][1] - 16.0).abs() < 1e-9);
        let sq = qutrit.group().mul(1, 1);
        assert!((d[0][sq] - 16.0).abs() < 1e-9);
        let four = Representation::from_specs(&[diag(&[(0, 1), (0, 1), (1, 4), (3, 4)])], Realization::Quantum).unwrap();
        let d = four.distance_table();
        let sq = four.group().mul(1, 1);
        assert!((d[0][1] / d[0][sq] - 0.75).abs() < 1e-12);
        assert!((d[0][1] - 24.0).abs() < 1e-9);
        assert!(matches!(hs_distance(&CMatrix::zeros(2, 2), &CMatrix::zeros(3, 3)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn kolmogorov() {
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(kolmogorov_check(&(p - DMatrix::identity(3, 3))));
        assert!(kolmogorov_check(&DMatrix::zeros(3, 3)));
        let bad = DMatrix::from_row_slice(2, 2, &[0.1, -0.1, -0.1, 0.1]);
        assert!(!kolmogorov_check(&bad));
    }

    #[test]
    fn classical_realization_rejects_phases() {
        let err = Representation::from_specs(&[diag(&[(0, 1), (1, 2)])], Realization::Classical).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
    }

    #[test]
    fn broken_homomorphism_is_reported() {
        let group = Arc::new(GroupTable::cyclic(2).unwrap());
        let flip = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let err = Representation::new(group, vec![CMatrix::identity(2, 2), flip], RepKind::Regular).unwrap_err();
        assert!(matches!(err, Error::HomomorphismViolation { .. }));
    }
}
