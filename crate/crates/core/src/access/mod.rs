//! Accessibility of maps in a group polytope.
//!
//! A map `M` is accessible when `M = e^{L}` with `L` a nonnegative
//! combination of `R_μ − 1`. The test takes the principal logarithm and fits
//! it to that cone by nonnegative least squares. When that fails, other
//! primary logarithms (windings `2πik` on the non-real eigenvalue clusters,
//! `|k| ≤ MAX_WINDING`) are tried, and a candidate is accepted only if the
//! fitted generator exponentiates back to `M`. Limits of accessible
//! trajectories (uniform mixtures over a subgroup, which are singular) are
//! classified accessible, so the decided set is the closure.

mod logm;
mod nnls;

pub use logm::{principal_log, schur_log, SchurLog};
pub use nnls::nnls;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{real_vec, regular_representation, AffineFrame, CMatrix, Representation};
use crate::dynamics::{weights, MixtureWeights, RateSchedule};
use crate::error::{Error, Result};
use crate::group::GroupTable;

pub const DEFAULT_TOL: f64 = 1e-8;
/// Rates above `−RATE_TOL` are accepted and clamped to zero.
pub const RATE_TOL: f64 = 1e-10;
const HULL_TOL: f64 = 1e-8;
/// Largest winding number tried on each conjugate pair of eigenvalue clusters.
pub const MAX_WINDING: i32 = 2;
/// Branch combinations tried before giving up.
const MAX_BRANCHES: usize = 625;
/// Multiple of `ε‖M‖/|λ_min|` added to the residual threshold.
const LOG_NOISE: f64 = 1e3;
/// `‖e^{L} − M‖_F ≤ CERT_TOL·‖M‖_F` certifies a non-principal fit.
const CERT_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessVerdict {
    pub accessible: bool,
    pub residual: f64,
    /// Recovered `t·q_μ` (entry 0 is 0); absent when no logarithm was fitted.
    pub rates: Option<Vec<f64>>,
    pub det_sign: i8,
    /// The principal logarithm exists, is real for a real representation,
    /// and is the logarithm the reported fit came from.
    pub log_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeFit {
    pub rates: Vec<f64>,
    pub residual: f64,
}

/// Thin QR of the cone generators `realvec(R_μ − 1)`, `μ ≥ 1`.
#[derive(Clone, Debug)]
struct ConeFitter {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    full_rank: bool,
}

impl ConeFitter {
    fn new(rep: &Representation) -> Self {
        let a = rep.difference_matrix();
        let (m, k) = a.shape();
        if k == 0 {
            return ConeFitter { q: DMatrix::zeros(m, 0), r: DMatrix::zeros(0, 0), full_rank: true };
        }
        if m < k {
            return ConeFitter { q: DMatrix::identity(m, m), r: a, full_rank: false };
        }
        let qr = a.qr();
        let (q, r) = (qr.q(), qr.r());
        let dmax = r.diagonal().amax();
        let full_rank = (0..k).all(|i| r[(i, i)].abs() > 1e-10 * dmax);
        ConeFitter { q, r, full_rank }
    }

    fn fit(&self, l: &CMatrix) -> ConeFit {
        let b = real_vec(l);
        let c = self.q.tr_mul(&b);
        let outside = (&b - &self.q * &c).norm_squared();
        let x = self
            .full_rank
            .then(|| self.r.solve_upper_triangular(&c))
            .flatten()
            .filter(|x| x.iter().all(|&v| v >= 0.0))
            .unwrap_or_else(|| nnls(&self.r, &c));
        let inside = (&c - &self.r * &x).norm_squared();
        let mut rates = Vec::with_capacity(x.len() + 1);
        rates.push(0.0);
        rates.extend(x.iter().copied());
        ConeFit { rates, residual: (outside + inside).sqrt() }
    }
}

/// Reusable accessibility test for one representation.
pub struct Classifier {
    rep: Representation,
    tol: f64,
    fitter: ConeFitter,
    frame: AffineFrame,
    real: bool,
    branch_search: bool,
    projectors: OnceLock<Vec<CMatrix>>,
    sector: OnceLock<f64>,
}

impl Classifier {
    pub fn new(rep: Representation, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let fitter = ConeFitter::new(&rep);
        let frame = AffineFrame::new(&rep);
        let real = rep.is_real();
        Ok(Classifier { rep, tol, fitter, frame, real, branch_search: true, projectors: OnceLock::new(), sector: OnceLock::new() })
    }

    /// Restricts the test to the principal logarithm.
    pub fn principal_only(mut self) -> Self {
        self.branch_search = false;
        self
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Checks that `m` lies in the affine hull, then classifies it.
    pub fn classify_map(&self, m: &CMatrix) -> Result<AccessVerdict> {
        let d = self.rep.dim();
        if m.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!("expected {d}×{d}, got {}×{}", m.nrows(), m.ncols())));
        }
        let distance = self.frame.distance(m);
        if !(distance <= HULL_TOL * m.norm().max(1.0)) {
            return Err(Error::NotInAffineHull { distance });
        }
        Ok(self.classify_unchecked(m))
    }

    pub fn classify_weights(&self, p: &MixtureWeights) -> Result<AccessVerdict> {
        Ok(self.classify_unchecked(&self.rep.mixture(p)?))
    }

    pub(crate) fn classify_unchecked(&self, m: &CMatrix) -> AccessVerdict {
        let s = schur_log(m);
        // Rounding in the log grows like ε‖M‖/|λ_min|; near-singular maps
        // get that much extra room on top of the requested tolerance.
        let lambda_min = s.eigenvalues.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let noise = LOG_NOISE * f64::EPSILON * m.norm() / lambda_min.max(f64::MIN_POSITIVE);
        let threshold = self.tol * self.rep.dim() as f64 + noise;
        let det_sign = s.det_sign();
        let log = match s.log {
            Ok(log) if det_sign > 0 => log,
            _ => {
                // Without a logarithm the only accessible points are the limits Φ*_H.
                let residual = self.projector_distance(m);
                let accessible = residual <= threshold;
                return AccessVerdict { accessible, residual, rates: None, det_sign, log_ok: false };
            }
        };
        let log_ok = !self.real || log.iter().map(|z| z.im.abs()).fold(0.0, f64::max) <= 1e-8 * log.norm().max(1.0) + noise;
        let fit = self.fitter.fit(&log);
        let accessible = log_ok && self.admissible(&fit, threshold);
        if !accessible && self.branch_search {
            if let Some(alt) = self.search_branches(m, &log, threshold) {
                let rates = alt.rates.iter().map(|r| r.max(0.0)).collect();
                return AccessVerdict { accessible: true, residual: alt.residual, rates: Some(rates), det_sign, log_ok: false };
            }
        }
        let rates = fit.rates.iter().map(|r| r.max(0.0)).collect();
        AccessVerdict { accessible, residual: fit.residual, rates: Some(rates), det_sign, log_ok }
    }

    fn admissible(&self, fit: &ConeFit, threshold: f64) -> bool {
        fit.residual <= threshold && fit.rates.iter().all(|&r| r >= -RATE_TOL)
    }

    /// Fits `log + 2πi Σ k_j (P_j − P̄_j)` over winding vectors `k`, where
    /// `P_j`, `P̄_j` project onto a cluster of eigenvalues with positive
    /// imaginary part and onto its conjugate.
    fn search_branches(&self, m: &CMatrix, log: &CMatrix, threshold: f64) -> Option<ConeFit> {
        // Eigenspaces are taken from the log: small eigenvalues of `m` sit too
        // close together for well-conditioned covariants.
        let clusters = cluster(&crate::channel::eigenvalues(log));
        let upper: Vec<usize> = (0..clusters.len()).filter(|&j| clusters[j].im > 0.0).collect();
        let kappa = self.sector();
        let slack = 1e-9 * log.norm().max(1.0);
        // Eigenvalues of any cone element satisfy |Im| ≤ κ·|Re|.
        let windings: Vec<Vec<i32>> = upper
            .iter()
            .map(|&j| {
                let z = clusters[j];
                (-MAX_WINDING..=MAX_WINDING)
                    .filter(|&k| (z.im + std::f64::consts::TAU * k as f64).abs() <= kappa * z.re.abs() + slack)
                    .collect()
            })
            .collect();
        if windings.iter().any(Vec::is_empty) || windings.iter().all(|w| w.iter().all(|&k| k == 0)) {
            return None;
        }
        let combos = windings.iter().try_fold(1usize, |acc, w| acc.checked_mul(w.len())).filter(|&c| c <= MAX_BRANCHES)?;
        let projectors = spectral_projectors(log, &clusters)?;
        // Each pair contributes 2πi(P − P̄); without a conjugate cluster only P is shifted.
        let shifts: Vec<CMatrix> = upper
            .iter()
            .map(|&j| {
                let conj = clusters.iter().position(|c| (c - clusters[j].conj()).norm() <= cluster_tol(clusters[j]));
                let d = match conj {
                    Some(k) => &projectors[j] - &projectors[k],
                    None => projectors[j].clone(),
                };
                d * Complex64::new(0.0, std::f64::consts::TAU)
            })
            .collect();
        let scale = m.norm();
        let id = CMatrix::identity(m.nrows(), m.ncols());
        for code in 0..combos {
            let mut candidate = log.clone();
            let mut rest = code;
            let mut principal = true;
            for (shift, w) in shifts.iter().zip(&windings) {
                let k = w[rest % w.len()];
                rest /= w.len();
                if k != 0 {
                    principal = false;
                    candidate += shift * Complex64::new(k as f64, 0.0);
                }
            }
            if principal {
                continue;
            }
            let fit = self.fitter.fit(&candidate);
            if !self.admissible(&fit, threshold) {
                continue;
            }
            let mut l = CMatrix::zeros(m.nrows(), m.ncols());
            for (mu, &r) in fit.rates.iter().enumerate().skip(1) {
                if r > 0.0 {
                    l += (self.rep.matrix(mu) - &id) * Complex64::new(r, 0.0);
                }
            }
            if crate::dynamics::expm(&l).is_ok_and(|e| (e - m).norm() <= CERT_TOL * scale) {
                return Some(fit);
            }
        }
        None
    }

    /// `cot(π/n)` for the largest element order `n`: eigenphases of `R_μ`
    /// are `ord(μ)`-th roots of unity, so this bounds `|cot(θ/2)|` over them.
    fn sector(&self) -> f64 {
        *self.sector.get_or_init(|| {
            let n = self.rep.group().element_orders().iter().copied().max().unwrap_or(1);
            if n < 3 {
                0.0
            } else {
                1.0 / (std::f64::consts::PI / n as f64).tan()
            }
        })
    }

    /// Distance from `m` to the nearest `(1/|H|) Σ_{h∈H} R_h`, H a nontrivial subgroup.
    fn projector_distance(&self, m: &CMatrix) -> f64 {
        let projectors = self.projectors.get_or_init(|| {
            let Ok(subs) = self.rep.group().enumerate_subgroups() else {
                return vec![self.rep.uniform_mixture()];
            };
            subs.iter()
                .filter(|h| h.order > 1)
                .map(|h| {
                    let mut p = vec![0.0; self.rep.order()];
                    h.elements.iter().for_each(|&e| p[e] = 1.0 / h.order as f64);
                    self.rep.mixture_raw(&p).expect("length matches")
                })
                .collect()
        });
        projectors.iter().map(|p| (m - p).norm()).fold(f64::INFINITY, f64::min)
    }
}

fn cluster_tol(z: Complex64) -> f64 {
    1e-8 * z.norm().max(1.0)
}

/// Distinct eigenvalues up to `cluster_tol`; near-real values are snapped to the axis.
fn cluster(eigenvalues: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for &z in eigenvalues {
        let z = if z.im.abs() <= cluster_tol(z) { Complex64::new(z.re, 0.0) } else { z };
        if !out.iter().any(|c| (c - z).norm() <= cluster_tol(z)) {
            out.push(z);
        }
    }
    out
}

/// Frobenius covariants `Π_{i≠j} (M − c_i)/(c_j − c_i)`. They are the
/// spectral projectors when `M` is diagonalizable; `None` if they fail to
/// resolve the identity.
fn spectral_projectors(m: &CMatrix, clusters: &[Complex64]) -> Option<Vec<CMatrix>> {
    let n = m.nrows();
    let id = CMatrix::identity(n, n);
    let projectors: Vec<CMatrix> = (0..clusters.len())
        .map(|j| {
            let mut p = id.clone();
            for (i, &c) in clusters.iter().enumerate() {
                if i != j {
                    p = p * (m - &id * c) / (clusters[j] - c);
                }
            }
            p
        })
        .collect();
    let total: CMatrix = projectors.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
    ((total - id).norm() <= 1e-6 * (n as f64).sqrt()).then_some(projectors)
}

/// Least-squares fit of `L_target` by `Σ q_μ (R_μ − 1)` with `q ≥ 0`.
pub fn cone_fit(l_target: &CMatrix, rep: &Representation) -> Result<ConeFit> {
    let d = rep.dim();
    if l_target.shape() != (d, d) {
        return Err(Error::ShapeMismatch(format!("expected {d}×{d}, got {}×{}", l_target.nrows(), l_target.ncols())));
    }
    Ok(ConeFitter::new(rep).fit(l_target))
}

pub fn is_accessible_map(m: &CMatrix, rep: &Representation, tol: f64) -> Result<AccessVerdict> {
    Classifier::new(rep.clone(), tol)?.classify_map(m)
}

/// Tests `Σ p_μ R_μ` in the regular representation.
pub fn is_accessible_weights(table: &GroupTable, p: &MixtureWeights, tol: f64) -> Result<AccessVerdict> {
    Classifier::new(regular_representation(table), tol)?.classify_weights(p)
}

/// Orders of all subgroups of an abelian group.
pub fn accessible_ranks(table: &GroupTable) -> Result<BTreeSet<usize>> {
    if !table.is_abelian() {
        return Err(Error::NotAbelian);
    }
    Ok(table.enumerate_subgroups()?.distinct_orders())
}

/// `s·p + (1−s)·uniform`.
pub fn star_segment(p: &MixtureWeights, s: f64) -> Result<MixtureWeights> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("segment parameter {s} outside [0, 1]")));
    }
    let g = p.len() as f64;
    MixtureWeights::new(p.as_slice().iter().map(|x| s * x + (1.0 - s) / g).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    /// Elements carrying a nonzero rate.
    pub support: Vec<usize>,
    pub samples: Vec<(f64, MixtureWeights)>,
}

/// `w(t)` for rates uniform on each support pattern.
pub fn boundary_curves(table: &GroupTable, support_patterns: &[Vec<usize>], t_grid: &[f64]) -> Result<Vec<BoundaryCurve>> {
    support_patterns
        .iter()
        .map(|support| {
            let q = RateSchedule::on_support(table.order(), support, 0.0)?;
            let samples = crate::dynamics::weight_trajectory(table, &q, t_grid)?;
            Ok(BoundaryCurve { support: support.clone(), samples })
        })
        .collect()
}

/// Spectrum `{1, m, −m}` of `αP₂₃ + βP₁₃ + γP₁₂`, `m = |α + βω + γω̄|`.
pub fn odd_subspace_spectrum(alpha: f64, beta: f64, gamma: f64) -> Result<[Complex64; 3]> {
    if [alpha, beta, gamma].iter().any(|x| !(x.is_finite() && *x >= 0.0)) || (alpha + beta + gamma - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(format!("({alpha}, {beta}, {gamma}) is not a probability vector")));
    }
    let omega = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    let m = (alpha + beta * omega + gamma * omega.conj()).norm();
    Ok([Complex64::new(1.0, 0.0), Complex64::new(m, 0.0), Complex64::new(-m, 0.0)])
}

/// Weights `w(t)` for random rates, used by property tests and experiments.
pub fn random_trajectory_point<R: rand::Rng>(table: &GroupTable, t_max: f64, rng: &mut R) -> Result<(RateSchedule, MixtureWeights)> {
    let g = table.order();
    let mut q: Vec<f64> = (0..g).map(|_| rng.random::<f64>()).collect();
    q[0] = 0.0;
    let q = RateSchedule::normalized(q, rng.random::<f64>() * t_max)?;
    let w = weights(table, &q)?;
    Ok((q, w))
}
