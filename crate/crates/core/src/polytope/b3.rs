//! Two-dimensional views of the Birkhoff polytope `B₃`.
//!
//! `B₃ − J/3` splits into two orthogonal planes: the one spanned by the even
//! permutations (a triangle through the identity and the two 3-cycles) and
//! the one spanned by the transpositions.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::access::{AccessVerdict, Classifier};
use crate::channel::{to_complex, Representation};
use crate::error::{Error, Result};
use crate::group::{GeneratorSpec, Realization};

const STOCHASTIC_TOL: f64 = 1e-9;
const VERTEX_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionPlane {
    Even,
    Odd,
}

impl std::str::FromStr for SectionPlane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(SectionPlane::Even),
            "odd" => Ok(SectionPlane::Odd),
            _ => Err(Error::InvalidArgument(format!("plane must be `even` or `odd`, got `{s}`"))),
        }
    }
}

fn perm_matrix(sigma: [usize; 3]) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(3, 3);
    for (j, &i) in sigma.iter().enumerate() {
        p[(i, j)] = 1.0;
    }
    p
}

fn centroid() -> DMatrix<f64> {
    DMatrix::from_element(3, 3, 1.0 / 3.0)
}

/// Orthonormal Frobenius bases of the two planes. The even basis puts the
/// identity on the positive first axis.
#[derive(Clone, Debug)]
pub struct B3Planes {
    pub even: [DMatrix<f64>; 2],
    pub odd: [DMatrix<f64>; 2],
}

impl B3Planes {
    pub fn new() -> Self {
        let j = centroid();
        let gram_schmidt = |a: DMatrix<f64>, b: DMatrix<f64>| {
            let e1 = &a / a.norm();
            let b = &b - &e1 * e1.dot(&b);
            let e2 = &b / b.norm();
            [e1, e2]
        };
        let even = gram_schmidt(DMatrix::identity(3, 3) - &j, perm_matrix([1, 2, 0]) - &j);
        let odd = gram_schmidt(perm_matrix([0, 2, 1]) - &j, perm_matrix([2, 1, 0]) - &j);
        B3Planes { even, odd }
    }

    pub fn basis(&self, plane: SectionPlane) -> &[DMatrix<f64>; 2] {
        match plane {
            SectionPlane::Even => &self.even,
            SectionPlane::Odd => &self.odd,
        }
    }

    pub fn project(&self, m: &DMatrix<f64>, plane: SectionPlane) -> [f64; 2] {
        let d = m - centroid();
        let [e1, e2] = self.basis(plane);
        [e1.dot(&d), e2.dot(&d)]
    }
}

impl Default for B3Planes {
    fn default() -> Self {
        Self::new()
    }
}

/// Planar coordinates, one pair per input matrix.
pub type PlanePoints = Vec<[f64; 2]>;

/// Even-plane and odd-plane coordinates of each 3×3 matrix.
pub fn b3_projections(matrices: &[DMatrix<f64>]) -> Result<(PlanePoints, PlanePoints)> {
    if let Some(m) = matrices.iter().find(|m| m.shape() != (3, 3)) {
        return Err(Error::ShapeMismatch(format!("expected 3×3, got {}×{}", m.nrows(), m.ncols())));
    }
    let planes = B3Planes::new();
    Ok(matrices.iter().map(|m| (planes.project(m, SectionPlane::Even), planes.project(m, SectionPlane::Odd))).unzip())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub x: f64,
    pub y: f64,
    pub accessible: bool,
}

/// Uniform samples of `B₃ ∩ (offset + plane)` in plane coordinates centred
/// on the offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub plane: SectionPlane,
    /// Section vertices in counterclockwise order.
    pub polygon: Vec<[f64; 2]>,
    pub area: f64,
    pub points: Vec<SectionPoint>,
    pub n_accessible: usize,
    pub fraction: f64,
    pub offset_verdict: AccessVerdict,
}

fn s3_classifier(tol: f64) -> Result<Classifier> {
    let rep = Representation::from_specs(
        &[GeneratorSpec::permutation(&[1, 0, 2]), GeneratorSpec::permutation(&[0, 2, 1])],
        Realization::Classical,
    )?;
    Classifier::new(rep, tol)
}

fn check_offset(offset: &DMatrix<f64>) -> Result<()> {
    if offset.shape() != (3, 3) {
        return Err(Error::ShapeMismatch(format!("offset must be 3×3, got {}×{}", offset.nrows(), offset.ncols())));
    }
    if offset.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sums_ok = (0..3).all(|i| (offset.row(i).sum() - 1.0).abs() <= STOCHASTIC_TOL && (offset.column(i).sum() - 1.0).abs() <= STOCHASTIC_TOL);
    if !sums_ok || offset.iter().any(|&v| v < -STOCHASTIC_TOL) {
        return Err(Error::OffsetOutsidePolytope);
    }
    Ok(())
}

/// Vertices of `{(x, y) : offset + x e₁ + y e₂ ≥ 0}` in counterclockwise order.
fn section_polygon(offset: &DMatrix<f64>, basis: &[DMatrix<f64>; 2]) -> Vec<[f64; 2]> {
    // Entry (i, j) gives the half-plane a·(x, y) + b ≥ 0.
    let lines: Vec<([f64; 2], f64)> = (0..9)
        .map(|k| ([basis[0][k], basis[1][k]], offset[k].max(0.0)))
        .filter(|(a, _)| a[0].hypot(a[1]) > 1e-12)
        .collect();
    let feasible = |p: [f64; 2]| lines.iter().all(|(a, b)| a[0] * p[0] + a[1] * p[1] + b >= -VERTEX_TOL);
    let mut verts: Vec<[f64; 2]> = Vec::new();
    for (i, (a1, b1)) in lines.iter().enumerate() {
        for (a2, b2) in &lines[i + 1..] {
            let det = a1[0] * a2[1] - a1[1] * a2[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let p = [(-b1 * a2[1] + b2 * a1[1]) / det, (-a1[0] * b2 + a2[0] * b1) / det];
            if feasible(p) && !verts.iter().any(|v| (v[0] - p[0]).hypot(v[1] - p[1]) <= 1e-9) {
                verts.push(p);
            }
        }
    }
    if verts.is_empty() {
        verts.push([0.0, 0.0]);
    }
    let n = verts.len() as f64;
    let c = verts.iter().fold([0.0, 0.0], |c, v| [c[0] + v[0] / n, c[1] + v[1] / n]);
    verts.sort_by(|u, v| (u[1] - c[1]).atan2(u[0] - c[0]).total_cmp(&(v[1] - c[1]).atan2(v[0] - c[0])));
    verts
}

fn triangle_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
}

/// Uniform point of a convex polygon via a fan from its first vertex.
struct PolygonSampler {
    verts: Vec<[f64; 2]>,
    cumulative: Vec<f64>,
}

impl PolygonSampler {
    fn new(verts: Vec<[f64; 2]>) -> Self {
        let mut acc = 0.0;
        let cumulative = (1..verts.len().saturating_sub(1))
            .map(|i| {
                acc += triangle_area(verts[0], verts[i], verts[i + 1]);
                acc
            })
            .collect();
        PolygonSampler { verts, cumulative }
    }

    fn area(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let v = &self.verts;
        if self.area() <= 1e-14 {
            // Degenerate section: a point or the segment between the extremes.
            let (a, b) = (v[0], v[v.len() - 1]);
            let u: f64 = rng.random();
            return [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])];
        }
        let u = rng.random::<f64>() * self.area();
        let i = self.cumulative.partition_point(|&s| s <= u).min(self.cumulative.len() - 1);
        let (a, b, c) = (v[0], v[i + 1], v[i + 2]);
        let e: [f64; 3] = [Exp1.sample(rng), Exp1.sample(rng), Exp1.sample(rng)];
        let s = e[0] + e[1] + e[2];
        let w = e.map(|x| x / s);
        [w[0] * a[0] + w[1] * b[0] + w[2] * c[0], w[0] * a[1] + w[1] * b[1] + w[2] * c[1]]
    }
}

/// Samples the cross-section of `B₃` through `offset` parallel to `plane`
/// and classifies each point against the classical `S₃` action.
pub fn b3_cross_sections(offset: &DMatrix<f64>, plane: SectionPlane, n: usize, seed: u64, tol: f64) -> Result<CrossSection> {
    check_offset(offset)?;
    let classifier = s3_classifier(tol)?;
    let planes = B3Planes::new();
    let basis = planes.basis(plane);
    let sampler = PolygonSampler::new(section_polygon(offset, basis));
    let at = |x: f64, y: f64| to_complex(&(offset + &basis[0] * x + &basis[1] * y));
    let offset_verdict = classifier.classify_map(&to_complex(offset))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<SectionPoint> = (0..n)
        .map(|_| {
            let [x, y] = sampler.sample(&mut rng);
            SectionPoint { x, y, accessible: classifier.classify_unchecked(&at(x, y)).accessible }
        })
        .collect();
    let n_accessible = points.iter().filter(|p| p.accessible).count();
    Ok(CrossSection {
        plane,
        area: sampler.area(),
        polygon: sampler.verts,
        fraction: if n == 0 { 0.0 } else { n_accessible as f64 / n as f64 },
        n_accessible,
        points,
        offset_verdict,
    })
}
