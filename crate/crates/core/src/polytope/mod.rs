//! Group polytopes in Euclidean coordinates, uniform sampling, and Monte
//! Carlo estimates of the accessible volume fraction.
//!
//! Sampling is split into `workers` fixed chunks; chunk `i` draws from
//! ChaCha8 stream `i` keyed with `seed ^ i`, so estimates are reproducible
//! for a given `(seed, n, workers)` regardless of scheduling.

mod b3;
mod hull;

pub use b3::{b3_cross_sections, b3_projections, B3Planes, CrossSection, PlanePoints, SectionPlane, SectionPoint};
pub use hull::{cayley_menger_volume, facets, pulling_triangulation, Facet};

use std::fmt;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::access::{nnls, Classifier};
use crate::channel::{AffineFrame, CMatrix, Representation};
use crate::dynamics::MixtureWeights;
use crate::error::{Error, Result};

/// Largest non-simplex polytope that is triangulated.
pub const TRIANGULATION_LIMIT: usize = 8;
/// Fixed default so results do not depend on the machine.
pub const DEFAULT_WORKERS: usize = 8;
pub const MIN_MC_SAMPLES: usize = 1000;
/// Hyperplane subsets tried when building an H-representation.
const FACET_SUBSET_LIMIT: u128 = 2_000_000;

/// Vertices of a representation's polytope in orthonormal coordinates on
/// its affine hull, with the identity at the origin.
#[derive(Clone, Debug)]
pub struct EmbeddedPolytope {
    pub vertices: Vec<DVector<f64>>,
    pub affine_dim: usize,
    frame: AffineFrame,
}

pub fn embed(rep: &Representation) -> Result<EmbeddedPolytope> {
    let frame = AffineFrame::new(rep);
    let affine_dim = frame.dim();
    if affine_dim == 0 && rep.order() > 1 {
        return Err(Error::DegeneratePolytope { order: rep.order() });
    }
    let vertices = rep.matrices().iter().map(|m| frame.coords(m)).collect();
    Ok(EmbeddedPolytope { vertices, affine_dim, frame })
}

impl EmbeddedPolytope {
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.affine_dim + 1
    }

    /// The matrix at coordinates `x`.
    pub fn point(&self, x: &DVector<f64>) -> CMatrix {
        self.frame.point(x)
    }

    pub fn coords(&self, m: &CMatrix) -> DVector<f64> {
        self.frame.coords(m)
    }

    pub fn centroid(&self) -> DVector<f64> {
        let mut c = DVector::zeros(self.affine_dim);
        for v in &self.vertices {
            c += v;
        }
        c / self.order() as f64
    }

    /// Pulling triangulation with Cayley–Menger volumes.
    pub fn triangulate(&self) -> Result<Triangulation> {
        if self.affine_dim == 0 {
            return Err(Error::DegeneratePolytope { order: self.order() });
        }
        let simplices = if self.is_simplex() {
            vec![(0..self.order()).collect()]
        } else if self.order() > TRIANGULATION_LIMIT {
            return Err(Error::TriangulationOverflow { order: self.order(), limit: TRIANGULATION_LIMIT });
        } else {
            pulling_triangulation(&self.vertices)
        };
        Triangulation::new(self, simplices)
    }

    /// Facet inequalities `a·x ≤ b` of the hull.
    pub fn h_representation(&self) -> Result<Vec<Facet>> {
        if self.affine_dim == 0 {
            return Err(Error::DegeneratePolytope { order: self.order() });
        }
        if hull::binomial(self.order(), self.affine_dim) > FACET_SUBSET_LIMIT {
            return Err(Error::TriangulationOverflow { order: self.order(), limit: TRIANGULATION_LIMIT });
        }
        Ok(facets(&self.vertices))
    }

    /// Barycentric weights over the vertices reproducing `x`.
    pub fn certificate(&self, x: &DVector<f64>) -> Result<MixtureWeights> {
        let (k, g) = (self.affine_dim, self.order());
        // Heavily weighted affine row enforces Σp = 1.
        let a = nalgebra::DMatrix::from_fn(k + 1, g, |i, j| if i < k { self.vertices[j][i] } else { 1e3 });
        let mut b = DVector::zeros(k + 1);
        b.rows_mut(0, k).copy_from(x);
        b[k] = 1e3;
        let p = nnls(&a, &b);
        let s = p.sum();
        MixtureWeights::new(p.iter().map(|v| v / s).collect())
    }
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    pub simplices: Vec<Vec<usize>>,
    pub volumes: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Triangulation {
    fn new(poly: &EmbeddedPolytope, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let volumes: Vec<f64> = simplices
            .iter()
            .map(|s| cayley_menger_volume(&s.iter().map(|&i| poly.vertices[i].clone()).collect::<Vec<_>>()))
            .collect();
        let mut acc = 0.0;
        let cumulative = volumes
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(Error::DegeneratePolytope { order: poly.order() });
        }
        Ok(Triangulation { simplices, volumes, cumulative })
    }

    pub fn total_volume(&self) -> f64 {
        *self.cumulative.last().expect("at least one simplex")
    }

    /// Simplex chosen with probability proportional to volume, then Dirichlet(1) weights.
    fn sample<R: Rng>(&self, g: usize, rng: &mut R) -> Vec<f64> {
        let u = rng.random::<f64>() * self.total_volume();
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.simplices.len() - 1);
        let simplex = &self.simplices[idx];
        let e: Vec<f64> = simplex.iter().map(|_| Exp1.sample(rng)).collect();
        let s: f64 = e.iter().sum();
        let mut p = vec![0.0; g];
        for (&v, x) in simplex.iter().zip(e) {
            p[v] = x / s;
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Triangulation,
    HitAndRun,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Triangulation => "triangulation",
            Method::HitAndRun => "hit-and-run",
        })
    }
}

/// Hit-and-run chain over the facet inequalities. Each worker starts at the
/// vertex centroid, discards `burn_in` steps and keeps every `thin`-th point.
#[derive(Clone, Debug)]
pub struct HitAndRun {
    facets: Vec<Facet>,
    start: DVector<f64>,
    pub burn_in: usize,
    pub thin: usize,
}

impl HitAndRun {
    pub fn new(poly: &EmbeddedPolytope) -> Result<Self> {
        let k = poly.affine_dim;
        Ok(HitAndRun { facets: poly.h_representation()?, start: poly.centroid(), burn_in: 200 * k, thin: 10 * k })
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.facets.iter().all(|f| f.normal.dot(x) <= f.offset + 1e-12)
    }

    fn step<R: Rng>(&self, x: &mut DVector<f64>, rng: &mut R) {
        let k = x.len();
        let u = DVector::from_fn(k, |_, _| StandardNormal.sample(rng));
        let u = u.normalize();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for f in &self.facets {
            let au = f.normal.dot(&u);
            let slack = f.offset - f.normal.dot(x);
            if au > 1e-15 {
                hi = hi.min(slack / au);
            } else if au < -1e-15 {
                lo = lo.max(slack / au);
            }
        }
        if lo < hi {
            *x += u * rng.random_range(lo..hi);
        }
    }

    fn chain<R: Rng>(&self, n: usize, rng: &mut R, mut visit: impl FnMut(&DVector<f64>)) {
        let mut x = self.start.clone();
        for _ in 0..self.burn_in {
            self.step(&mut x, rng);
        }
        for _ in 0..n {
            for _ in 0..self.thin {
                self.step(&mut x, rng);
            }
            visit(&x);
        }
    }
}

/// A uniform point and weights that reproduce it.
#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub coords: DVector<f64>,
    pub weights: MixtureWeights,
}

/// `n` uniform points, drawn by Dirichlet/triangulation when possible and by
/// hit-and-run otherwise.
pub fn uniform_sample(poly: &EmbeddedPolytope, n: usize, seed: u64) -> Result<Vec<SamplePoint>> {
    if poly.affine_dim == 0 {
        return Err(Error::DegeneratePolytope { order: poly.order() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match poly.triangulate() {
        Ok(tri) => Ok((0..n)
            .map(|_| {
                let p = tri.sample(poly.order(), &mut rng);
                let coords = barycentre(poly, &p);
                SamplePoint { coords, weights: MixtureWeights::new(p).expect("Dirichlet weights are a probability vector") }
            })
            .collect()),
        Err(Error::TriangulationOverflow { .. }) => {
            let chain = HitAndRun::new(poly)?;
            let mut out = Vec::with_capacity(n);
            let mut pts = Vec::with_capacity(n);
            chain.chain(n, &mut rng, |x| pts.push(x.clone()));
            for coords in pts {
                out.push(SamplePoint { weights: poly.certificate(&coords)?, coords });
            }
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

fn barycentre(poly: &EmbeddedPolytope, p: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(poly.affine_dim);
    for (v, &w) in poly.vertices.iter().zip(p) {
        if w != 0.0 {
            x += v * w;
        }
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub fraction: f64,
    pub std_error: f64,
    #[serde(rename = "n")]
    pub n_samples: usize,
    pub n_accessible: usize,
    pub seed: u64,
    pub method: Method,
    pub workers: usize,
}

impl VolumeEstimate {
    fn from_counts(n: usize, hits: usize, seed: u64, method: Method, workers: usize) -> Self {
        let f = hits as f64 / n as f64;
        VolumeEstimate {
            fraction: f,
            std_error: (f * (1.0 - f) / n as f64).sqrt(),
            n_samples: n,
            n_accessible: hits,
            seed,
            method,
            workers,
        }
    }

    /// `|fraction − target| ≤ k·std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.fraction - target).abs() <= k * self.std_error
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    pub workers: usize,
    /// `None` picks triangulation when available.
    pub method: Option<Method>,
}

impl McConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        McConfig { n, seed, tol: crate::access::DEFAULT_TOL, workers: DEFAULT_WORKERS, method: None }
    }
}

/// Key `seed ⊕ i` on stream `i`. The key alone would make seeds below the
/// worker count share one set of streams.
fn worker_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
    rng.set_stream(i as u64);
    rng
}

/// Sample counts per worker: the first `n % workers` chunks get one extra.
pub fn partition(n: usize, workers: usize) -> Vec<usize> {
    (0..workers).map(|i| n / workers + usize::from(i < n % workers)).collect()
}

pub fn mc_accessible_fraction(rep: &Representation, n: usize, seed: u64, tol: f64) -> Result<VolumeEstimate> {
    mc_accessible_fraction_with(rep, &McConfig { tol, ..McConfig::new(n, seed) })
}

pub fn mc_accessible_fraction_with(rep: &Representation, cfg: &McConfig) -> Result<VolumeEstimate> {
    if cfg.n < MIN_MC_SAMPLES {
        return Err(Error::InvalidArgument(format!("at least {MIN_MC_SAMPLES} samples are required, got {}", cfg.n)));
    }
    if cfg.workers == 0 {
        return Err(Error::InvalidArgument("workers must be positive".into()));
    }
    let poly = embed(rep)?;
    let classifier = Classifier::new(rep.clone(), cfg.tol)?;
    let chunks = partition(cfg.n, cfg.workers);
    let tri = match cfg.method {
        Some(Method::HitAndRun) => None,
        Some(Method::Triangulation) => Some(poly.triangulate()?),
        None => match poly.triangulate() {
            Ok(t) => Some(t),
            Err(Error::TriangulationOverflow { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    let g = rep.order();
    let hits: usize = match &tri {
        Some(tri) => chunks
            .par_iter()
            .enumerate()
            .map(|(i, &m)| {
                let mut rng = worker_rng(cfg.seed, i);
                (0..m)
                    .filter(|_| {
                        let p = tri.sample(g, &mut rng);
                        let map = rep.mixture_raw(&p).expect("length matches");
                        classifier.classify_unchecked(&map).accessible
                    })
                    .count()
            })
            .sum(),
        None => {
            let chain = HitAndRun::new(&poly)?;
            chunks
                .par_iter()
                .enumerate()
                .map(|(i, &m)| {
                    let mut rng = worker_rng(cfg.seed, i);
                    let mut count = 0;
                    chain.chain(m, &mut rng, |x| {
                        if classifier.classify_unchecked(&poly.point(x)).accessible {
                            count += 1;
                        }
                    });
                    count
                })
                .sum()
        }
    };
    let method = if tri.is_some() { Method::Triangulation } else { Method::HitAndRun };
    Ok(VolumeEstimate::from_counts(cfg.n, hits, cfg.seed, method, cfg.workers))
}

/// Hull volume by rejection from the vertex bounding box, independent of any
/// triangulation. Returns `(volume, std_error)`.
pub fn hull_volume_rejection(poly: &EmbeddedPolytope, n: usize, seed: u64) -> Result<(f64, f64)> {
    let chain = HitAndRun::new(poly)?;
    let k = poly.affine_dim;
    let lo = DVector::from_fn(k, |i, _| poly.vertices.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min));
    let hi = DVector::from_fn(k, |i, _| poly.vertices.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max));
    let box_volume: f64 = (&hi - &lo).iter().product();
    let chunks = partition(n, DEFAULT_WORKERS);
    let hits: usize = chunks
        .par_iter()
        .enumerate()
        .map(|(i, &m)| {
            let mut rng = worker_rng(seed, i);
            (0..m)
                .filter(|_| {
                    let x = DVector::from_fn(k, |j, _| rng.random_range(lo[j]..=hi[j]));
                    chain.contains(&x)
                })
                .count()
        })
        .sum();
    let f = hits as f64 / n as f64;
    Ok((box_volume * f, box_volume * (f * (1.0 - f) / n as f64).sqrt()))
}

/// `(1 − e^{−2π tan(π/g)}) / (2g sin²(π/g))`, the accessible fraction of a regular g-gon.
pub fn polygon_ratio(g: usize) -> Result<f64> {
    if g < 3 {
        return Err(Error::InvalidArgument(format!("polygon needs g ≥ 3, got {g}")));
    }
    let a = std::f64::consts::PI / g as f64;
    Ok(-(-2.0 * std::f64::consts::PI * a.tan()).exp_m1() / (2.0 * g as f64 * a.sin().powi(2)))
}

/// `(2^n)! / 2^{n·2^n}`, the accessible fraction for `Z₂^n`.
pub fn z2n_ratio(n: u32) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if n > 8 {
        return Err(Error::Overflow(format!("z2n_ratio is limited to n ≤ 8, got {n}")));
    }
    let size = 1u64 << n;
    Ok((1..=size).map(|k| k as f64 / size as f64).product())
}

/// `(3/32)(1 − e^{−4π})` for the three-dimensional cyclic group of order four.
pub fn z4_cyclic_ratio() -> f64 {
    3.0 / 32.0 * -(-4.0 * std::f64::consts::PI).exp_m1()
}

pub fn noncyclic4_ratio() -> f64 {
    3.0 / 32.0
}

/// `e^{−π tan(π/g)}`: below this modulus a polygon point's nontrivial
/// eigenvalue is reached whatever its phase.
pub fn r_star(g: usize) -> Result<f64> {
    if g < 3 {
        return Err(Error::InvalidArgument(format!("r* needs g ≥ 3, got {g}")));
    }
    Ok((-std::f64::consts::PI * (std::f64::consts::PI / g as f64).tan()).exp())
}
