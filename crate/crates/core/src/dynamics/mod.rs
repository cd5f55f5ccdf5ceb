//! Lindblad generators `L = Σ q_μ (R_μ − 1)`, their exponentials, and the
//! weight vectors `w(t)` with `e^{tL} = Σ w_μ(t) R_μ`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{CMatrix, Representation};
use crate::error::{Error, Result};
use crate::group::GroupTable;

/// Negative entries above this are treated as rounding noise.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Rates `q_μ ≥ 0` with `q₀ = 0`, and a time `t ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSchedule {
    q: Vec<f64>,
    t: f64,
}

impl RateSchedule {
    pub fn new(q: Vec<f64>, t: f64) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidRates("empty rate vector".into()));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidRates(format!("time must be finite and nonnegative, got {t}")));
        }
        if let Some((mu, x)) = q.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidRates(format!("rate q_{mu} = {x} is not a nonnegative number")));
        }
        if q[0] != 0.0 {
            return Err(Error::InvalidRates("the identity carries no rate (q_0 must be 0)".into()));
        }
        Ok(RateSchedule { q, t })
    }

    /// Rescales the rates to sum to one.
    pub fn normalized(q: Vec<f64>, t: f64) -> Result<Self> {
        let s = Self::new(q, t)?;
        let total: f64 = s.q.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidRates("all rates are zero".into()));
        }
        Ok(RateSchedule { q: s.q.iter().map(|x| x / total).collect(), t })
    }

    /// `q_μ = 1/(g−1)` for every `μ ≥ 1`.
    pub fn uniform(g: usize, t: f64) -> Result<Self> {
        let mut q = vec![if g > 1 { 1.0 / (g - 1) as f64 } else { 0.0 }; g];
        q[0] = 0.0;
        Self::new(q, t)
    }

    /// Unit rate on `support`, zero elsewhere, then normalized.
    pub fn on_support(g: usize, support: &[usize], t: f64) -> Result<Self> {
        let mut q = vec![0.0; g];
        for &mu in support {
            if mu == 0 || mu >= g {
                return Err(Error::InvalidRates(format!("support index {mu} outside 1..{g}")));
            }
            q[mu] = 1.0;
        }
        Self::normalized(q, t)
    }

    pub fn rates(&self) -> &[f64] {
        &self.q
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Same rates at another time.
    pub fn at(&self, t: f64) -> Result<Self> {
        Self::new(self.q.clone(), t)
    }

    /// `t_μ = t·q_μ`.
    pub fn scaled(&self) -> Vec<f64> {
        self.q.iter().map(|q| q * self.t).collect()
    }
}

/// Probability vector over group elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixtureWeights(Vec<f64>);

impl MixtureWeights {
    /// Accepts entries ≥ −1e−12 summing to 1 within 1e−12; tiny negatives are
    /// clamped to zero and the vector renormalized.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some((mu, x)) = p.iter().enumerate().find(|(_, x)| **x < -WEIGHT_TOL) {
            return Err(Error::InvalidWeights(format!("p_{mu} = {x} is negative")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOL * p.len().max(1) as f64 {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self::clamped(p))
    }

    fn clamped(mut p: Vec<f64>) -> Self {
        p.iter_mut().for_each(|x| *x = x.max(0.0));
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= sum);
        MixtureWeights(p)
    }

    /// `e₀`.
    pub fn identity(g: usize) -> Self {
        let mut p = vec![0.0; g];
        p[0] = 1.0;
        MixtureWeights(p)
    }

    pub fn uniform(g: usize) -> Self {
        MixtureWeights(vec![1.0 / g as f64; g])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices carrying weight above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > tol).collect()
    }
}

impl std::ops::Index<usize> for MixtureWeights {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `L = Σ_{μ≥1} q_μ (R_μ − 1)` (the time is not applied).
pub fn generator(rep: &Representation, q: &RateSchedule) -> Result<CMatrix> {
    if q.len() != rep.order() {
        return Err(Error::LengthMismatch { expected: rep.order(), got: q.len() });
    }
    let d = rep.dim();
    let mut l = CMatrix::zeros(d, d);
    for (mu, &rate) in q.rates().iter().enumerate().skip(1) {
        if rate != 0.0 {
            l.zip_apply(rep.matrix(mu), |o, x| *o += x * rate);
            for i in 0..d {
                l[(i, i)] -= rate;
            }
        }
    }
    Ok(l)
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("expm needs a square matrix".into()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let e = a.clone().exp();
    if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(e)
}

/// `w(t)`: first column of `exp(t Σ q_ν (R_ν − 1))` in the real regular representation.
pub fn weights(table: &GroupTable, q: &RateSchedule) -> Result<MixtureWeights> {
    let g = table.order();
    if q.len() != g {
        return Err(Error::LengthMismatch { expected: g, got: q.len() });
    }
    let mut l = DMatrix::<f64>::zeros(g, g);
    for (mu, tq) in q.scaled().into_iter().enumerate().skip(1) {
        if tq != 0.0 {
            for (beta, &img) in table.regular_column_images(mu).iter().enumerate() {
                l[(img, beta)] += tq;
            }
            for i in 0..g {
                l[(i, i)] -= tq;
            }
        }
    }
    let e = l.exp();
    let w: Vec<f64> = e.column(0).iter().copied().collect();
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    MixtureWeights::new(w)
}

/// `p_r(t) = (1/h) Σ_s ω^{−sr} e^{t(ω^s − 1)}` with `ω = e^{2πi/h}`.
pub fn cyclic_weights(h: usize, t: f64) -> Result<Vec<f64>> {
    if h == 0 {
        return Err(Error::InvalidArgument("cyclic order must be positive".into()));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be finite and nonnegative, got {t}")));
    }
    let modes: Vec<Complex64> = (0..h)
        .map(|s| {
            let w = Complex64::from_polar(1.0, TAU * s as f64 / h as f64);
            (t * (w - 1.0)).exp()
        })
        .collect();
    let p = (0..h)
        .map(|r| {
            let sum: Complex64 = modes
                .iter()
                .enumerate()
                .map(|(s, m)| m * Complex64::from_polar(1.0, -TAU * ((s * r) % h) as f64 / h as f64))
                .sum();
            (sum.re / h as f64).max(0.0)
        })
        .collect::<Vec<_>>();
    let total: f64 = p.iter().sum();
    Ok(p.into_iter().map(|x| x / total).collect())
}

/// Weights over powers `a^l` of `Π_i exp(t_i (Φ^i − 1))`; `times[i−1]` belongs to `Φ^i`.
pub fn cyclic_product_weights(h: usize, times: &[f64]) -> Result<Vec<f64>> {
    if h < 2 {
        return Err(Error::InvalidArgument("cyclic order must be at least 2".into()));
    }
    if times.len() != h - 1 {
        return Err(Error::LengthMismatch { expected: h - 1, got: times.len() });
    }
    let mut acc = vec![0.0; h];
    acc[0] = 1.0;
    for (i, &ti) in (1..h).zip(times) {
        if ti == 0.0 {
            continue;
        }
        let order = h / gcd(i, h);
        let factor = cyclic_weights(order, ti)?;
        let mut next = vec![0.0; h];
        for (a, &pa) in acc.iter().enumerate() {
            for (j, &pj) in factor.iter().enumerate() {
                next[(a + i * j) % h] += pa * pj;
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Φ* = (1/g) Σ R_μ`.
pub fn limit_projector(rep: &Representation) -> CMatrix {
    rep.uniform_mixture()
}

#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub matrix: CMatrix,
    pub weights: MixtureWeights,
}

/// `e^{tL}` and `w(t)` at each grid time; grid times are evaluated in parallel.
pub fn trajectory(rep: &Representation, q: &RateSchedule, t_grid: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    check_grid(t_grid)?;
    let l = generator(rep, q)?;
    t_grid
        .par_iter()
        .map(|&t| {
            let matrix = expm(&(&l * Complex64::new(t, 0.0)))?;
            let weights = weights(rep.group(), &q.at(t)?)?;
            Ok(TrajectoryPoint { t, matrix, weights })
        })
        .collect()
}

/// `w(t)` on a grid, without any matrix representation.
pub fn weight_trajectory(table: &GroupTable, q: &RateSchedule, t_grid: &[f64]) -> Result<Vec<(f64, MixtureWeights)>> {
    check_grid(t_grid)?;
    t_grid.par_iter().map(|&t| Ok((t, weights(table, &q.at(t)?)?))).collect()
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("time grid must be finite and nonnegative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("time grid must be nondecreasing".into()));
    }
    Ok(())
}

/// `n+1` evenly spaced times in `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect()
}

/// CSV with header `t,w_0,…,w_{g−1}`.
pub fn trajectory_csv(rows: &[(f64, MixtureWeights)]) -> String {
    let g = rows.first().map_or(0, |r| r.1.len());
    let mut out = String::from("t");
    for mu in 0..g {
        let _ = write!(out, ",w_{mu}");
    }
    out.push('\n');
    for (t, w) in rows {
        let _ = write!(out, "{t:?}");
        for x in w.as_slice() {
            let _ = write!(out, ",{x:?}");
        }
        out.push('\n');
    }
    out
}
