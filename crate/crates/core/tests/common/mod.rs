//! Oracles and criterion checks shared by the integration tests and the
//! acceptance target. Every check returns a one-line detail on success and a
//! description of the first violation on failure.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyaccess_core::access::{accessible_ranks, is_accessible_weights, random_trajectory_point, star_segment, Classifier};
use polyaccess_core::builtins::builtin;
use polyaccess_core::channel::{eigenvalues, CMatrix, Representation};
use polyaccess_core::dynamics::{cyclic_weights, expm, generator, limit_projector, weights, MixtureWeights, RateSchedule};
use polyaccess_core::group::GroupTable;
use polyaccess_core::polytope::{
    b3_cross_sections, embed, mc_accessible_fraction, noncyclic4_ratio, polygon_ratio, uniform_sample, z4_cyclic_ratio,
    SectionPlane, VolumeEstimate,
};

pub type Check = Result<String, String>;

pub const TOL: f64 = 1e-8;
pub const SEED: u64 = 1;

/// Builtins exercised by the per-group criteria.
pub const GROUPS: &[&str] = &[
    "z2",
    "z3",
    "z4",
    "z5",
    "z6",
    "z7",
    "z4-independent",
    "z4-nonregular",
    "noncyclic4",
    "noncyclic4-nonregular",
    "pauli",
    "s3",
    "pauli-tensor-2",
    "weyl-3",
];

pub fn rep(name: &str) -> Representation {
    builtin(name).unwrap().representation().unwrap()
}

pub fn regular(rep: &Representation) -> Representation {
    Representation::regular(rep.group_arc())
}

pub fn mix(rep: &Representation, w: &[f64]) -> CMatrix {
    rep.mixture(&MixtureWeights::new(w.to_vec()).unwrap()).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// Closed-form weights. Arguments are the scaled rates t_μ = t·q_μ, indexed by
// group element; cyclic elements are indexed by their power.

pub fn z2_closed(t1: f64) -> [f64; 2] {
    let e = (-2.0 * t1).exp();
    [(1.0 + e) / 2.0, (1.0 - e) / 2.0]
}

pub fn z3_closed(t1: f64, t2: f64) -> [f64; 3] {
    let e = (-1.5 * (t1 + t2)).exp();
    let a = 3f64.sqrt() / 2.0 * (t1 - t2);
    let (c, s) = (e * a.cos(), 3f64.sqrt() * e * a.sin());
    [(1.0 + 2.0 * c) / 3.0, (1.0 - c + s) / 3.0, (1.0 - c - s) / 3.0]
}

pub fn z4_closed(t1: f64, t2: f64, t3: f64) -> [f64; 4] {
    let a = (-2.0 * (t1 + t3)).exp();
    let b = (-(t1 + 2.0 * t2 + t3)).exp();
    let (c, s) = (b * (t1 - t3).cos(), b * (t1 - t3).sin());
    [(1.0 + a + 2.0 * c) / 4.0, (1.0 - a + 2.0 * s) / 4.0, (1.0 + a - 2.0 * c) / 4.0, (1.0 - a - 2.0 * s) / 4.0]
}

/// Element 3 is the product of elements 1 and 2.
pub fn noncyclic4_closed(t1: f64, t2: f64, t3: f64) -> [f64; 4] {
    let (a, b, c) = ((-2.0 * (t2 + t3)).exp(), (-2.0 * (t1 + t3)).exp(), (-2.0 * (t1 + t2)).exp());
    [(1.0 + a + b + c) / 4.0, (1.0 + a - b - c) / 4.0, (1.0 - a + b - c) / 4.0, (1.0 - a - b + c) / 4.0]
}

/// `e^{−t} Σ_{k ≡ r (mod h)} t^k/k!` summed over `terms` terms.
pub fn cyclic_series(h: usize, t: f64, terms: usize) -> Vec<f64> {
    let mut w = vec![0.0; h];
    let mut term = (-t).exp();
    for k in 0..terms {
        w[k % h] += term;
        term *= t / (k + 1) as f64;
    }
    w
}

fn schedule(q: &[f64], t: f64) -> RateSchedule {
    RateSchedule::new(q.to_vec(), t).unwrap()
}

fn grid50() -> Vec<f64> {
    (0..50).map(|k| 5.0 * k as f64 / 49.0).collect()
}

fn volume_line(e: &VolumeEstimate, target: f64) -> String {
    format!("{:.5} ± {:.5} vs {:.7} ({:.2}σ)", e.fraction, e.std_error, target, (e.fraction - target) / e.std_error)
}

fn within_3sigma(name: &str, n: usize, target: f64) -> Check {
    let e = mc_accessible_fraction(&rep(name), n, SEED, TOL).map_err(|e| e.to_string())?;
    let line = format!("{name}: {}", volume_line(&e, target));
    if e.within(target, 3.0) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn join(results: Vec<Check>) -> Check {
    let mut lines = Vec::new();
    for r in results {
        lines.push(r?);
    }
    Ok(lines.join("; "))
}

pub fn criterion1() -> Check {
    within_3sigma("noncyclic4", 1_000_000, noncyclic4_ratio())
}

pub fn criterion2() -> Check {
    join(["z4-independent", "z4-nonregular"].iter().map(|n| within_3sigma(n, 1_000_000, z4_cyclic_ratio())).collect())
}

pub fn criterion3() -> Check {
    join((3..=7).map(|g| within_3sigma(&format!("z{g}"), 100_000, polygon_ratio(g).unwrap())).collect())
}

pub fn criterion4() -> Check {
    let target = 0.04398;
    let e = mc_accessible_fraction(&rep("birkhoff3"), 1_000_000, SEED, TOL).map_err(|e| e.to_string())?;
    let line = format!("birkhoff3: {:.5} ± {:.5} vs {target} (|Δ| = {:.5})", e.fraction, e.std_error, (e.fraction - target).abs());
    if (e.fraction - target).abs() <= 0.0005 {
        Ok(line)
    } else {
        Err(line)
    }
}

/// `‖expm(tL) − Σ w_μ R_μ‖_F` over 20 random draws in the regular and the channel rep.
pub fn criterion5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for name in GROUPS {
        let channel = rep(name);
        let reg = regular(&channel);
        for _ in 0..20 {
            let (q, w) = random_trajectory_point(channel.group(), 5.0, &mut rng).map_err(|e| e.to_string())?;
            for r in [&reg, &channel] {
                let l = generator(r, &q).map_err(|e| e.to_string())?;
                let m = expm(&(l * Complex64::new(q.t(), 0.0))).map_err(|e| e.to_string())?;
                let err = (m - r.mixture(&w).unwrap()).norm();
                worst = worst.max(err);
                if !(err <= 1e-10) {
                    return Err(format!("{name} ({}): deviation {err:.3e} at t = {}", r.kind(), q.t()));
                }
            }
        }
    }
    Ok(format!("{} groups × 20 draws × 2 reps, max deviation {worst:.2e}", GROUPS.len()))
}

/// Closed forms for Z₂, Z₃, Z₄ and the non-cyclic group of order four on a 50-point grid.
pub fn criterion6() -> Check {
    let mut worst: f64 = 0.0;
    let mut check = |label: &str, table: &GroupTable, q: &[f64], closed: &dyn Fn(&[f64]) -> Vec<f64>| -> Result<(), String> {
        for t in grid50() {
            let s = schedule(q, t);
            let w = weights(table, &s).map_err(|e| e.to_string())?;
            let err = max_abs_diff(w.as_slice(), &closed(&s.scaled()));
            worst = worst.max(err);
            if !(err <= 1e-10) {
                return Err(format!("{label}: deviation {err:.3e} at t = {t}"));
            }
        }
        Ok(())
    };
    let z2 = GroupTable::cyclic(2).unwrap();
    let z3 = GroupTable::cyclic(3).unwrap();
    let z4 = GroupTable::cyclic(4).unwrap();
    let k4 = rep("noncyclic4").group().clone();
    if k4.mul(1, 2) != 3 {
        return Err("non-cyclic table does not have 1·2 = 3".into());
    }
    check("Z2", &z2, &[0.0, 1.0], &|t| z2_closed(t[1]).to_vec())?;
    for q in [[0.0, 1.0, 0.0], [0.0, 0.3, 0.7], [0.0, 0.5, 0.5], [0.0, 0.0, 2.0]] {
        check("Z3", &z3, &q, &|t| z3_closed(t[1], t[2]).to_vec())?;
    }
    for q in [[0.0, 1.0, 0.0, 0.0], [0.0, 0.2, 0.3, 0.5], [0.0, 0.0, 1.0, 0.0], [0.0, 0.7, 0.0, 0.1]] {
        check("Z4", &z4, &q, &|t| z4_closed(t[1], t[2], t[3]).to_vec())?;
        check("non-cyclic", &k4, &q, &|t| noncyclic4_closed(t[1], t[2], t[3]).to_vec())?;
    }
    Ok(format!("Z2, Z3, Z4, non-cyclic order 4 on 50-point grids, max deviation {worst:.2e}"))
}

/// Fourier closed form against the truncated exponential series.
pub fn criterion7() -> Check {
    let mut worst: f64 = 0.0;
    for h in 1..=12 {
        for k in 0..=50 {
            let t = 5.0 * k as f64 / 50.0;
            let w = cyclic_weights(h, t).map_err(|e| e.to_string())?;
            let err = max_abs_diff(&w, &cyclic_series(h, t, 80));
            worst = worst.max(err);
            if !(err <= 1e-12) {
                return Err(format!("h = {h}, t = {t}: deviation {err:.3e}"));
            }
        }
    }
    Ok(format!("h = 1..12, t ∈ [0, 5], max deviation {worst:.2e}"))
}

/// Draws for soundness: `q` uniform then normalized, `t` uniform in `[0, 10]`.
pub fn soundness(names: &[&str], draws: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut rate_checked = 0;
    for name in names {
        let reg = regular(&rep(name));
        let classifier = Classifier::new(reg.clone(), TOL).unwrap();
        for _ in 0..draws {
            let (q, w) = random_trajectory_point(reg.group(), 10.0, &mut rng).map_err(|e| e.to_string())?;
            let v = classifier.classify_weights(&w).map_err(|e| e.to_string())?;
            if !v.accessible {
                return Err(format!("{name}: w(t) not accessible for q = {:?}, t = {} (residual {:.3e})", q.rates(), q.t(), v.residual));
            }
            // Rates are identifiable only when tL lies in the principal strip.
            let l = generator(&reg, &q).unwrap() * Complex64::new(q.t(), 0.0);
            if eigenvalues(&l).iter().all(|z| z.im.abs() < PI - 1e-6) {
                let got = v.rates.as_ref().ok_or_else(|| format!("{name}: no rates recovered"))?;
                let err = max_abs_diff(got, &q.scaled());
                if !(err <= 1e-6) {
                    return Err(format!("{name}: recovered rates off by {err:.3e}"));
                }
                rate_checked += 1;
            }
        }
    }
    Ok(format!("soundness {} draws, {rate_checked} rate recoveries", names.len() * draws))
}

/// Uniform mixtures with nonpositive determinant are never accessible.
pub fn determinant_necessity(names: &[&str], samples: usize) -> Check {
    let mut nonpositive = 0;
    for name in names {
        let r = rep(name);
        let classifier = Classifier::new(r.clone(), TOL).unwrap();
        for p in uniform_sample(&embed(&r).unwrap(), samples, SEED).map_err(|e| e.to_string())? {
            let v = classifier.classify_weights(&p.weights).map_err(|e| e.to_string())?;
            if v.det_sign <= 0 {
                nonpositive += 1;
                if v.accessible {
                    return Err(format!("{name}: accessible with det sign {}", v.det_sign));
                }
            }
        }
    }
    if nonpositive == 0 {
        return Err("no nonpositive determinants were sampled".into());
    }
    Ok(format!("determinant {nonpositive} nonpositive samples rejected"))
}

/// `star_segment(p, s)` stays accessible for accessible `p` and ten values of `s`.
pub fn star_property(names: &[&str], points: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    for name in names {
        let table = rep(name).group().clone();
        for _ in 0..points {
            let (_, p) = random_trajectory_point(&table, 10.0, &mut rng).map_err(|e| e.to_string())?;
            for k in 0..10 {
                let s = k as f64 / 10.0 + rng.random::<f64>() / 10.0;
                let star = star_segment(&p, s).unwrap();
                if !is_accessible_weights(&table, &star, TOL).unwrap().accessible {
                    return Err(format!("{name}: star point s = {s} of {:?} not accessible", p.as_slice()));
                }
            }
        }
    }
    Ok(format!("star {} points × 10", names.len() * points))
}

/// Z₃: segments from accessible points to the central interval `[1, Φ*]`.
pub fn planar_star(points: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let table = GroupTable::cyclic(3).unwrap();
    let classifier = Classifier::new(Representation::regular(std::sync::Arc::new(table.clone())), TOL).unwrap();
    for _ in 0..points {
        let (_, p) = random_trajectory_point(&table, 10.0, &mut rng).map_err(|e| e.to_string())?;
        let c = star_segment(&MixtureWeights::identity(3), rng.random()).unwrap();
        for k in 0..=10 {
            let lam = k as f64 / 10.0;
            let x: Vec<f64> = p.as_slice().iter().zip(c.as_slice()).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
            let v = classifier.classify_weights(&MixtureWeights::new(x.clone()).unwrap()).unwrap();
            if !v.accessible {
                return Err(format!("Z3 segment point {x:?} not accessible"));
            }
        }
    }
    Ok(format!("planar star {points} segments × 11"))
}

/// Subgroup orders for Weyl groups of prime N and Pauli tensor powers.
pub fn rank_sets() -> Check {
    for n in [2usize, 3, 5, 7] {
        let ranks = accessible_ranks(rep(&format!("weyl-{n}")).group()).map_err(|e| e.to_string())?;
        let expect: std::collections::BTreeSet<usize> = [1, n, n * n].into();
        if ranks != expect {
            return Err(format!("weyl-{n}: ranks {ranks:?}"));
        }
    }
    for k in 1..=3u32 {
        let ranks = accessible_ranks(rep(&format!("pauli-tensor-{k}")).group()).map_err(|e| e.to_string())?;
        let expect: std::collections::BTreeSet<usize> = (0..=2 * k).map(|m| 1usize << m).collect();
        if ranks != expect {
            return Err(format!("pauli-tensor-{k}: ranks {ranks:?}"));
        }
    }
    Ok("ranks Weyl N ∈ {2,3,5,7} and Pauli⊗k, k ≤ 3".into())
}

/// Weyl N ∈ {2, 3, 5}: rates on a subgroup give accessible weights supported exactly on it.
pub fn rank_consistency(draws: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    for n in [2usize, 3, 5] {
        let table = rep(&format!("weyl-{n}")).group().clone();
        for h in table.enumerate_subgroups().unwrap().iter().filter(|h| h.order > 1) {
            for _ in 0..draws {
                let mut q = vec![0.0; table.order()];
                for &e in h.elements.iter().filter(|&&e| e != 0) {
                    q[e] = 0.1 + rng.random::<f64>();
                }
                let s = RateSchedule::normalized(q, 0.1 + 3.0 * rng.random::<f64>()).unwrap();
                let w = weights(&table, &s).unwrap();
                let support = w.support(1e-12);
                if support != h.elements {
                    return Err(format!("weyl-{n}: support {support:?} differs from subgroup {:?}", h.elements));
                }
                if !is_accessible_weights(&table, &w, TOL).unwrap().accessible {
                    return Err(format!("weyl-{n}: subgroup trajectory point not accessible"));
                }
            }
        }
    }
    Ok(format!("rank consistency Weyl N ∈ {{2,3,5}}, {draws} draws per subgroup"))
}

pub fn criterion8() -> Check {
    let sound = ["z2", "z3", "z4", "z5", "z6", "z7", "noncyclic4", "pauli", "s3"];
    join(vec![
        soundness(&sound, 1000),
        determinant_necessity(&["z2", "z3", "z4", "z5", "z4-independent", "noncyclic4", "pauli", "birkhoff3"], 2000),
        star_property(&sound, 100),
        planar_star(200),
        rank_sets(),
        rank_consistency(5),
    ])
}

/// `‖expm(50 L) − Φ*‖_F` for uniform full-support rates.
pub fn criterion9() -> Check {
    let mut worst: f64 = 0.0;
    for name in GROUPS.iter().chain(&["birkhoff3", "weyl-2", "pauli-tensor-1"]) {
        let r = rep(name);
        for target in [r.clone(), regular(&r)] {
            let q = RateSchedule::uniform(target.order(), 50.0).unwrap();
            let l = generator(&target, &q).map_err(|e| e.to_string())?;
            let err = (expm(&(l * Complex64::new(50.0, 0.0))).unwrap() - limit_projector(&target)).norm();
            worst = worst.max(err);
            if !(err <= 1e-8) {
                return Err(format!("{name} ({}): deviation {err:.3e}", target.kind()));
            }
        }
    }
    Ok(format!("max deviation {worst:.2e}"))
}

/// The odd plane through the centroid of B₃ has no accessible sample.
pub fn criterion10() -> Check {
    let centroid = nalgebra::DMatrix::from_element(3, 3, 1.0 / 3.0);
    let s = b3_cross_sections(&centroid, SectionPlane::Odd, 100_000, SEED, TOL).map_err(|e| e.to_string())?;
    if !s.offset_verdict.accessible {
        return Err("the centroid itself is not classified accessible".into());
    }
    if s.n_accessible != 0 {
        return Err(format!("{} of {} odd-plane samples classified accessible", s.n_accessible, s.points.len()));
    }
    Ok(format!("0 of {} odd-plane samples accessible, centroid accessible", s.points.len()))
}
