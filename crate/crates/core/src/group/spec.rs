//! Exact generator descriptions and group closure.
//!
//! Every supported generator kind is a monomial unitary: a permutation matrix
//! with a rational phase `e^{2πi m/n}` on each nonzero entry. Products of
//! monomials are monomials, so closure is decided exactly. Elements are
//! compared projectively by shifting all phases so that column 0 carries
//! phase 0.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{GroupTable, CLOSURE_LIMIT};
use crate::error::{Error, Result};

/// A phase `m/n` turns, reduced into `[0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(Rational64);

impl Phase {
    pub const ZERO: Phase = Phase(Rational64::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidSpec("phase with zero denominator".into()));
        }
        Ok(Phase(Rational64::new(num, den)).wrapped())
    }

    fn wrapped(self) -> Self {
        let r = self.0 - self.0.floor();
        Phase(r)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// `e^{2πi·phase}`, exact on multiples of a quarter turn.
    pub fn to_complex(self) -> Complex64 {
        let (m, n) = (self.numer(), self.denom());
        if (4 * m) % n == 0 {
            return match 4 * m / n {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        Complex64::from_polar(1.0, TAU * m as f64 / n as f64)
    }
}

impl std::ops::Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase(self.0 + rhs.0).wrapped()
    }
}

impl std::ops::Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        Phase(self.0 - rhs.0).wrapped()
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parse = |x: &str| {
            x.trim().parse::<i64>().map_err(|_| Error::InvalidSpec(format!("bad phase {s:?}")))
        };
        match s.split_once('/') {
            Some((m, n)) => Phase::new(parse(m)?, parse(n)?),
            None => Phase::new(parse(s)?, 1),
        }
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(i) => Phase::new(i, 1).map_err(serde::de::Error::custom),
        }
    }
}

/// Monomial unitary `U|j⟩ = e^{2πi·phases[j]} |perm[j]⟩`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub perm: Vec<usize>,
    pub phases: Vec<Phase>,
}

impl Monomial {
    pub fn identity(dim: usize) -> Self {
        Monomial { perm: (0..dim).collect(), phases: vec![Phase::ZERO; dim] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    fn permutation(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidSpec(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Monomial { phases: vec![Phase::ZERO; n], perm })
    }

    fn diagonal(phases: Vec<Phase>) -> Self {
        Monomial { perm: (0..phases.len()).collect(), phases }.normalized()
    }

    /// Shift phases so column 0 carries phase 0 (projective representative).
    pub fn normalized(mut self) -> Self {
        if let Some(&p0) = self.phases.first() {
            for p in &mut self.phases {
                *p = *p - p0;
            }
        }
        self
    }

    /// `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Monomial) -> Monomial {
        let perm = rhs.perm.iter().map(|&j| self.perm[j]).collect();
        let phases = rhs.perm.iter().zip(&rhs.phases).map(|(&j, &p)| p + self.phases[j]).collect();
        Monomial { perm, phases }.normalized()
    }

    pub fn kron(&self, rhs: &Monomial) -> Monomial {
        let n = rhs.dim();
        let mut perm = Vec::with_capacity(self.dim() * n);
        let mut phases = Vec::with_capacity(self.dim() * n);
        for j in 0..self.dim() {
            for k in 0..n {
                perm.push(self.perm[j] * n + rhs.perm[k]);
                phases.push(self.phases[j] + rhs.phases[k]);
            }
        }
        Monomial { perm, phases }.normalized()
    }

    pub fn has_phases(&self) -> bool {
        self.phases.iter().any(|&p| p != Phase::ZERO)
    }

    pub fn unitary(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut u = DMatrix::zeros(n, n);
        for j in 0..n {
            u[(self.perm[j], j)] = self.phases[j].to_complex();
        }
        u
    }

    /// The permutation matrix with `P[perm[j], j] = 1`.
    pub fn permutation_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut p = DMatrix::zeros(n, n);
        for j in 0..n {
            p[(self.perm[j], j)] = 1.0;
        }
        p
    }
}

/// One entry of a group specification file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// 0-based image list: `j ↦ perm[j]`.
    Permutation {
        perm: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// `diag(e^{2πi m_k/n_k})`, phases written as `"m/n"`.
    DiagonalUnitary {
        phases: Vec<Phase>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Shift `X` and clock `Z` on `C^n`.
    Weyl { n: usize },
    /// Pauli group on `qubits` qubits (Weyl with `n = 2`, tensored).
    Pauli {
        #[serde(default = "one")]
        qubits: usize,
    },
    /// Qubit rotations about a fixed axis by multiples of `2π/order`.
    CyclicRotation { order: usize },
    /// Direct product of the groups generated by each side, acting on the tensor product.
    Product { left: Vec<GeneratorSpec>, right: Vec<GeneratorSpec> },
}

fn one() -> usize {
    1
}

impl GeneratorSpec {
    pub fn diagonal(phases: &[(i64, i64)]) -> Result<Self> {
        let phases = phases.iter().map(|&(m, n)| Phase::new(m, n)).collect::<Result<_>>()?;
        Ok(GeneratorSpec::DiagonalUnitary { phases, name: None })
    }

    pub fn permutation(perm: &[usize]) -> Self {
        GeneratorSpec::Permutation { perm: perm.to_vec(), name: None }
    }

    /// Named monomial generators this entry stands for.
    fn expand(&self, index: usize) -> Result<Vec<(String, Monomial)>> {
        let default_name = || generator_name(index);
        Ok(match self {
            GeneratorSpec::Permutation { perm, name } => {
                vec![(name.clone().unwrap_or_else(default_name), Monomial::permutation(perm.clone())?)]
            }
            GeneratorSpec::DiagonalUnitary { phases, name } => {
                if phases.is_empty() {
                    return Err(Error::InvalidSpec("empty diagonal".into()));
                }
                vec![(name.clone().unwrap_or_else(default_name), Monomial::diagonal(phases.clone()))]
            }
            GeneratorSpec::Weyl { n } => weyl_generators(*n, "")?,
            GeneratorSpec::Pauli { qubits } => {
                if *qubits == 0 || *qubits > 6 {
                    return Err(Error::InvalidSpec(format!("pauli qubits must be in 1..=6, got {qubits}")));
                }
                let mut out = Vec::new();
                for q in 0..*qubits {
                    let suffix = if *qubits == 1 { String::new() } else { (q + 1).to_string() };
                    for (name, m) in weyl_generators(2, &suffix)? {
                        let before = Monomial::identity(1 << q);
                        let after = Monomial::identity(1 << (qubits - q - 1));
                        out.push((name, before.kron(&m).kron(&after)));
                    }
                }
                out
            }
            GeneratorSpec::CyclicRotation { order } => {
                if *order == 0 {
                    return Err(Error::InvalidSpec("rotation order must be positive".into()));
                }
                // exp(iπ/l σ_z) ∝ diag(1, e^{-2πi/l})
                vec![("R".into(), Monomial::diagonal(vec![Phase::ZERO, Phase::new(-1, *order as i64)?]))]
            }
            GeneratorSpec::Product { left, right } => {
                let l = expand_all(left)?;
                let r = expand_all(right)?;
                let (Some(dl), Some(dr)) = (l.first().map(|x| x.1.dim()), r.first().map(|x| x.1.dim())) else {
                    return Err(Error::InvalidSpec("product sides need at least one generator".into()));
                };
                let il = Monomial::identity(dl);
                let ir = Monomial::identity(dr);
                l.into_iter()
                    .map(|(n, m)| (format!("{n}⊗1"), m.kron(&ir)))
                    .chain(r.into_iter().map(|(n, m)| (format!("1⊗{n}"), il.kron(&m))))
                    .collect()
            }
        })
    }
}

fn generator_name(index: usize) -> String {
    let letters = b"abcdfghjkmnpqrstuvw";
    if index < letters.len() {
        (letters[index] as char).to_string()
    } else {
        format!("g{index}")
    }
}

fn weyl_generators(n: usize, suffix: &str) -> Result<Vec<(String, Monomial)>> {
    if !(2..=64).contains(&n) {
        return Err(Error::InvalidSpec(format!("weyl dimension must be in 2..=64, got {n}")));
    }
    let x = Monomial::permutation((0..n).map(|j| (j + 1) % n).collect())?;
    let z = Monomial::diagonal((0..n).map(|j| Phase::new(j as i64, n as i64)).collect::<Result<_>>()?);
    Ok(vec![(format!("X{suffix}"), x), (format!("Z{suffix}"), z)])
}

fn expand_all(specs: &[GeneratorSpec]) -> Result<Vec<(String, Monomial)>> {
    let mut out = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        out.extend(s.expand(i)?);
    }
    if let Some(d) = out.first().map(|x| x.1.dim()) {
        if let Some((name, m)) = out.iter().find(|x| x.1.dim() != d) {
            return Err(Error::IncompatibleGenerators(format!(
                "generator {name} has dimension {} but {d} was expected",
                m.dim()
            )));
        }
    }
    Ok(out)
}

/// How the group elements are turned into matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Realization {
    /// Superoperators `U ⊗ conj(U)` (the default).
    #[default]
    Quantum,
    /// Permutation matrices acting on probability vectors.
    Classical,
    /// `U ⊙ conj(U)`.
    Unistochastic,
    /// The g×g regular representation.
    Regular,
}

/// Contents of a group specification file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFile {
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<Realization>,
}

impl GroupFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Explicit realization, or classical when every generator is a plain permutation.
    pub fn realization(&self) -> Realization {
        self.realization.unwrap_or_else(|| {
            let all_perm = !self.generators.is_empty()
                && self.generators.iter().all(|g| matches!(g, GeneratorSpec::Permutation { .. }));
            if all_perm {
                Realization::Classical
            } else {
                Realization::Quantum
            }
        })
    }
}

/// A closed group together with the monomial each table index stands for.
#[derive(Clone, Debug)]
pub struct ClosedGroup {
    pub table: GroupTable,
    pub elements: Vec<Monomial>,
}

impl ClosedGroup {
    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Closes the generators under multiplication, breadth first.
///
/// Element 0 is the identity; later elements appear in discovery order and
/// are labelled by the shortest generator word reaching them.
pub fn close_group(generators: &[GeneratorSpec]) -> Result<ClosedGroup> {
    let gens = expand_all(generators)?;
    let dim = gens.first().map_or(1, |g| g.1.dim());
    let identity = Monomial::identity(dim);
    let mut index: HashMap<Monomial, usize> = HashMap::from([(identity.clone(), 0)]);
    let mut elements = vec![identity];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut head = 0;
    while head < elements.len() {
        for (gi, (_, g)) in gens.iter().enumerate() {
            let next = elements[head].compose(g);
            if !index.contains_key(&next) {
                if elements.len() == CLOSURE_LIMIT {
                    return Err(Error::ClosureOverflow { limit: CLOSURE_LIMIT });
                }
                index.insert(next.clone(), elements.len());
                let mut w = words[head].clone();
                w.push(gi);
                words.push(w);
                elements.push(next);
            }
        }
        head += 1;
    }
    let g = elements.len();
    let mut cayley = Vec::with_capacity(g * g);
    for a in &elements {
        for b in &elements {
            cayley.push(index[&a.compose(b)]);
        }
    }
    let names: Vec<&str> = gens.iter().map(|g| g.0.as_str()).collect();
    let labels = words.iter().map(|w| word_label(w, &names)).collect();
    let table = GroupTable::from_flat(g, cayley, labels)?;
    Ok(ClosedGroup { table, elements })
}

fn word_label(word: &[usize], names: &[&str]) -> String {
    if word.is_empty() {
        return "e".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let mut j = i;
        while j < word.len() && word[j] == word[i] {
            j += 1;
        }
        parts.push(super::power_label(names[word[i]], j - i));
        i = j;
    }
    parts.join("*")
}
