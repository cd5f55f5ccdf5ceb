//! Named example groups with their realization and, where known, the
//! closed-form accessible volume fraction.

use serde::Serialize;

use crate::channel::Representation;
use crate::error::{Error, Result};
use crate::group::{GeneratorSpec, Realization};
use crate::polytope::{noncyclic4_ratio, polygon_ratio, z2n_ratio, z4_cyclic_ratio};

/// Accessible fraction of the Birkhoff polytope `B₃` measured at 10⁸ samples;
/// no closed form is known.
pub const BIRKHOFF3_FRACTION: f64 = 0.04398;
pub const BIRKHOFF3_FRACTION_TOL: f64 = 0.0005;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reference {
    Exact { value: f64 },
    Empirical { value: f64, tolerance: f64 },
}

impl Reference {
    pub fn value(&self) -> f64 {
        match *self {
            Reference::Exact { value } | Reference::Empirical { value, .. } => value,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Builtin {
    pub name: String,
    pub generators: Vec<GeneratorSpec>,
    pub realization: Realization,
    pub reference: Option<Reference>,
}

impl Builtin {
    pub fn representation(&self) -> Result<Representation> {
        Representation::from_specs(&self.generators, self.realization)
    }
}

const FIXED: &[&str] = &[
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
    "birkhoff3",
];

/// Fixed names followed by the parametrised families.
pub fn names() -> Vec<String> {
    let mut out: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    out.push("z<g> (2 ≤ g ≤ 64)".into());
    out.push("pauli-tensor-<k> (1 ≤ k ≤ 4)".into());
    out.push("weyl-<n> (2 ≤ n ≤ 8)".into());
    out
}

fn diag(phases: &[(i64, i64)]) -> GeneratorSpec {
    GeneratorSpec::diagonal(phases).expect("builtin phases are valid")
}

fn parse_suffix(name: &str, prefix: &str, range: std::ops::RangeInclusive<usize>) -> Option<Result<usize>> {
    let rest = name.strip_prefix(prefix)?;
    let v: usize = rest.parse().ok()?;
    Some(if range.contains(&v) {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("`{name}` is outside {prefix}{}..={}", range.start(), range.end())))
    })
}

pub fn builtin(name: &str) -> Result<Builtin> {
    let exact = |value: f64| Some(Reference::Exact { value });
    let q = Realization::Quantum;
    let (generators, realization, reference) = match name {
        "z2" => (vec![diag(&[(0, 1), (1, 2)])], q, exact(0.5)),
        // diag(1, i): real and imaginary eigenvalues of one sign each, so Φ₀ + Φ₂ = Φ₁ + Φ₃.
        "z4" => (vec![diag(&[(0, 1), (1, 4)])], q, exact(polygon_ratio(4)?)),
        "z4-independent" => (vec![diag(&[(0, 1), (1, 2), (1, 4)])], q, exact(z4_cyclic_ratio())),
        "z4-nonregular" => (vec![diag(&[(0, 1), (0, 1), (1, 4), (3, 4)])], q, exact(z4_cyclic_ratio())),
        "noncyclic4" => (vec![diag(&[(0, 1), (0, 1), (1, 2)]), diag(&[(0, 1), (1, 2), (0, 1)])], q, exact(noncyclic4_ratio())),
        "noncyclic4-nonregular" => (
            vec![diag(&[(0, 1), (1, 2), (1, 2), (0, 1)]), diag(&[(0, 1), (0, 1), (0, 1), (1, 2)])],
            q,
            exact(noncyclic4_ratio()),
        ),
        "pauli" => (vec![GeneratorSpec::Pauli { qubits: 1 }], q, exact(noncyclic4_ratio())),
        "s3" | "birkhoff3" => (
            vec![GeneratorSpec::permutation(&[1, 0, 2]), GeneratorSpec::permutation(&[0, 2, 1])],
            Realization::Classical,
            Some(Reference::Empirical { value: BIRKHOFF3_FRACTION, tolerance: BIRKHOFF3_FRACTION_TOL }),
        ),
        _ => {
            if let Some(k) = parse_suffix(name, "pauli-tensor-", 1..=4) {
                let k = k?;
                (vec![GeneratorSpec::Pauli { qubits: k }], q, exact(z2n_ratio(2 * k as u32)?))
            } else if let Some(n) = parse_suffix(name, "weyl-", 2..=8) {
                (vec![GeneratorSpec::Weyl { n: n? }], q, None)
            } else if let Some(g) = parse_suffix(name, "z", 2..=64) {
                let g = g?;
                let reference = if g == 2 { exact(0.5) } else { exact(polygon_ratio(g)?) };
                (vec![GeneratorSpec::CyclicRotation { order: g }], q, reference)
            } else {
                return Err(Error::InvalidArgument(format!("unknown builtin `{name}`")));
            }
        }
    };
    Ok(Builtin { name: name.to_string(), generators, realization, reference })
}
