//! Finite groups given by their Cayley table.
//!
//! Element 0 is always the identity. Tables are built either by closing a set
//! of exact generators (see [`close_group`]) or directly from a multiplication
//! table, and are validated on construction.

mod spec;

pub use spec::{close_group, ClosedGroup, GeneratorSpec, GroupFile, Monomial, Phase, Realization};

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Largest group produced by closure or direct products.
pub const CLOSURE_LIMIT: usize = 4096;
/// Largest group for which subgroups are enumerated (one bit per element).
pub const SUBGROUP_LIMIT: usize = 64;
/// Largest group whose associativity is checked exhaustively.
const ASSOCIATIVITY_LIMIT: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    cayley: Vec<usize>,
    inverse: Vec<usize>,
    element_order: Vec<usize>,
    labels: Vec<String>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("order", &self.order)
            .field("labels", &self.labels)
            .finish()
    }
}

impl GroupTable {
    /// Builds a table from rows `cayley[a][b] = a·b`, validating the group axioms.
    pub fn from_cayley(cayley: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let g = cayley.len();
        if g == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if labels.len() != g {
            return Err(Error::LengthMismatch { expected: g, got: labels.len() });
        }
        let mut flat = Vec::with_capacity(g * g);
        for row in &cayley {
            if row.len() != g {
                return Err(Error::InvalidTable("table is not square".into()));
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(g, flat, labels)
    }

    pub(crate) fn from_flat(g: usize, cayley: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if cayley.iter().any(|&x| x >= g) {
            return Err(Error::InvalidTable("entry out of range".into()));
        }
        for mu in 0..g {
            if cayley[mu] != mu || cayley[mu * g] != mu {
                return Err(Error::InvalidTable("element 0 is not the identity".into()));
            }
        }
        // Latin square: every row and column is a permutation.
        let mut seen = vec![false; g];
        for a in 0..g {
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..g {
                let x = cayley[a * g + b];
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidTable(format!("row {a} repeats element {x}")));
                }
            }
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..g {
                let x = cayley[b * g + a];
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidTable(format!("column {a} repeats element {x}")));
                }
            }
        }
        if g <= ASSOCIATIVITY_LIMIT {
            for a in 0..g {
                for b in 0..g {
                    let ab = cayley[a * g + b];
                    for c in 0..g {
                        if cayley[ab * g + c] != cayley[a * g + cayley[b * g + c]] {
                            return Err(Error::InvalidTable(format!(
                                "associativity fails for ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        }
        let inverse: Vec<usize> = (0..g)
            .map(|a| (0..g).find(|&b| cayley[a * g + b] == 0).expect("latin square row contains identity"))
            .collect();
        let element_order = (0..g)
            .map(|a| {
                let mut h = 1;
                let mut x = a;
                while x != 0 {
                    x = cayley[x * g + a];
                    h += 1;
                }
                h
            })
            .collect();
        Ok(GroupTable { order: g, cayley, inverse, element_order, labels })
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        GroupTable {
            order: 1,
            cayley: vec![0],
            inverse: vec![0],
            element_order: vec![1],
            labels: vec!["e".into()],
        }
    }

    /// Cyclic group of order `h` with element `r` standing for the r-th power of a generator.
    pub fn cyclic(h: usize) -> Result<Self> {
        if h == 0 || h > CLOSURE_LIMIT {
            return Err(Error::InvalidArgument(format!("cyclic order {h}")));
        }
        let cayley = (0..h * h).map(|i| (i / h + i % h) % h).collect();
        let labels = (0..h).map(|r| power_label("a", r)).collect();
        Self::from_flat(h, cayley, labels)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, mu: usize) -> &str {
        &self.labels[mu]
    }

    /// Index of the element with the given label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverse
    }

    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.cayley.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    fn check_index(&self, mu: usize) -> Result<()> {
        if mu < self.order {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: mu, order: self.order })
        }
    }

    /// Least `h ≥ 1` with `μ^h = e`.
    pub fn element_order(&self, mu: usize) -> Result<usize> {
        self.check_index(mu)?;
        Ok(self.element_order[mu])
    }

    pub fn element_orders(&self) -> &[usize] {
        &self.element_order
    }

    /// Powers `μ^0, μ^1, …, μ^{h−1}` in that order.
    pub fn cyclic_subgroup(&self, mu: usize) -> Result<Vec<usize>> {
        self.check_index(mu)?;
        let mut out = vec![0];
        let mut x = mu;
        while x != 0 {
            out.push(x);
            x = self.mul(x, mu);
        }
        Ok(out)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Smallest subgroup containing `elements`, as a sorted index list.
    pub fn generated_subgroup(&self, elements: &[usize]) -> Result<Vec<usize>> {
        for &e in elements {
            self.check_index(e)?;
        }
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &s in elements {
                let y = self.mul(x, s);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Ok(set.into_iter().collect())
    }

    /// All subgroups, including the trivial group and the whole group.
    pub fn enumerate_subgroups(&self) -> Result<SubgroupSet> {
        let g = self.order;
        if g > SUBGROUP_LIMIT {
            return Err(Error::GroupTooLarge { order: g, limit: SUBGROUP_LIMIT });
        }
        let close = |mask: u64| -> u64 {
            let mut m = mask | 1;
            loop {
                let mut next = m;
                for a in bits(m) {
                    for b in bits(m) {
                        next |= 1u64 << self.mul(a, b);
                    }
                }
                if next == m {
                    return m;
                }
                m = next;
            }
        };
        let mut found: HashSet<u64> = HashSet::new();
        let mut frontier: Vec<u64> = Vec::new();
        for mu in 0..g {
            let m = close(1u64 << mu);
            if found.insert(m) {
                frontier.push(m);
            }
        }
        while let Some(h) = frontier.pop() {
            for x in 0..g {
                if h >> x & 1 == 0 {
                    let m = close(h | 1u64 << x);
                    if found.insert(m) {
                        frontier.push(m);
                    }
                }
            }
        }
        let mut subgroups: Vec<Subgroup> = found
            .into_iter()
            .map(|m| {
                let elements: Vec<usize> = bits(m).collect();
                let order = elements.len();
                let cyclic = elements.iter().any(|&e| self.element_order[e] == order);
                Subgroup { elements, order, cyclic }
            })
            .collect();
        subgroups.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.elements.cmp(&b.elements)));
        Ok(SubgroupSet { subgroups })
    }

    /// Direct product with element `(i, j)` stored at index `i·|b| + j`.
    pub fn direct_product(&self, other: &GroupTable) -> Result<GroupTable> {
        let (ga, gb) = (self.order, other.order);
        let g = ga.checked_mul(gb).filter(|&g| g <= CLOSURE_LIMIT).ok_or(Error::ClosureOverflow { limit: CLOSURE_LIMIT })?;
        let mut cayley = Vec::with_capacity(g * g);
        for x in 0..g {
            let (i, j) = (x / gb, x % gb);
            for y in 0..g {
                let (k, l) = (y / gb, y % gb);
                cayley.push(self.mul(i, k) * gb + other.mul(j, l));
            }
        }
        let labels = (0..g)
            .map(|x| {
                let (i, j) = (x / gb, x % gb);
                match (i, j) {
                    (0, 0) => "e".to_string(),
                    _ => format!("({},{})", self.labels[i], other.labels[j]),
                }
            })
            .collect();
        GroupTable::from_flat(g, cayley, labels)
    }

    /// g×g permutation matrices `R_α e_β = e_{αβ}` as integer column maps.
    pub(crate) fn regular_column_images(&self, alpha: usize) -> &[usize] {
        &self.cayley[alpha * self.order..(alpha + 1) * self.order]
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

pub(crate) fn power_label(name: &str, r: usize) -> String {
    match r {
        0 => "e".into(),
        1 => name.into(),
        _ => format!("{name}^{r}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    /// Sorted element indices; always contains 0.
    pub elements: Vec<usize>,
    pub order: usize,
    pub cyclic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSet {
    pub subgroups: Vec<Subgroup>,
}

impl SubgroupSet {
    /// Subgroup orders in ascending order, with multiplicity.
    pub fn orders(&self) -> Vec<usize> {
        self.subgroups.iter().map(|s| s.order).collect()
    }

    /// Distinct subgroup orders.
    pub fn distinct_orders(&self) -> BTreeSet<usize> {
        self.subgroups.iter().map(|s| s.order).collect()
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subgroup> {
        self.subgroups.iter()
    }
}
