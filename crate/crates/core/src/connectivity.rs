//! Support-connectivity partitions.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::window::DifferenceSet;

/// Union-find with path compression and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// The relation a partition was computed under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    /// `dist_d(j, k) ≤ L`.
    ModD { d: usize, l: usize },
    /// `|j − k| ≤ L` on the integer line.
    Line { l: usize },
    /// `k − j ∈ D_g` on the integer line.
    LineDifferenceSet { members: BTreeSet<i64> },
    /// `k − j ≡ s (mod d)` for some `s` in the given shift set.
    Shifts { d: usize, shifts: BTreeSet<usize> },
}

impl Relation {
    pub fn describe(&self) -> String {
        match self {
            Relation::ModD { d, l } => format!("L-mod-d (d={d}, L={l})"),
            Relation::Line { l } => format!("L-line (L={l})"),
            Relation::LineDifferenceSet { .. } => "g-line (difference set)".to_string(),
            Relation::Shifts { d, shifts } => format!("shifts-mod-d (d={d}, {} shifts)", shifts.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityPartition {
    pub relation: Relation,
    /// Sorted components, ordered by their smallest member.
    pub components: Vec<Vec<i64>>,
    /// The sorted input support.
    pub universe: Vec<i64>,
}

impl ConnectivityPartition {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// At most one component.
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    pub fn component_of(&self, j: i64) -> Option<usize> {
        self.components.iter().position(|c| c.binary_search(&j).is_ok())
    }
}

fn build(relation: Relation, universe: Vec<i64>, mut related: impl FnMut(usize, usize) -> bool, adjacent_only: bool) -> ConnectivityPartition {
    let n = universe.len();
    let mut ds = DisjointSets::new(n);
    if adjacent_only {
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j && related(i, j) {
                ds.union(i, j);
            }
        }
    } else {
        for i in 0..n {
            for j in i + 1..n {
                if related(i, j) {
                    ds.union(i, j);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    for i in 0..n {
        let r = ds.find(i);
        groups.entry(r).or_default().push(universe[i]);
    }
    let mut components: Vec<Vec<i64>> = groups.into_values().collect();
    components.iter_mut().for_each(|c| c.sort_unstable());
    components.sort_by_key(|c| c[0]);
    ConnectivityPartition { relation, components, universe }
}

fn normalized(support: &[usize], d: usize) -> Result<Vec<i64>> {
    if let Some(&bad) = support.iter().find(|&&j| j >= d) {
        return Err(Error::InvalidParameter(format!("support index {bad} outside 0..{d}")));
    }
    let mut v: Vec<i64> = support.iter().map(|&j| j as i64).collect();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Components of `support ⊆ Z_d` under `dist_d ≤ L`.
///
/// Closeness chains through cyclically adjacent support members, so only
/// neighbours in sorted cyclic order are joined.
pub fn components_mod_d(support: &[usize], d: usize, l: usize) -> Result<ConnectivityPartition> {
    if 2 * l >= d {
        return Err(Error::InvalidParameter(format!("need 0 <= L < d/2, got d={d}, L={l}")));
    }
    let universe = normalized(support, d)?;
    let u = universe.clone();
    Ok(build(
        Relation::ModD { d, l },
        universe,
        |i, j| {
            let diff = (u[i] - u[j]).rem_euclid(d as i64) as usize;
            diff.min(d - diff) <= l
        },
        true,
    ))
}

/// Gap rule on the integer line.
#[derive(Debug, Clone, Copy)]
pub enum LineGaps<'a> {
    Block(usize),
    Set(&'a DifferenceSet),
}

pub fn components_line(support: &[i64], gaps: LineGaps<'_>) -> ConnectivityPartition {
    let mut universe = support.to_vec();
    universe.sort_unstable();
    universe.dedup();
    let u = universe.clone();
    match gaps {
        LineGaps::Block(l) => {
            let n = u.len();
            build(Relation::Line { l }, universe, |i, j| j == i + 1 && j < n && u[j] - u[i] <= l as i64, true)
        }
        LineGaps::Set(ds) => build(
            Relation::LineDifferenceSet { members: ds.members().clone() },
            universe,
            |i, j| ds.contains(u[j] - u[i]),
            false,
        ),
    }
}

/// Components of `support ⊆ Z_d` where `j ~ k` iff `k − j` or `j − k` is in `shifts` mod d.
pub fn components_by_shifts(support: &[usize], d: usize, shifts: &BTreeSet<usize>) -> Result<ConnectivityPartition> {
    let universe = normalized(support, d)?;
    let u = universe.clone();
    Ok(build(
        Relation::Shifts { d, shifts: shifts.clone() },
        universe,
        |i, j| {
            let diff = (u[j] - u[i]).rem_euclid(d as i64) as usize;
            shifts.contains(&diff) || shifts.contains(&((d - diff) % d))
        },
        false,
    ))
}
