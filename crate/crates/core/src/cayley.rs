//! Cayley graphs `Cay(G, S)` over finite abelian groups and their character spectra.
//!
//! The group is written additively, so `x ~ y` iff `y - x` lies in `S`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::graphs::SimpleGraph;
use crate::group::{
    fourier_transform, AbelianGroup, CharacterTable, FourierTable, GroupArith, GroupElement,
    GroupError, GroupFunction, TAU_SYM,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CayleyError {
    #[error("connection set contains the identity")]
    ContainsZero,
    #[error("connection set contains {0} but not its negative {1}")]
    NotSymmetric(GroupElement, GroupElement),
    #[error("malformed set literal `{0}`")]
    Literal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// `S` with `0 ∉ S` and `S = -S`. Members are kept sorted by canonical index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricSet {
    group: AbelianGroup,
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl SymmetricSet {
    pub fn new(group: &AbelianGroup, members: &[GroupElement]) -> Result<Self, CayleyError> {
        let mut idx = Vec::with_capacity(members.len());
        for g in members {
            idx.push(group.index_of(g)?);
        }
        Self::from_indices(group, idx)
    }

    pub fn from_indices(
        group: &AbelianGroup,
        mut members: Vec<usize>,
    ) -> Result<Self, CayleyError> {
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&i| i >= group.order()) {
            return Err(CayleyError::Literal(format!(
                "index {bad} outside group {group}"
            )));
        }
        if members.first() == Some(&0) {
            return Err(CayleyError::ContainsZero);
        }
        let arith = GroupArith::new(group);
        let mut mask = vec![false; group.order()];
        for &i in &members {
            mask[i] = true;
        }
        if let Some(&i) = members.iter().find(|&&i| !mask[arith.neg(i)]) {
            return Err(CayleyError::NotSymmetric(
                group.element_at(i),
                group.element_at(arith.neg(i)),
            ));
        }
        Ok(SymmetricSet {
            group: group.clone(),
            members,
            mask,
        })
    }

    /// Adds the negative of every member, then validates.
    pub fn closure(group: &AbelianGroup, members: &[GroupElement]) -> Result<Self, CayleyError> {
        let arith = GroupArith::new(group);
        let mut idx = Vec::with_capacity(2 * members.len());
        for g in members {
            let i = group.index_of(g)?;
            idx.push(i);
            idx.push(arith.neg(i));
        }
        Self::from_indices(group, idx)
    }

    pub fn empty(group: &AbelianGroup) -> Self {
        SymmetricSet {
            group: group.clone(),
            members: Vec::new(),
            mask: vec![false; group.order()],
        }
    }

    /// Parses `1,3` for cyclic groups or `(1,0);(0,1)` for products.
    /// With `close` set, negatives are added instead of rejected when missing.
    pub fn parse(group: &AbelianGroup, literal: &str, close: bool) -> Result<Self, CayleyError> {
        let elements = parse_elements(group, literal)?;
        if close {
            Self::closure(group, &elements)
        } else {
            Self::new(group, &elements)
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Canonical indices of the members, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn members(&self) -> Vec<GroupElement> {
        self.members
            .iter()
            .map(|&i| self.group.element_at(i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn indicator(&self) -> GroupFunction {
        GroupFunction::indicator(&self.group, &self.mask).expect("mask has one entry per element")
    }

    /// Fourier table of `1_S`.
    pub fn fourier(&self) -> FourierTable {
        fourier_transform(&self.indicator())
    }

    /// Literal that [`SymmetricSet::parse`] reads back.
    pub fn literal(&self) -> String {
        let sep = if self.group.rank() == 1 { "," } else { ";" };
        self.members()
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

fn parse_elements(group: &AbelianGroup, literal: &str) -> Result<Vec<GroupElement>, CayleyError> {
    let bad = || CayleyError::Literal(literal.to_string());
    let text = literal.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let parse_int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
    let mut out = Vec::new();
    if text.contains('(') {
        for token in text.split(';') {
            let inner = token
                .trim()
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(bad)?;
            let coords = inner
                .split(',')
                .map(parse_int)
                .collect::<Result<Vec<_>, _>>()?;
            if coords.len() != group.rank() {
                return Err(bad());
            }
            out.push(checked_element(group, &coords).ok_or_else(bad)?);
        }
    } else {
        if group.rank() != 1 {
            return Err(bad());
        }
        for token in text.split(',') {
            let c = parse_int(token)?;
            out.push(checked_element(group, &[c]).ok_or_else(bad)?);
        }
    }
    Ok(out)
}

fn checked_element(group: &AbelianGroup, coords: &[i64]) -> Option<GroupElement> {
    let in_range = coords
        .iter()
        .zip(group.moduli())
        .all(|(&c, &n)| c >= 0 && c < n as i64);
    in_range.then(|| group.element(coords).ok()).flatten()
}

/// Vertex `x` is the element with canonical index `x`; edges `(x, y)` with `x < y`
/// and `y - x ∈ S`, ordered lexicographically.
pub fn build_cayley(s: &SymmetricSet) -> SimpleGraph {
    let order = s.group.order();
    let arith = GroupArith::new(&s.group);
    let mut edges = Vec::with_capacity(order * s.len() / 2);
    for x in 0..order {
        let mut nbrs: Vec<usize> = s
            .members
            .iter()
            .map(|&g| arith.add(x, g))
            .filter(|&y| y > x)
            .collect();
        nbrs.sort_unstable();
        edges.extend(nbrs.into_iter().map(|y| (x, y)));
    }
    SimpleGraph::new(order, edges).expect("Cayley graph of a symmetric set is simple")
}

/// `|S| / |G|`, which is `t(K_2, Cay(G, S))`.
pub fn edge_density(s: &SymmetricSet) -> f64 {
    s.len() as f64 / s.group.order() as f64
}

/// Eigenvalues `lambda_a = sum_{g in S} chi_a(g)` in character-index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumTable {
    pub eigenvalues: Vec<f64>,
    /// `lambda_0 = |S|`.
    pub principal: f64,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
}

impl SpectrumTable {
    /// `max_{a != 0} |lambda_a|`, zero for a group of order one.
    pub fn max_nonprincipal(&self) -> f64 {
        self.eigenvalues[1..]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

pub fn spectrum(s: &SymmetricSet) -> SpectrumTable {
    let chars = CharacterTable::new(&s.group);
    let mut max_imag: f64 = 0.0;
    let eigenvalues: Vec<f64> = (0..s.group.order())
        .map(|a| {
            let sum = s
                .members
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &g| acc + chars.value(a, g));
            max_imag = max_imag.max(sum.im.abs());
            sum.re
        })
        .collect();
    debug_assert!(max_imag < TAU_SYM * (1.0 + s.len() as f64));
    SpectrumTable {
        principal: eigenvalues[0],
        eigenvalues,
        max_imag,
    }
}

/// All symmetric subsets of `group` in canonical order: by size, then by sorted index list.
///
/// Built from negation orbits (`{g}` when `2g = 0`, else `{g, -g}`).
pub fn negation_orbits(group: &AbelianGroup) -> Vec<Vec<usize>> {
    let arith = GroupArith::new(group);
    (1..group.order())
        .filter_map(|g| {
            let n = arith.neg(g);
            match n.cmp(&g) {
                std::cmp::Ordering::Equal => Some(vec![g]),
                std::cmp::Ordering::Greater => Some(vec![g, n]),
                std::cmp::Ordering::Less => None,
            }
        })
        .collect()
}

/// Every symmetric subset with at most `max_size` members, sorted by (size, indices).
pub fn symmetric_subsets(group: &AbelianGroup, max_size: usize) -> Vec<SymmetricSet> {
    let orbits = negation_orbits(group);
    let mut sets: Vec<Vec<usize>> = Vec::new();
    fn walk(
        orbits: &[Vec<usize>],
        start: usize,
        cur: &mut Vec<usize>,
        max: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(cur.clone());
        for i in start..orbits.len() {
            if cur.len() + orbits[i].len() <= max {
                let keep = cur.len();
                cur.extend_from_slice(&orbits[i]);
                walk(orbits, i + 1, cur, max, out);
                cur.truncate(keep);
            }
        }
    }
    walk(&orbits, 0, &mut Vec::new(), max_size, &mut sets);
    for s in &mut sets {
        s.sort_unstable();
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.into_iter()
        .map(|m| SymmetricSet::from_indices(group, m).expect("orbit unions are symmetric"))
        .collect()
}
