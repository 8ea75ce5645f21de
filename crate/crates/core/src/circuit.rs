//! Circuit matrices, signed incidence matrices, and the kernel/image identity
//! `Im(M) = ker(L)` that turns homomorphism densities into averages over the
//! solution set of a linear system over `G`.
//!
//! A circuit matrix has one row per chord of a spanning tree. Row `i` walks the
//! fundamental cycle of chord `e_i` and records a sign per edge. Two sign
//! conventions are built here:
//!
//! * alternating ([`circuit_matrix`]): for bipartite graphs, `+1, -1, +1, ...`
//!   in walk order, starting with the chord at its smaller endpoint;
//! * oriented ([`oriented_circuit_matrix`]): for any graph, `+1` where the walk
//!   follows the stored edge orientation and `-1` against it, normalized so
//!   the chord is `+1`.
//!
//! For a bipartite graph whose edges all point from W to U the two agree.
//! Doubling the columns of an oriented matrix yields an alternating matrix of the
//! standard subdivision, since each subdivided path is laid out tail to head.

use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

use crate::graphs::{Bipartition, GraphError, OddCycle, SimpleGraph};
use crate::group::{AbelianGroup, GroupArith};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("graph is disconnected ({0} components); split it first")]
    Disconnected(usize),
    #[error("graph is not bipartite: {0}")]
    NotBipartite(OddCycle),
    #[error("matrix entry {0} at ({1}, {2}) is outside {{-1, 0, 1}}")]
    BadEntry(i64, usize, usize),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("enumeration needs {needed} evaluations, above the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `{-1, 0, 1}` matrix with one row per fundamental cycle and one column per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
    vertices: usize,
    chords: Vec<(usize, usize)>,
    edges: Vec<(usize, usize)>,
}

impl CircuitMatrix {
    /// Assembles a matrix from row-major entries. Only shape and entry range are checked.
    pub fn from_rows(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        chords: Vec<(usize, usize)>,
        rows: Vec<Vec<i8>>,
    ) -> Result<Self, CircuitError> {
        let cols = edges.len();
        if chords.len() != rows.len() {
            return Err(CircuitError::Shape(format!(
                "{} chord labels for {} rows",
                chords.len(),
                rows.len()
            )));
        }
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(CircuitError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(-1..=1).contains(&v) {
                    return Err(CircuitError::BadEntry(v as i64, i, j));
                }
            }
            entries.extend_from_slice(row);
        }
        Ok(CircuitMatrix {
            rows: rows.len(),
            cols,
            entries,
            vertices,
            chords,
            edges,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Vertex count of the graph the matrix was built from.
    pub fn vertices(&self) -> usize {
        self.vertices
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Column labels: the edges in column order.
    pub fn edge_order(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Row labels: the chord that closes each fundamental cycle.
    pub fn chord_order(&self) -> &[(usize, usize)] {
        &self.chords
    }

    pub fn negate_row(&mut self, i: usize) {
        for v in &mut self.entries[i * self.cols..(i + 1) * self.cols] {
            *v = -*v;
        }
    }

    pub fn set_entry(&mut self, i: usize, j: usize, value: i8) -> Result<(), CircuitError> {
        if !(-1..=1).contains(&value) {
            return Err(CircuitError::BadEntry(value as i64, i, j));
        }
        self.entries[i * self.cols + j] = value;
        Ok(())
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        rational_rank(&self.entries, self.rows, self.cols)
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.rows
    }
}

impl Serialize for CircuitMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CircuitMatrix", 5)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("edges", &self.edges)?;
        st.serialize_field("chords", &self.chords)?;
        st.serialize_field("entries", &self.to_rows())?;
        st.end()
    }
}

impl fmt::Display for CircuitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|v| format!("{v:>2}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Fraction-free Gaussian elimination over the integers.
fn rational_rank(entries: &[i8], rows: usize, cols: usize) -> usize {
    let mut a: Vec<Vec<i128>> = (0..rows)
        .map(|i| {
            entries[i * cols..(i + 1) * cols]
                .iter()
                .map(|&v| v as i128)
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..rows {
            if r == rank || a[r][col] == 0 {
                continue;
            }
            let (pv, rv) = (a[rank][col], a[r][col]);
            let pivot_row = a[rank].clone();
            for (x, &p) in a[r].iter_mut().zip(&pivot_row) {
                *x = *x * pv - p * rv;
            }
            let g = a[r].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
            if g > 1 {
                a[r].iter_mut().for_each(|v| *v /= g);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// One step of a closed walk: edge index and whether it is crossed tail to head.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleStep {
    pub edge: usize,
    pub forward: bool,
}

/// Closed walk through one chord and the tree path joining its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalCycle {
    pub chord: usize,
    /// Walk start: the smaller endpoint of the chord.
    pub start: usize,
    /// First step is the chord.
    pub steps: Vec<CycleStep>,
}

impl FundamentalCycle {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Vertices in walk order, without repeating the start.
    pub fn vertices(&self, g: &SimpleGraph) -> Vec<usize> {
        let mut at = self.start;
        let mut out = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            out.push(at);
            let (t, h) = g.edges()[s.edge];
            at = if s.forward { h } else { t };
        }
        out
    }
}

/// Fundamental cycles of `tree` in chord order (edge-list order of the chords).
pub fn fundamental_cycles(
    g: &SimpleGraph,
    tree: &[usize],
) -> Result<Vec<FundamentalCycle>, CircuitError> {
    let n = g.vertex_count();
    let components = g.connected_components().len();
    if components > 1 {
        return Err(CircuitError::Disconnected(components));
    }
    let not_tree = |why: String| CircuitError::Graph(GraphError::NotSpanningTree(why));
    if n == 0 {
        return Ok(Vec::new());
    }
    if tree.len() != n - 1 {
        return Err(not_tree(format!("{} edges for {n} vertices", tree.len())));
    }
    let mut tree_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut in_tree = vec![false; g.edge_count()];
    for &e in tree {
        if e >= g.edge_count() || in_tree[e] {
            return Err(not_tree(format!("edge index {e} is invalid or repeated")));
        }
        in_tree[e] = true;
        let (u, v) = g.edges()[e];
        tree_adj[u].push((v, e));
        tree_adj[v].push((u, e));
    }
    // Root the tree at vertex 0.
    let mut parent = vec![(usize::MAX, usize::MAX); n];
    let mut depth = vec![usize::MAX; n];
    depth[0] = 0;
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        for &(y, e) in &tree_adj[x] {
            if depth[y] == usize::MAX {
                depth[y] = depth[x] + 1;
                parent[y] = (x, e);
                stack.push(y);
            }
        }
    }
    if let Some(v) = depth.iter().position(|&d| d == usize::MAX) {
        return Err(not_tree(format!("vertex {v} is not reached")));
    }

    let edges = g.edges();
    let step = |from: usize, e: usize| CycleStep {
        edge: e,
        forward: edges[e].0 == from,
    };
    let mut cycles = Vec::new();
    for chord in (0..g.edge_count()).filter(|&e| !in_tree[e]) {
        let (p, q) = edges[chord];
        let (s, t) = (p.min(q), p.max(q));
        let mut steps = vec![step(s, chord)];
        // Tree path t -> s through the lowest common ancestor.
        let (mut a, mut b) = (t, s);
        let mut down = Vec::new();
        while depth[a] > depth[b] {
            let (pa, e) = parent[a];
            steps.push(step(a, e));
            a = pa;
        }
        while depth[b] > depth[a] {
            let (pb, e) = parent[b];
            down.push(step(pb, e));
            b = pb;
        }
        while a != b {
            let (pa, ea) = parent[a];
            steps.push(step(a, ea));
            a = pa;
            let (pb, eb) = parent[b];
            down.push(step(pb, eb));
            b = pb;
        }
        down.reverse();
        steps.extend(down);
        cycles.push(FundamentalCycle {
            chord,
            start: s,
            steps,
        });
    }
    Ok(cycles)
}

fn bfs_tree_of_connected(g: &SimpleGraph) -> Result<Vec<usize>, CircuitError> {
    let components = g.connected_components();
    if components.len() > 1 {
        return Err(CircuitError::Disconnected(components.len()));
    }
    Ok(components
        .first()
        .map(|c| g.spanning_tree(c))
        .unwrap_or_default())
}

/// Alternating circuit matrix from the breadth-first spanning tree.
pub fn circuit_matrix(g: &SimpleGraph, bip: &Bipartition) -> Result<CircuitMatrix, CircuitError> {
    let tree = bfs_tree_of_connected(g)?;
    circuit_matrix_with_tree(g, bip, &tree)
}

/// Alternating circuit matrix from a caller-chosen spanning tree.
pub fn circuit_matrix_with_tree(
    g: &SimpleGraph,
    bip: &Bipartition,
    tree: &[usize],
) -> Result<CircuitMatrix, CircuitError> {
    g.is_bipartite().map_err(CircuitError::NotBipartite)?;
    bip.validate(g)?;
    let cycles = fundamental_cycles(g, tree)?;
    let k = g.edge_count();
    let mut rows = Vec::with_capacity(cycles.len());
    for c in &cycles {
        debug_assert!(c.len() % 2 == 0, "cycles of a bipartite graph are even");
        let mut row = vec![0i8; k];
        for (pos, s) in c.steps.iter().enumerate() {
            row[s.edge] = if pos % 2 == 0 { 1 } else { -1 };
        }
        rows.push(row);
    }
    finish(g, &cycles, rows)
}

/// Oriented cycle matrix from the breadth-first spanning tree. Any connected graph.
pub fn oriented_circuit_matrix(g: &SimpleGraph) -> Result<CircuitMatrix, CircuitError> {
    let tree = bfs_tree_of_connected(g)?;
    oriented_circuit_matrix_with_tree(g, &tree)
}

pub fn oriented_circuit_matrix_with_tree(
    g: &SimpleGraph,
    tree: &[usize],
) -> Result<CircuitMatrix, CircuitError> {
    let cycles = fundamental_cycles(g, tree)?;
    let k = g.edge_count();
    let rows = cycles
        .iter()
        .map(|c| {
            let flip = if c.steps[0].forward { 1 } else { -1 };
            let mut row = vec![0i8; k];
            for s in &c.steps {
                row[s.edge] = flip * if s.forward { 1 } else { -1 };
            }
            row
        })
        .collect();
    finish(g, &cycles, rows)
}

fn finish(
    g: &SimpleGraph,
    cycles: &[FundamentalCycle],
    rows: Vec<Vec<i8>>,
) -> Result<CircuitMatrix, CircuitError> {
    let chords = cycles.iter().map(|c| g.edges()[c.chord]).collect();
    let l = CircuitMatrix::from_rows(g.vertex_count(), g.edges().to_vec(), chords, rows)?;
    debug_assert!(l.is_full_rank(), "fundamental cycles are independent");
    Ok(l)
}

/// Column `j` of `l1` becomes columns `2j` and `2j + 1` holding `v` and `-v`
/// (0-based). Labels follow [`crate::graphs::standard_subdivision`] of the source graph:
/// edge `j = (t, h)` splits into `(t, n + j)` and `(n + j, h)`.
pub fn double_columns(l1: &CircuitMatrix) -> CircuitMatrix {
    let n = l1.vertices;
    let mid = |j: usize| n + j;
    let edges: Vec<(usize, usize)> = l1
        .edges
        .iter()
        .enumerate()
        .flat_map(|(j, &(t, h))| [(t, mid(j)), (mid(j), h)])
        .collect();
    let chords = l1
        .chords
        .iter()
        .map(|c| {
            let j = l1
                .edges
                .iter()
                .position(|e| e == c)
                .expect("chord is a column");
            (c.0, mid(j))
        })
        .collect();
    let mut entries = Vec::with_capacity(2 * l1.entries.len());
    for i in 0..l1.rows {
        for &v in l1.row(i) {
            entries.push(v);
            entries.push(-v);
        }
    }
    CircuitMatrix {
        rows: l1.rows,
        cols: 2 * l1.cols,
        entries,
        vertices: n + l1.cols,
        chords,
        edges,
    }
}

/// Edge-by-vertex matrix with `(Mx)_e = x_w - x_u` across the bipartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedIncidenceMatrix {
    rows: usize,
    cols: usize,
    /// Per edge: (column of the +1, column of the -1).
    ends: Vec<(usize, usize)>,
}

impl SignedIncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, e: usize, v: usize) -> i8 {
        let (p, m) = self.ends[e];
        if v == p {
            1
        } else if v == m {
            -1
        } else {
            0
        }
    }

    /// `(plus, minus)` vertex of each row.
    pub fn ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        (0..self.rows)
            .map(|e| (0..self.cols).map(|v| self.entry(e, v)).collect())
            .collect()
    }
}

impl Serialize for SignedIncidenceMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SignedIncidenceMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &self.to_rows())?;
        st.end()
    }
}

pub fn signed_incidence(
    g: &SimpleGraph,
    bip: &Bipartition,
) -> Result<SignedIncidenceMatrix, CircuitError> {
    bip.validate(g)?;
    let ends = g
        .edges()
        .iter()
        .map(|&(a, b)| if bip.in_w(a) { (a, b) } else { (b, a) })
        .collect();
    Ok(SignedIncidenceMatrix {
        rows: g.edge_count(),
        cols: g.vertex_count(),
        ends,
    })
}

/// `+1` at each edge's tail, `-1` at its head. Pairs with [`oriented_circuit_matrix`].
pub fn oriented_incidence(g: &SimpleGraph) -> SignedIncidenceMatrix {
    SignedIncidenceMatrix {
        rows: g.edge_count(),
        cols: g.vertex_count(),
        ends: g.edges().to_vec(),
    }
}

/// `base^exp`, saturating into `u128`.
pub fn power(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Why `Im(M) = ker(L)` failed.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum KernelWitness {
    /// `x` (canonical indices) with `L(Mx) != 0`; the least such `x` in mixed-radix order.
    ImageOutsideKernel { x: Vec<usize>, mx: Vec<usize> },
    /// Image and kernel differ in size.
    SizeMismatch { image: u64, kernel: u64 },
    /// `|ker L|` differs from `|G|^(k - m)`.
    KernelSize { kernel: u64, expected: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelImageVerdict {
    pub image_size: u64,
    pub kernel_size: u64,
    pub witness: Option<KernelWitness>,
}

impl KernelImageVerdict {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Exhaustively checks `L(Mx) = 0` for all `x in G^n` and `|Im M| = |ker L| = |G|^(k-m)`.
/// Refuses when `|G|^max(n, k)` exceeds `budget`.
pub fn verify_kernel_image(
    l: &CircuitMatrix,
    m: &SignedIncidenceMatrix,
    group: &AbelianGroup,
    budget: u64,
) -> Result<KernelImageVerdict, CircuitError> {
    if l.cols != m.rows {
        return Err(CircuitError::Shape(format!(
            "L has {} columns but M has {} rows",
            l.cols, m.rows
        )));
    }
    let (n, k) = (m.cols, m.rows);
    let order = group.order();
    let needed = power(order, n.max(k));
    if needed > budget as u128 {
        return Err(CircuitError::BudgetExceeded { needed, budget });
    }
    let arith = GroupArith::new(group);
    let total_k = power(order, k) as usize;
    let mut image = vec![false; total_k];
    let mut image_size = 0u64;
    let mut first_bad: Option<KernelWitness> = None;

    let mut x = vec![0usize; n];
    let mut y = vec![0usize; k];
    loop {
        let mut code = 0usize;
        for (e, &(p, q)) in m.ends.iter().enumerate() {
            y[e] = arith.sub(x[p], x[q]);
            code = code * order + y[e];
        }
        if first_bad.is_none() && !in_kernel(l, &arith, &y) {
            first_bad = Some(KernelWitness::ImageOutsideKernel {
                x: x.clone(),
                mx: y.clone(),
            });
        }
        if !image[code] {
            image[code] = true;
            image_size += 1;
        }
        if !odometer(&mut x, order) {
            break;
        }
    }

    let mut kernel_size = 0u64;
    let mut y = vec![0usize; k];
    loop {
        if in_kernel(l, &arith, &y) {
            kernel_size += 1;
        }
        if !odometer(&mut y, order) {
            break;
        }
    }
    let expected = power(order, k.saturating_sub(l.rows)) as u64;
    let witness = first_bad.or(if image_size != kernel_size {
        Some(KernelWitness::SizeMismatch {
            image: image_size,
            kernel: kernel_size,
        })
    } else if kernel_size != expected {
        Some(KernelWitness::KernelSize {
            kernel: kernel_size,
            expected,
        })
    } else {
        None
    });
    Ok(KernelImageVerdict {
        image_size,
        kernel_size,
        witness,
    })
}

fn in_kernel(l: &CircuitMatrix, arith: &GroupArith, y: &[usize]) -> bool {
    (0..l.rows).all(|i| {
        l.row(i)
            .iter()
            .zip(y)
            .fold(0usize, |acc, (&s, &v)| arith.add_signed(acc, s, v))
            == 0
    })
}

/// Advances a mixed-radix counter (last digit fastest). Returns false after wrapping.
pub(crate) fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
