//! Simple undirected graphs, bipartitions, spanning trees and subdivisions.
//!
//! Every edge is stored as the ordered pair it was given in. The pair order is an
//! orientation (tail, head); it has no effect on adjacency but it fixes which end
//! a subdivided path starts from and the sign convention of oriented cycle
//! vectors in [`crate::circuit`]. The position of an edge in the list is its
//! column index in every matrix built from the graph.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a loop")]
    Loop(usize, usize),
    #[error("edge ({0}, {1}) repeats an earlier edge")]
    RepeatedEdge(usize, usize),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("subdivision plan has {got} lengths for {expected} edges")]
    PlanLength { expected: usize, got: usize },
    #[error("subdivision length at edge {0} must be at least 1")]
    ZeroLength(usize),
    #[error("unknown builtin graph `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid builtin parameter: {0}")]
    BuiltinParameter(String),
    #[error("edge list line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("bipartition does not fit the graph: {0}")]
    BadBipartition(String),
    #[error("edge subset is not a spanning tree: {0}")]
    NotSpanningTree(String),
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::Loop(u, v));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::RepeatedEdge(u, v));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(SimpleGraph {
            n,
            edges,
            adjacency,
        })
    }

    pub fn edgeless(n: usize) -> Self {
        SimpleGraph {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Same edges in the same order, each flipped so its W endpoint comes first.
    pub fn oriented_by(&self, bip: &Bipartition) -> Result<SimpleGraph, GraphError> {
        bip.validate(self)?;
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| if bip.in_w(u) { (u, v) } else { (v, u) })
            .collect();
        SimpleGraph::new(self.n, edges)
    }

    /// Disjoint union; the vertices of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> SimpleGraph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        SimpleGraph::new(self.n + other.n, edges).expect("union of simple graphs is simple")
    }

    /// Cyclomatic number `k - n + c` (chords of any spanning forest).
    pub fn cyclomatic_number(&self) -> usize {
        self.edges.len() + self.connected_components().len() - self.n
    }

    /// Components in order of least vertex, each sorted ascending.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// The subgraph induced on `vertices` (sorted), relabeled `0..len` in that order.
    /// Edges keep their relative order and orientation.
    pub fn induced(&self, vertices: &[usize]) -> SimpleGraph {
        let mut relabel = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            relabel[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| relabel[u] != usize::MAX && relabel[v] != usize::MAX)
            .map(|&(u, v)| (relabel[u], relabel[v]))
            .collect();
        SimpleGraph::new(vertices.len(), edges).expect("induced subgraph of a simple graph")
    }

    /// Canonical 2-coloring, or an odd cycle if none exists.
    ///
    /// Each component is explored breadth-first from its least vertex, which goes to W.
    pub fn is_bipartite(&self) -> Result<Bipartition, OddCycle> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        let mut parent = vec![usize::MAX; self.n];
        let mut depth = vec![0usize; self.n];
        for start in 0..self.n {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(true);
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adjacency[x] {
                    match color[y] {
                        None => {
                            color[y] = Some(!color[x].unwrap());
                            parent[y] = x;
                            depth[y] = depth[x] + 1;
                            queue.push_back(y);
                        }
                        Some(c) if c == color[x].unwrap() => {
                            return Err(OddCycle::from_bfs(x, y, &parent, &depth));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let side: Vec<bool> = color.into_iter().map(|c| c.unwrap()).collect();
        Ok(Bipartition { side })
    }

    /// Breadth-first spanning tree of the component containing `root`, visiting
    /// neighbors in increasing order. Returns edge indices in discovery order.
    pub fn bfs_tree(&self, root: usize) -> Vec<usize> {
        let lookup = self.edge_lookup();
        let mut seen = vec![false; self.n];
        seen[root] = true;
        let mut tree = Vec::new();
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    tree.push(lookup(x, y));
                    queue.push_back(y);
                }
            }
        }
        tree
    }

    /// Spanning tree of `component` by breadth-first search from its least vertex.
    pub fn spanning_tree(&self, component: &[usize]) -> Vec<usize> {
        match component.iter().min() {
            Some(&root) => self.bfs_tree(root),
            None => Vec::new(),
        }
    }

    /// Depth-first spanning tree from `root` (neighbors in increasing order).
    pub fn dfs_tree(&self, root: usize) -> Vec<usize> {
        let lookup = self.edge_lookup();
        let mut seen = vec![false; self.n];
        let mut tree = Vec::new();
        let mut stack = vec![(root, usize::MAX)];
        while let Some((x, from)) = stack.pop() {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            if from != usize::MAX {
                tree.push(lookup(from, x));
            }
            for &y in self.adjacency[x].iter().rev() {
                if !seen[y] {
                    stack.push((y, x));
                }
            }
        }
        tree
    }

    /// Edge indices not in `tree`, in edge-list order.
    pub fn chords(&self, tree: &[usize]) -> Vec<usize> {
        let in_tree: BTreeSet<usize> = tree.iter().copied().collect();
        (0..self.edges.len())
            .filter(|e| !in_tree.contains(e))
            .collect()
    }

    fn edge_lookup(&self) -> impl Fn(usize, usize) -> usize + '_ {
        let index: std::collections::HashMap<(usize, usize), usize> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| ((u.min(v), u.max(v)), i))
            .collect();
        move |a, b| index[&(a.min(b), a.max(b))]
    }

    /// Parses `n <count>` followed by one `u v` pair per line. `#` starts a comment.
    pub fn from_edge_list(text: &str) -> Result<SimpleGraph, GraphError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| GraphError::Parse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match n {
                None => {
                    if fields.len() != 2 || fields[0] != "n" {
                        return Err(err("expected header `n <count>`"));
                    }
                    n = Some(fields[1].parse().map_err(|_| err("bad vertex count"))?);
                }
                Some(_) => {
                    if fields.len() != 2 {
                        return Err(err("expected `u v`"));
                    }
                    let u = fields[0].parse().map_err(|_| err("bad vertex"))?;
                    let v = fields[1].parse().map_err(|_| err("bad vertex"))?;
                    edges.push((u, v));
                }
            }
        }
        let n = n.ok_or(GraphError::Parse {
            line: 0,
            reason: "missing header `n <count>`".into(),
        })?;
        SimpleGraph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        f.write_str("])")
    }
}

/// Odd cycle found while 2-coloring, as a closed vertex sequence (first vertex not repeated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddCycle {
    pub vertices: Vec<usize>,
}

impl OddCycle {
    fn from_bfs(x: usize, y: usize, parent: &[usize], depth: &[usize]) -> Self {
        let (mut a, mut b) = (x, y);
        let mut left = vec![a];
        let mut right = vec![b];
        while depth[a] > depth[b] {
            a = parent[a];
            left.push(a);
        }
        while depth[b] > depth[a] {
            b = parent[b];
            right.push(b);
        }
        while a != b {
            a = parent[a];
            b = parent[b];
            left.push(a);
            right.push(b);
        }
        right.pop();
        right.reverse();
        left.extend(right);
        OddCycle { vertices: left }
    }
}

impl fmt::Display for OddCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "odd cycle {}", parts.join("-"))
    }
}

/// Two-sided vertex partition with every edge crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side: Vec<bool>,
}

impl Bipartition {
    /// From a W-membership flag per vertex.
    pub fn from_sides(side: Vec<bool>) -> Self {
        Bipartition { side }
    }

    pub fn in_w(&self, v: usize) -> bool {
        self.side[v]
    }

    pub fn side_w(&self) -> Vec<usize> {
        (0..self.side.len()).filter(|&v| self.side[v]).collect()
    }

    pub fn side_u(&self) -> Vec<usize> {
        (0..self.side.len()).filter(|&v| !self.side[v]).collect()
    }

    pub fn validate(&self, g: &SimpleGraph) -> Result<(), GraphError> {
        if self.side.len() != g.vertex_count() {
            return Err(GraphError::BadBipartition(format!(
                "{} sides for {} vertices",
                self.side.len(),
                g.vertex_count()
            )));
        }
        if let Some(&(u, v)) = g
            .edges()
            .iter()
            .find(|&&(u, v)| self.side[u] == self.side[v])
        {
            return Err(GraphError::BadBipartition(format!(
                "edge ({u}, {v}) lies inside one side"
            )));
        }
        Ok(())
    }
}

/// A base graph with a positive path length per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionPlan {
    base: SimpleGraph,
    lengths: Vec<usize>,
}

impl SubdivisionPlan {
    pub fn new(base: SimpleGraph, lengths: Vec<usize>) -> Result<Self, GraphError> {
        if lengths.len() != base.edge_count() {
            return Err(GraphError::PlanLength {
                expected: base.edge_count(),
                got: lengths.len(),
            });
        }
        if let Some(i) = lengths.iter().position(|&m| m == 0) {
            return Err(GraphError::ZeroLength(i));
        }
        Ok(SubdivisionPlan { base, lengths })
    }

    /// Every length equal to 1: the even subdivision is the standard subdivision.
    pub fn uniform(base: SimpleGraph) -> Self {
        let lengths = vec![1; base.edge_count()];
        SubdivisionPlan { base, lengths }
    }

    pub fn base(&self) -> &SimpleGraph {
        &self.base
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// The intermediate graph with edge `i` replaced by a path of length `m_i`.
    pub fn half_subdivision(&self) -> SimpleGraph {
        subdivide(&self.base, &self.lengths)
    }

    /// Edge count `2 * sum m_i` of the even subdivision.
    pub fn subdivided_edge_count(&self) -> usize {
        2 * self.lengths.iter().sum::<usize>()
    }
}

/// Replaces edge `i = (tail, head)` by a path of `lengths[i]` edges running from
/// tail to head. Original vertices keep their labels; path interiors are appended
/// in edge order, then path order.
pub fn subdivide(base: &SimpleGraph, lengths: &[usize]) -> SimpleGraph {
    assert_eq!(lengths.len(), base.edge_count());
    let mut next = base.vertex_count();
    let mut edges = Vec::with_capacity(lengths.iter().sum());
    for (&(u, v), &len) in base.edges().iter().zip(lengths) {
        assert!(len >= 1);
        let mut prev = u;
        for _ in 1..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, v));
    }
    SimpleGraph::new(next, edges).expect("subdivision of a simple graph is simple")
}

/// Edge `e_i` becomes a path of length `2 m_i`.
pub fn even_subdivision(plan: &SubdivisionPlan) -> SimpleGraph {
    let doubled: Vec<usize> = plan.lengths.iter().map(|m| 2 * m).collect();
    subdivide(&plan.base, &doubled)
}

/// Every edge becomes a path of length 2.
pub fn standard_subdivision(h: &SimpleGraph) -> SimpleGraph {
    subdivide(h, &vec![2; h.edge_count()])
}

/// One representative of each isomorphism class of trees with `edges` edges.
///
/// Representatives come from the lexicographically first Pruefer sequence of
/// their class and are listed in order of a canonical encoding.
pub fn nonisomorphic_trees(edges: usize) -> Vec<SimpleGraph> {
    let n = edges + 1;
    if n <= 2 {
        let e = if n == 2 { vec![(0, 1)] } else { Vec::new() };
        return vec![SimpleGraph::new(n, e).expect("valid tree")];
    }
    let mut seen = std::collections::BTreeMap::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let t = pruefer_tree(&seq, n);
        seen.entry(tree_code(&t)).or_insert(t);
        // Odometer over [0, n)^(n-2), last position fastest.
        let mut i = seq.len();
        loop {
            if i == 0 {
                return seen.into_values().collect();
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
        }
    }
}

fn pruefer_tree(seq: &[usize], n: usize) -> SimpleGraph {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    SimpleGraph::new(n, edges).expect("Pruefer sequences give trees")
}

/// Canonical string of an unrooted tree: the least rooted encoding over its centres.
fn tree_code(t: &SimpleGraph) -> String {
    fn rooted(t: &SimpleGraph, v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = t
            .neighbors(v)
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| rooted(t, w, v))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    let n = t.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| t.degree(v)).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            degree[v] = 0;
            for &w in t.neighbors(v) {
                if degree[w] > 0 {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| rooted(t, c, usize::MAX))
        .min()
        .expect("nonempty tree")
}

/// Named pattern graphs.
///
/// * `K<n>`: complete graph, edges `(i, j)` for `i < j` in lexicographic order.
/// * `C<n>` (n >= 3): cycle with edges `(0,1), (1,2), ..., (n-1, 0)`.
/// * `P<n>`: path with `n` edges `(0,1), ..., (n-1, n)`; `P0` is a single vertex.
/// * `K<a>,<b>`: complete bipartite, left side `0..a`, right side `a..a+b`,
///   edges `(i, a + j)` in lexicographic order.
/// * `Q3`: 3-cube on `0..8`, edges `(x, x ^ 2^b)` for `x` with bit `b` clear,
///   ordered by `x` then `b`.
pub fn builtin_graph(name: &str) -> Result<SimpleGraph, GraphError> {
    let unknown = || GraphError::UnknownBuiltin(name.to_string());
    let param = |s: &str| -> Result<usize, GraphError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        s.parse().map_err(|_| unknown())
    };
    let upper = name.to_ascii_uppercase();
    if upper == "Q3" {
        let mut edges = Vec::new();
        for x in 0..8usize {
            for b in 0..3 {
                if x & (1 << b) == 0 {
                    edges.push((x, x | (1 << b)));
                }
            }
        }
        return SimpleGraph::new(8, edges);
    }
    let (kind, rest) = upper.split_at(upper.find(|c: char| c.is_ascii_digit()).unwrap_or(0));
    match kind {
        "K" => {
            if let Some((a, b)) = rest.split_once(',') {
                let (a, b) = (param(a)?, param(b)?);
                if a == 0 || b == 0 {
                    return Err(GraphError::BuiltinParameter(format!(
                        "{name}: both sides need at least one vertex"
                    )));
                }
                let edges = (0..a)
                    .flat_map(|i| (0..b).map(move |j| (i, a + j)))
                    .collect();
                SimpleGraph::new(a + b, edges)
            } else {
                let n = param(rest)?;
                if n == 0 {
                    return Err(GraphError::BuiltinParameter(format!(
                        "{name}: needs at least one vertex"
                    )));
                }
                let edges = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect();
                SimpleGraph::new(n, edges)
            }
        }
        "C" => {
            let n = param(rest)?;
            if n < 3 {
                return Err(GraphError::BuiltinParameter(format!(
                    "{name}: cycles need at least 3 vertices"
                )));
            }
            SimpleGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
        }
        "P" => {
            let n = param(rest)?;
            SimpleGraph::new(n + 1, (0..n).map(|i| (i, i + 1)).collect())
        }
        _ => Err(unknown()),
    }
}

impl FromStr for SimpleGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        builtin_graph(s)
    }
}
