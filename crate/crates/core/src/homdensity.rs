//! Homomorphism density `t(H, Cay(G, S))` by three independent routes.
//!
//! * brute force: backtracking over vertex maps into the host graph;
//! * kernel average: `E_{x in G^n} prod_e 1_S((Mx)_e)` with `M` the signed
//!   incidence matrix, i.e. the uniform average over `Im(M) = ker(L)`;
//! * Fourier: `sum_{xi in G^m} prod_j f^(sum_i L_ij xi_i)` for a circuit matrix `L`.
//!
//! The last costs `|G|^m * k` coefficient lookups against `|G|^n` host maps
//! for the first two, with `m = k - n + 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cayley::{build_cayley, SymmetricSet};
use crate::circuit::{
    circuit_matrix, power, signed_incidence, CircuitError, CircuitMatrix, SignedIncidenceMatrix,
};
use crate::graphs::{OddCycle, SimpleGraph};
use crate::group::{FourierTable, GroupArith};

/// Default cap on elementary evaluations per instance.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Character tuples per parallel block below which blocks run sequentially.
const PARALLEL_MIN_TUPLES: u128 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("{method} needs {needed} evaluations, above the budget of {budget}")]
    BudgetExceeded {
        method: Method,
        needed: u128,
        budget: u64,
    },
    #[error("{method} requires a bipartite pattern: {witness}")]
    NotBipartite { method: Method, witness: OddCycle },
    #[error("circuit matrix has rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Evaluation route actually used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bruteforce,
    Kernel,
    Fourier,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bruteforce => "bruteforce",
            Method::Kernel => "kernel",
            Method::Fourier => "fourier",
        })
    }
}

/// Requested route; `Auto` plans between brute force and Fourier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodChoice {
    Bruteforce,
    Kernel,
    Fourier,
    Auto,
}

impl FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "brute" | "bruteforce" => Ok(MethodChoice::Bruteforce),
            "kernel" => Ok(MethodChoice::Kernel),
            "fourier" => Ok(MethodChoice::Fourier),
            "auto" => Ok(MethodChoice::Auto),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityValue {
    pub value: f64,
    pub method: Method,
    /// Imaginary part discarded from the Fourier sum; zero for the exact routes.
    pub residual_imag: f64,
    /// Elementary evaluations charged against the budget.
    pub cost: u128,
}

/// Sign and realness of the individual terms of a Fourier sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TermStats {
    pub count: u128,
    pub min_real: f64,
    pub max_abs_imag: f64,
    /// Real part of the term at the zero tuple.
    pub principal: f64,
    /// Sum of the real parts of all other terms, accumulated separately so that
    /// `value - principal` is available without cancellation.
    pub excess: f64,
}

impl TermStats {
    fn empty() -> Self {
        TermStats {
            count: 0,
            min_real: f64::INFINITY,
            max_abs_imag: 0.0,
            principal: 0.0,
            excess: 0.0,
        }
    }

    fn record(&mut self, term: Complex64, zero: bool) {
        self.count += 1;
        self.min_real = self.min_real.min(term.re);
        self.max_abs_imag = self.max_abs_imag.max(term.im.abs());
        if zero {
            self.principal += term.re;
        } else {
            self.excess += term.re;
        }
    }

    pub fn merge(self, other: TermStats) -> TermStats {
        TermStats {
            count: self.count + other.count,
            min_real: self.min_real.min(other.min_real),
            max_abs_imag: self.max_abs_imag.max(other.max_abs_imag),
            principal: self.principal + other.principal,
            excess: self.excess + other.excess,
        }
    }
}

fn check_budget(method: Method, needed: u128, budget: u64) -> Result<(), DensityError> {
    if needed > budget as u128 {
        Err(DensityError::BudgetExceeded {
            method,
            needed,
            budget,
        })
    } else {
        Ok(())
    }
}

/// Search order for backtracking: each vertex after the first of its component
/// has an earlier neighbor (its anchor).
struct SearchPlan {
    order: Vec<usize>,
    anchor: Vec<Option<usize>>,
    /// Earlier neighbors other than the anchor, as positions in `order`.
    checks: Vec<Vec<usize>>,
}

impl SearchPlan {
    fn new(h: &SimpleGraph) -> Self {
        let mut order = Vec::with_capacity(h.vertex_count());
        for comp in h.connected_components() {
            let mut seen = std::collections::BTreeSet::new();
            let mut queue = std::collections::VecDeque::from([comp[0]]);
            seen.insert(comp[0]);
            while let Some(x) = queue.pop_front() {
                order.push(x);
                for &y in h.neighbors(x) {
                    if seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut pos = vec![0usize; h.vertex_count()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut anchor = Vec::with_capacity(order.len());
        let mut checks = Vec::with_capacity(order.len());
        for (i, &v) in order.iter().enumerate() {
            let mut earlier: Vec<usize> = h
                .neighbors(v)
                .iter()
                .map(|&u| pos[u])
                .filter(|&p| p < i)
                .collect();
            earlier.sort_unstable();
            let a = (!earlier.is_empty()).then(|| earlier.remove(0));
            anchor.push(a);
            checks.push(earlier);
        }
        SearchPlan {
            order,
            anchor,
            checks,
        }
    }
}

/// Exact `hom(h, host)` by backtracking with adjacency pruning.
///
/// The budget is charged the nominal `v(host)^v(h)` maps.
pub fn hom_count_bruteforce(
    h: &SimpleGraph,
    host: &SimpleGraph,
    budget: u64,
) -> Result<u128, DensityError> {
    let hn = host.vertex_count();
    check_budget(Method::Bruteforce, power(hn, h.vertex_count()), budget)?;
    if h.vertex_count() == 0 {
        return Ok(1);
    }
    if hn == 0 {
        return Ok(0);
    }
    let words = hn.div_ceil(64);
    let mut adj = vec![0u64; hn * words];
    for &(u, v) in host.edges() {
        adj[u * words + v / 64] |= 1 << (v % 64);
        adj[v * words + u / 64] |= 1 << (u % 64);
    }
    let adjacent = |a: usize, b: usize| adj[a * words + b / 64] >> (b % 64) & 1 == 1;
    let plan = SearchPlan::new(h);
    let all: Vec<usize> = (0..hn).collect();
    let mut image = vec![0usize; plan.order.len()];

    fn descend(
        pos: usize,
        plan: &SearchPlan,
        host: &SimpleGraph,
        all: &[usize],
        image: &mut [usize],
        adjacent: &dyn Fn(usize, usize) -> bool,
    ) -> u128 {
        if pos == plan.order.len() {
            return 1;
        }
        let candidates = match plan.anchor[pos] {
            Some(a) => host.neighbors(image[a]),
            None => all,
        };
        let mut total = 0u128;
        for &c in candidates {
            if plan.checks[pos].iter().all(|&p| adjacent(image[p], c)) {
                image[pos] = c;
                total += descend(pos + 1, plan, host, all, image, adjacent);
            }
        }
        total
    }
    Ok(descend(0, &plan, host, &all, &mut image, &adjacent))
}

/// `hom(h, host) / v(host)^v(h)`.
pub fn density_bruteforce(
    h: &SimpleGraph,
    host: &SimpleGraph,
    budget: u64,
) -> Result<DensityValue, DensityError> {
    let count = hom_count_bruteforce(h, host, budget)?;
    let maps = power(host.vertex_count(), h.vertex_count());
    Ok(DensityValue {
        value: ratio(count, maps),
        method: Method::Bruteforce,
        residual_imag: 0.0,
        cost: maps,
    })
}

fn ratio(num: u128, den: u128) -> f64 {
    if den == 0 {
        return 0.0;
    }
    // Both sides are exact in f64 up to 2^53; beyond that this is correctly rounded
    // to within a couple of ulps, far below the cross-path tolerance.
    num as f64 / den as f64
}

/// `E_{x in G^n} prod_e 1_S((Mx)_e)`, counted exactly.
pub fn kernel_average(
    l: &CircuitMatrix,
    m: &SignedIncidenceMatrix,
    s: &SymmetricSet,
    budget: u64,
) -> Result<DensityValue, DensityError> {
    if l.cols() != m.rows() {
        return Err(DensityError::Shape(format!(
            "L has {} columns but M has {} rows",
            l.cols(),
            m.rows()
        )));
    }
    let group = s.group();
    let order = group.order();
    let n = m.cols();
    let total = power(order, n);
    check_budget(Method::Kernel, total, budget)?;
    let arith = GroupArith::new(group);
    // Edges become decidable once their later endpoint is assigned.
    let mut closing: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(p, q) in m.ends() {
        closing[p.max(q)].push((p, q));
    }
    let mut x = vec![0usize; n];

    fn descend(
        v: usize,
        x: &mut [usize],
        closing: &[Vec<(usize, usize)>],
        arith: &GroupArith,
        s: &SymmetricSet,
    ) -> u128 {
        if v == x.len() {
            return 1;
        }
        let mut count = 0u128;
        for val in 0..arith.order() {
            x[v] = val;
            if closing[v]
                .iter()
                .all(|&(p, q)| s.contains_index(arith.sub(x[p], x[q])))
            {
                count += descend(v + 1, x, closing, arith, s);
            }
        }
        count
    }
    let count = descend(0, &mut x, &closing, &arith, s);
    Ok(DensityValue {
        value: ratio(count, total),
        method: Method::Kernel,
        residual_imag: 0.0,
        cost: total,
    })
}

/// Predicted coefficient lookups of [`fourier_sum`]: `|G|^m * k`.
pub fn fourier_cost(l: &CircuitMatrix, order: usize) -> u128 {
    power(order, l.rows()).saturating_mul(l.cols() as u128)
}

/// `sum_{xi in G^m} prod_{j} f^(sum_i L_ij xi_i)`.
pub fn fourier_sum(l: &CircuitMatrix, table: &FourierTable) -> Result<DensityValue, DensityError> {
    fourier_sum_with_terms(l, table).map(|(v, _)| v)
}

/// [`fourier_sum`] plus statistics of the individual terms.
///
/// Tuples are visited in mixed-radix order (last coordinate fastest). Terms are
/// summed within blocks sharing the first coordinate, then blocks are summed in
/// order, so the result does not depend on the thread count.
pub fn fourier_sum_with_terms(
    l: &CircuitMatrix,
    table: &FourierTable,
) -> Result<(DensityValue, TermStats), DensityError> {
    let rank = l.rank();
    if rank != l.rows() {
        return Err(DensityError::RankDeficient {
            rank,
            rows: l.rows(),
        });
    }
    let group = table.group();
    let order = group.order();
    let arith = GroupArith::new(group);
    let k = l.cols();
    let m = l.rows();

    let (sum, stats, lookups) = if m == 0 {
        let term = (0..k).fold(Complex64::new(1.0, 0.0), |acc, _| acc * table.at(0));
        let mut stats = TermStats::empty();
        stats.record(term, true);
        (term, stats, k as u128)
    } else {
        let block = |first: usize| {
            let mut partial = vec![vec![0usize; k]; m + 1];
            for (j, p) in partial[1].iter_mut().enumerate() {
                *p = arith.add_signed(0, l.entry(0, j), first);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            let mut stats = TermStats::empty();
            let mut lookups = 0u128;
            walk(
                1,
                first == 0,
                l,
                &arith,
                table,
                &mut partial,
                &mut acc,
                &mut stats,
                &mut lookups,
            );
            (acc, stats, lookups)
        };
        let blocks: Vec<(Complex64, TermStats, u128)> = if power(order, m) >= PARALLEL_MIN_TUPLES {
            (0..order).into_par_iter().map(block).collect()
        } else {
            (0..order).map(block).collect()
        };
        blocks.into_iter().fold(
            (Complex64::new(0.0, 0.0), TermStats::empty(), 0u128),
            |(s, st, c), (bs, bst, bc)| (s + bs, st.merge(bst), c + bc),
        )
    };
    Ok((
        DensityValue {
            value: sum.re,
            method: Method::Fourier,
            residual_imag: sum.im.abs(),
            cost: lookups,
        },
        stats,
    ))
}

#[allow(clippy::too_many_arguments)]
fn walk(
    level: usize,
    zero: bool,
    l: &CircuitMatrix,
    arith: &GroupArith,
    table: &FourierTable,
    partial: &mut [Vec<usize>],
    acc: &mut Complex64,
    stats: &mut TermStats,
    lookups: &mut u128,
) {
    let k = l.cols();
    if level == l.rows() {
        let mut term = Complex64::new(1.0, 0.0);
        for &c in &partial[level] {
            term *= table.at(c);
        }
        *lookups += k as u128;
        stats.record(term, zero);
        *acc += term;
        return;
    }
    for xi in 0..arith.order() {
        let (done, rest) = partial.split_at_mut(level + 1);
        for (j, (next, &prev)) in rest[0].iter_mut().zip(&done[level]).enumerate() {
            *next = arith.add_signed(prev, l.entry(level, j), xi);
        }
        walk(
            level + 1,
            zero && xi == 0,
            l,
            arith,
            table,
            partial,
            acc,
            stats,
            lookups,
        );
    }
}

/// `t(h, Cay(G, S))`, evaluated per connected component and multiplied.
///
/// Isolated vertices contribute a factor of 1. `Auto` uses the Fourier route when
/// `h` is bipartite and `sum_c |G|^{m_c} < sum_c |G|^{v_c}` over components with
/// edges, and brute force otherwise.
pub fn density(
    h: &SimpleGraph,
    s: &SymmetricSet,
    choice: MethodChoice,
    budget: u64,
) -> Result<DensityValue, DensityError> {
    let order = s.group().order();
    let components: Vec<SimpleGraph> = h
        .connected_components()
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| h.induced(&c))
        .collect();
    let bipartite = h.is_bipartite();
    let method = match choice {
        MethodChoice::Bruteforce => Method::Bruteforce,
        MethodChoice::Kernel => Method::Kernel,
        MethodChoice::Fourier => Method::Fourier,
        MethodChoice::Auto => {
            let fourier_work: u128 = components
                .iter()
                .map(|c| power(order, c.cyclomatic_number()))
                .sum();
            let brute_work: u128 = components
                .iter()
                .map(|c| power(order, c.vertex_count()))
                .sum();
            if bipartite.is_ok() && fourier_work < brute_work {
                Method::Fourier
            } else {
                Method::Bruteforce
            }
        }
    };
    if method != Method::Bruteforce {
        if let Err(witness) = bipartite {
            return Err(DensityError::NotBipartite { method, witness });
        }
    }

    let host = (method == Method::Bruteforce).then(|| build_cayley(s));
    let table = (method == Method::Fourier).then(|| s.fourier());
    let mut out = DensityValue {
        value: 1.0,
        method,
        residual_imag: 0.0,
        cost: 0,
    };
    for comp in &components {
        let part = match method {
            Method::Bruteforce => density_bruteforce(comp, host.as_ref().unwrap(), budget)?,
            Method::Kernel => {
                let bip = comp.is_bipartite().expect("checked above");
                let l = circuit_matrix(comp, &bip)?;
                let m = signed_incidence(comp, &bip)?;
                kernel_average(&l, &m, s, budget)?
            }
            Method::Fourier => {
                let bip = comp.is_bipartite().expect("checked above");
                let l = circuit_matrix(comp, &bip)?;
                check_budget(Method::Fourier, fourier_cost(&l, order), budget)?;
                fourier_sum(&l, table.as_ref().unwrap())?
            }
        };
        out.value *= part.value;
        out.residual_imag = out.residual_imag.max(part.residual_imag);
        out.cost = out.cost.saturating_add(part.cost);
    }
    Ok(out)
}
