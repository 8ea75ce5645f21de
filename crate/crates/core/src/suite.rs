//! The fixed regression suite: cross-method agreement, the Sidorenko check on even
//! subdivisions, epsilon-strictness, and the tree identity `t(T) = (|S|/|G|)^e(T)`.
//!
//! Rows are produced in a fixed instance order and every number is written with
//! the shortest round-trip formatting, so the report is byte-identical across
//! runs and thread counts.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{build_cayley, edge_density, symmetric_subsets, SymmetricSet};
use crate::circuit::{circuit_matrix, power, signed_incidence, CircuitMatrix};
use crate::graphs::{builtin_graph, nonisomorphic_trees, SimpleGraph, SubdivisionPlan};
use crate::group::{AbelianGroup, TAU_NUM, TAU_SYM};
use crate::homdensity::{
    density_bruteforce, fourier_sum, kernel_average, DensityError, Method, DEFAULT_BUDGET,
};
use crate::sidorenko::{check_even_subdivision, strictness_check, SidorenkoError};

/// Patterns compared across all three density routes.
pub const AGREEMENT_PATTERNS: [&str; 6] = ["P2", "P3", "C4", "C6", "K2,3", "Q3"];

/// Groups of the agreement and tree sections.
pub const AGREEMENT_GROUPS: [&str; 10] = [
    "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z2xZ2", "Z2xZ4", "Z3xZ3",
];

/// One presentation of every abelian group of order at most 8.
pub const SMALL_GROUPS: [&str; 10] = [
    "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "Z7", "Z8", "Z2xZ4", "Z2xZ2xZ2",
];

/// Base graphs of the theorem and strictness sections.
pub const THEOREM_BASES: [&str; 4] = ["K3", "K4", "C5", "K2,3"];

pub const EPSILONS: [f64; 3] = [0.1, 0.5, 1.0];

/// Largest connection set in the agreement and tree sections.
pub const MAX_SET_SIZE: usize = 4;

/// Largest tree in the tree section, in edges.
pub const MAX_TREE_EDGES: usize = 6;

/// Six half-length vectors for a base with `edges` edges: all 1, all 2, a single
/// 2 first, a single 2 last, and the two alternating patterns.
pub fn length_vectors(edges: usize) -> Vec<Vec<usize>> {
    let single = |pos: usize| (0..edges).map(|i| if i == pos { 2 } else { 1 }).collect();
    vec![
        vec![1; edges],
        vec![2; edges],
        single(0),
        single(edges.saturating_sub(1)),
        (0..edges).map(|i| 1 + i % 2).collect(),
        (0..edges).map(|i| 2 - i % 2).collect(),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteOptions {
    /// Run only the tree section.
    pub trees_only: bool,
    /// Flip the sign of one circuit-matrix entry in the Fourier route of the
    /// agreement section; the suite must then report failures.
    pub inject_sign_flip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteRow {
    pub section: &'static str,
    pub pattern: String,
    pub group: String,
    pub set: String,
    pub check: String,
    pub method: Method,
    pub value: f64,
    pub reference: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub term_min: Option<f64>,
    pub term_imag_max: Option<f64>,
    pub cost: u128,
    pub status: &'static str,
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "pass").count()
    }

    /// CSV rows followed by the summary line `failures=N`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        let mut out = w.into_inner().map_err(|e| e.into_error())?;
        writeln!(out, "failures={}", self.failures())
    }
}

fn group(name: &str) -> AbelianGroup {
    name.parse().expect("suite group names are valid")
}

fn pattern(name: &str) -> SimpleGraph {
    builtin_graph(name).expect("suite pattern names are valid")
}

/// First nonzero entry in a column that at least two rows use. Negating an entry
/// of a column used by one row leaves the density unchanged, because `f^` is
/// real and even for symmetric sets.
fn shared_entry(l: &CircuitMatrix) -> Option<(usize, usize)> {
    (0..l.cols()).find_map(|j| {
        let used: Vec<usize> = (0..l.rows()).filter(|&i| l.entry(i, j) != 0).collect();
        (used.len() >= 2).then(|| (used[0], j))
    })
}

/// Fourier density of a bipartite pattern, optionally with one circuit-matrix
/// sign negated.
fn fourier_density(
    h: &SimpleGraph,
    s: &SymmetricSet,
    flip: bool,
) -> Result<(f64, u128), SidorenkoError> {
    let table = s.fourier();
    let mut value = 1.0;
    let mut cost = 0u128;
    let mut flipped = !flip;
    for comp in h.connected_components() {
        if comp.len() < 2 {
            continue;
        }
        let c = h.induced(&comp);
        let bip = c.is_bipartite().map_err(SidorenkoError::NotBipartite)?;
        let mut l: CircuitMatrix = circuit_matrix(&c, &bip)?;
        if !flipped {
            if let Some((i, j)) = shared_entry(&l) {
                l.set_entry(i, j, -l.entry(i, j))?;
                flipped = true;
            }
        }
        let d = fourier_sum(&l, &table)?;
        value *= d.value;
        cost += d.cost;
    }
    Ok((value, cost))
}

fn kernel_density(
    h: &SimpleGraph,
    s: &SymmetricSet,
    budget: u64,
) -> Result<(f64, u128), SidorenkoError> {
    let mut value = 1.0;
    let mut cost = 0u128;
    for comp in h.connected_components() {
        if comp.len() < 2 {
            continue;
        }
        let c = h.induced(&comp);
        let bip = c.is_bipartite().map_err(SidorenkoError::NotBipartite)?;
        let d = kernel_average(
            &circuit_matrix(&c, &bip)?,
            &signed_incidence(&c, &bip)?,
            s,
            budget,
        )?;
        value *= d.value;
        cost += d.cost;
    }
    Ok((value, cost))
}

struct Instance {
    group: String,
    set: SymmetricSet,
}

fn grid(groups: &[&str], max_size: usize) -> Vec<Instance> {
    groups
        .iter()
        .flat_map(|&name| {
            let g = group(name);
            symmetric_subsets(&g, max_size)
                .into_iter()
                .map(move |set| Instance {
                    group: name.to_string(),
                    set,
                })
        })
        .collect()
}

fn agreement_rows(
    name: &str,
    h: &SimpleGraph,
    inst: &Instance,
    flip: bool,
    budget: u64,
) -> Result<Vec<SuiteRow>, SidorenkoError> {
    let host = build_cayley(&inst.set);
    let brute = density_bruteforce(h, &host, budget.max(DEFAULT_BUDGET))?;
    let row = |check: &str, method, value: f64, cost| {
        let delta = (value - brute.value).abs();
        SuiteRow {
            section: "agreement",
            pattern: name.to_string(),
            group: inst.group.clone(),
            set: inst.set.literal(),
            check: check.to_string(),
            method,
            value,
            reference: brute.value,
            delta,
            tolerance: TAU_NUM,
            term_min: None,
            term_imag_max: None,
            cost,
            status: status(delta <= TAU_NUM),
        }
    };
    let (fv, fc) = fourier_density(h, &inst.set, flip)?;
    let mut rows = vec![row("fourier-vs-brute", Method::Fourier, fv, fc)];
    if power(inst.set.group().order(), h.vertex_count()) <= budget as u128 {
        let (kv, kc) = kernel_density(h, &inst.set, budget)?;
        rows.push(row("kernel-vs-brute", Method::Kernel, kv, kc));
    }
    Ok(rows)
}

fn theorem_rows(
    base: &str,
    plan: &SubdivisionPlan,
    inst: &Instance,
    budget: u64,
) -> Result<Vec<SuiteRow>, SidorenkoError> {
    let lengths = plan
        .lengths()
        .iter()
        .map(|m| (2 * m).to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let pattern = format!("{base}[{lengths}]");
    let r = check_even_subdivision(plan, &inst.set, budget)?;
    let term_min = r.term_min.unwrap_or(0.0);
    let term_imag = r.term_imag_max.unwrap_or(0.0);
    let ok = r.gap >= -TAU_SYM && term_min >= -TAU_SYM && term_imag <= TAU_SYM;
    let mut rows = vec![SuiteRow {
        section: "theorem",
        pattern: pattern.clone(),
        group: inst.group.clone(),
        set: inst.set.literal(),
        check: "gap".to_string(),
        method: r.method,
        value: r.t_h,
        reference: r.bound,
        delta: r.gap,
        tolerance: TAU_SYM,
        term_min: r.term_min,
        term_imag_max: r.term_imag_max,
        cost: r.cost,
        status: status(ok),
    }];
    if inst.set.is_empty() {
        return Ok(rows);
    }
    for eps in EPSILONS {
        let v = strictness_check(plan, &inst.set, eps, budget)?;
        rows.push(SuiteRow {
            section: "strictness",
            pattern: pattern.clone(),
            group: inst.group.clone(),
            set: inst.set.literal(),
            check: format!("epsilon={eps}"),
            method: Method::Fourier,
            value: v.t_h,
            reference: v.strengthened_bound,
            delta: v.max_ratio,
            tolerance: TAU_NUM,
            term_min: None,
            term_imag_max: None,
            cost: r.cost,
            status: status(v.passed),
        });
    }
    Ok(rows)
}

fn tree_row(
    edges: usize,
    idx: usize,
    t: &SimpleGraph,
    inst: &Instance,
    budget: u64,
) -> Result<SuiteRow, DensityError> {
    let d = density_bruteforce(t, &build_cayley(&inst.set), budget)?;
    let reference = edge_density(&inst.set).powi(edges as i32);
    let delta = (d.value - reference).abs();
    Ok(SuiteRow {
        section: "trees",
        pattern: format!("T{edges}.{idx}"),
        group: inst.group.clone(),
        set: inst.set.literal(),
        check: "edge-power".to_string(),
        method: Method::Bruteforce,
        value: d.value,
        reference,
        delta,
        tolerance: TAU_SYM,
        term_min: None,
        term_imag_max: None,
        cost: d.cost,
        status: status(delta <= TAU_SYM),
    })
}

/// Runs the suite on the current rayon pool.
pub fn run_suite(options: SuiteOptions, budget: u64) -> Result<SuiteReport, SidorenkoError> {
    let agreement_grid = grid(&AGREEMENT_GROUPS, MAX_SET_SIZE);
    let mut rows = Vec::new();

    if !options.trees_only {
        let patterns: Vec<(&str, SimpleGraph)> = AGREEMENT_PATTERNS
            .iter()
            .map(|&p| (p, pattern(p)))
            .collect();
        let jobs: Vec<(&str, &SimpleGraph, &Instance)> = patterns
            .iter()
            .flat_map(|(p, h)| agreement_grid.iter().map(move |inst| (*p, h, inst)))
            .collect();
        let parts = jobs
            .par_iter()
            .map(|&(p, h, inst)| agreement_rows(p, h, inst, options.inject_sign_flip, budget))
            .collect::<Result<Vec<_>, _>>()?;
        rows.extend(parts.into_iter().flatten());

        let theorem_grid = grid(&SMALL_GROUPS, usize::MAX);
        let plans: Vec<(&str, SubdivisionPlan)> = THEOREM_BASES
            .iter()
            .flat_map(|&b| {
                let base = pattern(b);
                length_vectors(base.edge_count())
                    .into_iter()
                    .map(move |lengths| {
                        (
                            b,
                            SubdivisionPlan::new(base.clone(), lengths).expect("positive lengths"),
                        )
                    })
            })
            .collect();
        let jobs: Vec<(&str, &SubdivisionPlan, &Instance)> = plans
            .iter()
            .flat_map(|(b, plan)| theorem_grid.iter().map(move |inst| (*b, plan, inst)))
            .collect();
        let parts = jobs
            .par_iter()
            .map(|&(b, plan, inst)| theorem_rows(b, plan, inst, budget))
            .collect::<Result<Vec<_>, _>>()?;
        rows.extend(parts.into_iter().flatten());
    }

    let trees: Vec<(usize, usize, SimpleGraph)> = (1..=MAX_TREE_EDGES)
        .flat_map(|e| {
            nonisomorphic_trees(e)
                .into_iter()
                .enumerate()
                .map(move |(i, t)| (e, i, t))
        })
        .collect();
    let jobs: Vec<(&(usize, usize, SimpleGraph), &Instance)> = trees
        .iter()
        .flat_map(|t| agreement_grid.iter().map(move |inst| (t, inst)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&((e, i, t), inst)| tree_row(*e, *i, t, inst, budget))
        .collect::<Result<Vec<_>, _>>()?;
    rows.extend(parts);

    Ok(SuiteReport { rows })
}
