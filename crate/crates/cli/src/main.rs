//! `cayhom`: command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on usage, parse or budget errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use cayhom::cayley::{spectrum, SymmetricSet};
use cayhom::circuit::{
    circuit_matrix, double_columns, oriented_circuit_matrix, oriented_incidence, signed_incidence,
    verify_kernel_image,
};
use cayhom::graphs::{
    builtin_graph, standard_subdivision, Bipartition, SimpleGraph, SubdivisionPlan,
};
use cayhom::group::{AbelianGroup, TAU_NUM};
use cayhom::homdensity::{density, DensityValue, MethodChoice, DEFAULT_BUDGET};
use cayhom::sidorenko::{
    check_even_subdivision, check_sidorenko, quasirandomness_report, search_extremal,
    strictness_check, SearchMode, DEFAULT_SEARCH_CAP,
};
use cayhom::suite::{run_suite, SuiteOptions};

const VERSION: &str = env!("CARGO_PKG_VERSION");

const PATTERN_HELP: &str = "\
Pattern: a path to an edge-list file or a builtin name.

Edge-list files: first line `n <count>`, then one `u v` pair per line
(0-indexed, whitespace-separated); `#` starts a comment. The order of the
lines is the edge (column) order and each pair is an orientation (tail, head).

Builtins (case-insensitive):
  K<n>      complete graph, edges (i,j) for i<j in lexicographic order
  C<n>      cycle, edges (0,1),(1,2),...,(n-1,0); n >= 3
  P<n>      path with n edges (0,1),...,(n-1,n)
  K<a>,<b>  complete bipartite, left side 0..a, right side a..a+b,
            edges (i,a+j) in lexicographic order
  Q3        3-cube on 0..8, edges (x, x|2^b) for bit b clear in x,
            ordered by x then b";

#[derive(Parser)]
#[command(
    name = "cayhom",
    version,
    about = "Homomorphism densities in abelian Cayley graphs and the Sidorenko check for even subdivisions"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Report format; json by default, csv for `search` and `suite`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads. Affects speed only, never values.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cap on elementary evaluations per instance.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seed for sampled searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Directory for reports when `--output` is absent; files are named
    /// `<command>-<config hash>.<format>`.
    #[arg(long, global = true, env = "CAYHOM_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Brute,
    Kernel,
    Fourier,
    Auto,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MatrixKind {
    /// Alternating circuit matrix (bipartite patterns).
    Circuit,
    /// Oriented cycle matrix (any connected pattern).
    Oriented,
    /// Signed incidence matrix across the bipartition.
    Incidence,
    /// Doubled oriented matrix of the half subdivision (needs --lengths).
    Doubled,
}

#[derive(Args, Serialize)]
struct HostArgs {
    /// Group, e.g. `Z4` or `Z2xZ2xZ3`.
    #[arg(long)]
    group: String,
    /// Connection set: `1,3` for cyclic groups, `(1,0);(0,1)` for products.
    #[arg(long, default_value = "")]
    set: String,
    /// Add the negative of every listed element.
    #[arg(long)]
    set_closure: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Homomorphism density t(H, Cay(G, S)).
    Density {
        #[arg(long, long_help = PATTERN_HELP)]
        pattern: String,
        #[command(flatten)]
        host: HostArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Sidorenko gap of a pattern, or of the even subdivision given by --lengths.
    Check {
        #[arg(long, long_help = PATTERN_HELP)]
        base: String,
        /// Half lengths m1,m2,... in edge order; edge i becomes a path of 2*m_i edges.
        #[arg(long)]
        lengths: Option<String>,
        #[command(flatten)]
        host: HostArgs,
        /// Also run the strictness and quasirandomness checks at this epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Circuit or incidence matrices, optionally verified over a group.
    Matrix {
        #[arg(long, long_help = PATTERN_HELP)]
        pattern: String,
        #[arg(long, value_enum, default_value = "circuit")]
        kind: MatrixKind,
        /// Half lengths for `--kind doubled`.
        #[arg(long)]
        lengths: Option<String>,
        /// Verify Im(M) = ker(L) over this group.
        #[arg(long)]
        verify: Option<String>,
    },
    /// Cayley graph eigenvalues, with a quasirandomness report if --epsilon is given.
    Spectrum {
        #[command(flatten)]
        host: HostArgs,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Rank symmetric sets of a given size by the density of an even subdivision.
    Search {
        #[arg(long)]
        group: String,
        #[arg(long, long_help = PATTERN_HELP)]
        base: String,
        #[arg(long)]
        lengths: Option<String>,
        /// Size of the connection sets.
        #[arg(long)]
        size: usize,
        /// Sample this many sets instead of enumerating all of them.
        #[arg(long)]
        samples: Option<usize>,
        /// Refuse exhaustive searches over more candidates than this.
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u64,
        /// Keep only the first N ranked sets.
        #[arg(long)]
        top: Option<usize>,
    },
    /// The fixed regression suite; one CSV row per instance and `failures=N`.
    Suite {
        /// Only the tree section.
        #[arg(long)]
        trees_only: bool,
        /// Test hook: corrupt one circuit-matrix sign in the Fourier route.
        #[arg(long)]
        inject_sign_flip: bool,
    },
}

/// A rendered report and whether every check in it passed.
struct Outcome {
    json: Value,
    csv: Option<String>,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    let config = config_value(&cli)?;
    let hash = config_hash(&config);
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = g.threads {
            if n == 0 {
                bail!("--threads must be positive");
            }
            b = b.num_threads(n);
        }
        b.build().context("building thread pool")?
    };
    let outcome = pool.install(|| execute(&cli.command, g))?;
    let format = g.format.unwrap_or(match cli.command {
        Command::Search { .. } | Command::Suite { .. } => Format::Csv,
        _ => Format::Json,
    });
    let header = format!("cayhom {VERSION} config={hash} seed={}", g.seed);
    let text = match format {
        Format::Json => {
            let mut obj = match outcome.json {
                Value::Object(m) => m,
                other => {
                    let mut m = Map::new();
                    m.insert("results".into(), other);
                    m
                }
            };
            obj.insert(
                "run".into(),
                json!({ "version": VERSION, "configHash": hash, "seed": g.seed }),
            );
            serde_json::to_string_pretty(&Value::Object(obj))? + "\n"
        }
        Format::Csv => {
            let body = match outcome.csv {
                Some(body) => body,
                None => bail!("this command has no CSV form; use --format json"),
            };
            format!("# {header}\n{body}")
        }
    };
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let target = g.output.clone().or_else(|| {
        g.output_dir
            .as_ref()
            .map(|d| d.join(format!("{}-{hash}.{ext}", command_name(&cli.command))))
    });
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("{header}\nreport: {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(outcome.passed)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Density { .. } => "density",
        Command::Check { .. } => "check",
        Command::Matrix { .. } => "matrix",
        Command::Spectrum { .. } => "spectrum",
        Command::Search { .. } => "search",
        Command::Suite { .. } => "suite",
    }
}

/// Everything that can influence a report: threads and output locations are
/// left out, and pattern files are replaced by their parsed edge lists.
fn config_value(cli: &Cli) -> Result<Value> {
    let g = &cli.global;
    let pat = |src: &str| -> Result<String> { Ok(load_pattern(src)?.to_edge_list()) };
    let args = match &cli.command {
        Command::Density {
            pattern,
            host,
            method,
        } => {
            json!({ "pattern": pat(pattern)?, "host": host, "method": method })
        }
        Command::Check {
            base,
            lengths,
            host,
            epsilon,
        } => {
            json!({ "base": pat(base)?, "lengths": lengths, "host": host, "epsilon": epsilon })
        }
        Command::Matrix {
            pattern,
            kind,
            lengths,
            verify,
        } => {
            json!({ "pattern": pat(pattern)?, "kind": kind, "lengths": lengths, "verify": verify })
        }
        Command::Spectrum { host, epsilon } => json!({ "host": host, "epsilon": epsilon }),
        Command::Search {
            group,
            base,
            lengths,
            size,
            samples,
            cap,
            top,
        } => json!({
            "group": group, "base": pat(base)?, "lengths": lengths, "size": size,
            "samples": samples, "cap": cap, "top": top,
        }),
        Command::Suite {
            trees_only,
            inject_sign_flip,
        } => {
            json!({ "treesOnly": trees_only, "injectSignFlip": inject_sign_flip })
        }
    };
    Ok(json!({
        "command": command_name(&cli.command),
        "args": args,
        "budget": g.budget,
        "seed": g.seed,
        "format": g.format,
        "version": VERSION,
    }))
}

fn config_hash(config: &Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    hex::encode(&digest[..8])
}

fn load_pattern(src: &str) -> Result<SimpleGraph> {
    let path = Path::new(src);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {src}"))?;
        return SimpleGraph::from_edge_list(&text).with_context(|| format!("parsing {src}"));
    }
    builtin_graph(src).with_context(|| format!("`{src}` is neither a file nor a builtin pattern"))
}

fn parse_group(spec: &str) -> Result<AbelianGroup> {
    spec.parse()
        .with_context(|| format!("invalid group `{spec}`"))
}

fn parse_host(h: &HostArgs) -> Result<SymmetricSet> {
    let group = parse_group(&h.group)?;
    SymmetricSet::parse(&group, &h.set, h.set_closure)
        .with_context(|| format!("invalid set `{}` for {group}", h.set))
}

fn parse_lengths(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("invalid length `{t}`"))
        })
        .collect()
}

fn plan_for(base: SimpleGraph, lengths: Option<&str>) -> Result<SubdivisionPlan> {
    Ok(match lengths {
        Some(l) => SubdivisionPlan::new(base, parse_lengths(l)?)?,
        None => SubdivisionPlan::uniform(base),
    })
}

fn csv_table<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn execute(cmd: &Command, g: &Global) -> Result<Outcome> {
    match cmd {
        Command::Density {
            pattern,
            host,
            method,
        } => {
            let h = load_pattern(pattern)?;
            let s = parse_host(host)?;
            let choices: &[MethodChoice] = match method {
                MethodArg::Brute => &[MethodChoice::Bruteforce],
                MethodArg::Kernel => &[MethodChoice::Kernel],
                MethodArg::Fourier => &[MethodChoice::Fourier],
                MethodArg::Auto => &[MethodChoice::Auto],
                MethodArg::All => &[
                    MethodChoice::Bruteforce,
                    MethodChoice::Kernel,
                    MethodChoice::Fourier,
                ],
            };
            let values = choices
                .iter()
                .map(|&c| density(&h, &s, c, g.budget))
                .collect::<Result<Vec<DensityValue>, _>>()?;
            let csv = csv_table(&values)?;
            if let [v] = values.as_slice() {
                return Ok(Outcome {
                    json: serde_json::to_value(v)?,
                    csv: Some(csv),
                    passed: true,
                });
            }
            let mut deltas = Map::new();
            let mut max_delta = 0.0f64;
            for i in 0..values.len() {
                for j in i + 1..values.len() {
                    let d = (values[i].value - values[j].value).abs();
                    max_delta = max_delta.max(d);
                    deltas.insert(
                        format!("{}-{}", values[i].method, values[j].method),
                        json!(d),
                    );
                }
            }
            let passed = max_delta <= TAU_NUM;
            Ok(Outcome {
                json: json!({
                    "values": values,
                    "deltas": deltas,
                    "maxDelta": max_delta,
                    "tolerance": TAU_NUM,
                    "verdict": if passed { "pass" } else { "fail" },
                }),
                csv: Some(csv),
                passed,
            })
        }
        Command::Check {
            base,
            lengths,
            host,
            epsilon,
        } => {
            let h0 = load_pattern(base)?;
            let s = parse_host(host)?;
            let mut passed;
            let mut obj;
            match lengths {
                Some(l) => {
                    let plan = plan_for(h0, Some(l))?;
                    let r = check_even_subdivision(&plan, &s, g.budget)?;
                    passed = r.verdict.is_pass();
                    obj = serde_json::to_value(&r)?;
                    if let Some(eps) = epsilon {
                        let v = strictness_check(&plan, &s, *eps, g.budget)?;
                        passed &= v.passed;
                        obj["strictness"] = serde_json::to_value(&v)?;
                    }
                }
                None => {
                    let r = check_sidorenko(&h0, &s, g.budget)?;
                    passed = r.verdict.is_pass();
                    obj = serde_json::to_value(&r)?;
                }
            }
            if let Some(eps) = epsilon {
                obj["quasirandomness"] = serde_json::to_value(quasirandomness_report(&s, *eps)?)?;
            }
            let mut row = obj.clone();
            if let Value::Object(m) = &mut row {
                m.retain(|_, v| !v.is_object());
            }
            let csv = json_row_csv(&row)?;
            Ok(Outcome {
                json: obj,
                csv: Some(csv),
                passed,
            })
        }
        Command::Matrix {
            pattern,
            kind,
            lengths,
            verify,
        } => {
            let h = load_pattern(pattern)?;
            let (matrix, incidence) = match kind {
                MatrixKind::Circuit | MatrixKind::Incidence => {
                    let bip = h
                        .is_bipartite()
                        .map_err(|w| anyhow::anyhow!("pattern is not bipartite: {w}"))?;
                    (circuit_matrix(&h, &bip)?, signed_incidence(&h, &bip)?)
                }
                MatrixKind::Oriented => (oriented_circuit_matrix(&h)?, oriented_incidence(&h)),
                MatrixKind::Doubled => {
                    let plan = plan_for(h, lengths.as_deref())?;
                    // Columns follow the standard subdivision of the half subdivision;
                    // original vertices form the W side, midpoints the U side.
                    let h1 = plan.half_subdivision();
                    let full = standard_subdivision(&h1);
                    let sides = (0..full.vertex_count())
                        .map(|v| v < h1.vertex_count())
                        .collect();
                    let m = signed_incidence(&full, &Bipartition::from_sides(sides))?;
                    (double_columns(&oriented_circuit_matrix(&h1)?), m)
                }
            };
            let (mut obj, rows) = if *kind == MatrixKind::Incidence {
                (json!({ "incidence": incidence }), incidence.to_rows())
            } else {
                (json!({ "matrix": matrix }), matrix.to_rows())
            };
            let mut passed = true;
            if let Some(spec) = verify {
                let group = parse_group(spec)?;
                let v = verify_kernel_image(&matrix, &incidence, &group, g.budget)?;
                passed = v.passed();
                obj["kernelImage"] = serde_json::to_value(&v)?;
            }
            let csv = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                        + "\n"
                })
                .collect();
            Ok(Outcome {
                json: obj,
                csv: Some(csv),
                passed,
            })
        }
        Command::Spectrum { host, epsilon } => {
            let s = parse_host(host)?;
            let sp = spectrum(&s);
            let mut obj = serde_json::to_value(&sp)?;
            let mut passed = true;
            if let Some(eps) = epsilon {
                let q = quasirandomness_report(&s, *eps)?;
                passed = q.is_quasirandom();
                obj["quasirandomness"] = serde_json::to_value(&q)?;
            }
            #[derive(Serialize)]
            struct Row {
                character: String,
                eigenvalue: f64,
            }
            let rows: Vec<Row> = sp
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(a, &eigenvalue)| Row {
                    character: s.group().element_at(a).to_string(),
                    eigenvalue,
                })
                .collect();
            Ok(Outcome {
                json: obj,
                csv: Some(csv_table(&rows)?),
                passed,
            })
        }
        Command::Search {
            group,
            base,
            lengths,
            size,
            samples,
            cap,
            top,
        } => {
            let group = parse_group(group)?;
            let plan = plan_for(load_pattern(base)?, lengths.as_deref())?;
            let mode = match samples {
                Some(count) => SearchMode::Sample {
                    count: *count,
                    seed: g.seed,
                },
                None => SearchMode::Exhaustive,
            };
            let mut ranked = search_extremal(&group, &plan, *size, mode, *cap, g.budget)?;
            if let Some(n) = top {
                ranked.truncate(*n);
            }
            Ok(Outcome {
                json: serde_json::to_value(&ranked)?,
                csv: Some(csv_table(&ranked)?),
                passed: true,
            })
        }
        Command::Suite {
            trees_only,
            inject_sign_flip,
        } => {
            let options = SuiteOptions {
                trees_only: *trees_only,
                inject_sign_flip: *inject_sign_flip,
            };
            let report = run_suite(options, g.budget)?;
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            let failures = report.failures();
            Ok(Outcome {
                json: json!({ "rows": report.rows, "failures": failures }),
                csv: Some(String::from_utf8(buf)?),
                passed: failures == 0,
            })
        }
    }
}

/// One-row CSV from a flat JSON object, columns in key order.
fn json_row_csv(row: &Value) -> Result<String> {
    let Value::Object(m) = row else {
        bail!("expected an object");
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(m.keys())?;
    w.write_record(m.values().map(|v| match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }))?;
    Ok(String::from_utf8(w.into_inner()?)?)
}
