//! Batch command-line surface. Data goes to the output writer (or `--output`);
//! timings and failure records go to the error writer, one JSON object per line.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::bounds::{self, shape_bounds, BoundValue};
use crate::distinguish::{
    channel_digraph, composition_class_nu, neighborhood_claim, nu, Channel, Composition, DEFAULT_BLOCK_CAP,
};
use crate::enumeration::{
    covering_census, hamilton_cycles, members_containing, near_matchings, partitions, pattern_for_shape,
    perfect_matchings, PartitionShape, Universe,
};
use crate::error::Error;
use crate::families::{
    greedy_family, incompatible_count, is_inclusion_maximal, max_family_exact, sandwich, verify_family, Relation,
    SolveOptions, SolveStatus,
};
use crate::graph::{DoublingPredicate, LabeledGraph, MAX_VERTICES};
use crate::interval::Interval;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

const DIGITS: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "doubling", version, about = "Degree-doubling families: enumeration, extremal search and bounds")]
struct Cli {
    /// Worker threads for pairwise evaluation; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump a universe in canonical order.
    Enumerate(UniverseCmd),
    /// Greedy family over a universe.
    Greedy(SearchCmd),
    /// Maximum family by clique search.
    Exact(SearchCmd),
    /// Table of closed-form counts and bounds.
    Bounds(BoundsCmd),
    /// Formula-versus-oracle checks.
    Verify(VerifyCmd),
    /// Pairwise distinguishable copies of a graph.
    Nu(NuCmd),
    /// Constant-composition datapoints for a channel.
    CapacityDemo(CapacityCmd),
    /// Cycle and path maxima compared.
    Thm3(Thm3Cmd),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum UniverseKind {
    HamiltonCycles,
    HamiltonPaths,
    TwoRegular,
    TwoRegularShape,
    CopiesOf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Eq1,
    Near,
    Coverings,
    Uniformity,
    Thm2Shapes,
    Partitions,
}

/// A single `n` or an inclusive range `a..=b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct NRange {
    lo: usize,
    hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{s}` is not `n` or `a..=b`"));
        let (lo, hi) = match s.split_once("..=") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        Ok(NRange { lo, hi })
    }
}

impl NRange {
    fn values(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write data here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct UniverseArgs {
    #[arg(long, value_enum, default_value = "hamilton-cycles")]
    universe: UniverseKind,
    /// Vertex count, or an inclusive range `a..=b`.
    #[arg(long)]
    n: Option<NRange>,
    /// Partition such as `(4,3)` for the two-regular-shape universe.
    #[arg(long)]
    shape: Option<String>,
    /// Edge list such as `1-2,2-3` for the copies-of universe.
    #[arg(long)]
    graph: Option<String>,
    /// Allow sizes beyond the safe ranges.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct UniverseCmd {
    #[command(flatten)]
    universe: UniverseArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SearchCmd {
    #[command(flatten)]
    universe: UniverseArgs,
    /// `maxdeg:d` or `avgdeg:a` (a rational such as `9/2`).
    #[arg(long, default_value = "maxdeg:4")]
    predicate: DoublingPredicate,
    /// Time limit in seconds.
    #[arg(long, default_value_t = 300.0)]
    budget: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BoundsCmd {
    #[arg(long, default_value = "3..=16")]
    n: NRange,
    /// Working precision in bits for irrational quantities.
    #[arg(long, default_value_t = 128)]
    precision: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyCmd {
    #[arg(long, value_enum)]
    check: Check,
    #[arg(long)]
    n: NRange,
    /// Restrict thm2-shapes to one partition such as `(4,3)`.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long, default_value_t = 300.0)]
    budget: f64,
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct NuCmd {
    /// Edge list such as `1-2,2-3`; needs `--n`.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Hamilton cycle `1-2-...-k-1`.
    #[arg(long)]
    cycle: Option<usize>,
    /// Test "no two vertices with disjoint neighborhoods implies nu = 1" on all
    /// graphs up to this order.
    #[arg(long)]
    claim: Option<usize>,
    #[arg(long, default_value_t = 300.0)]
    budget: f64,
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CapacityCmd {
    /// CSV matrix: header of output symbols, one row per input symbol.
    #[arg(long)]
    channel: Option<PathBuf>,
    /// Identity channel on this many symbols.
    #[arg(long)]
    noiseless: Option<usize>,
    /// Symbol counts such as `1,1`; all compositions up to the block cap if absent.
    #[arg(long)]
    composition: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BLOCK_CAP)]
    max_block: usize,
    #[arg(long, default_value_t = 300.0)]
    budget: f64,
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct Thm3Cmd {
    #[arg(long, default_value = "4..=5")]
    n: NRange,
    #[arg(long, default_value = "maxdeg:4")]
    predicate: DoublingPredicate,
    #[arg(long, default_value_t = 300.0)]
    budget: f64,
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    output: OutputArgs,
}

/// Tabular data with an optional richer JSON-lines rendering.
struct Output {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    jsonl: Option<Vec<Value>>,
}

impl Output {
    fn new(columns: Vec<&'static str>) -> Self {
        Output {
            columns,
            rows: Vec::new(),
            jsonl: None,
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Jsonl => match &self.jsonl {
                Some(lines) => lines.iter().map(|v| format!("{v}\n")).collect(),
                None => self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
                        format!("{}\n", Value::Object(obj))
                    })
                    .collect(),
            },
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row.iter().map(cell)).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
            }
            Format::Table => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|i| cells.iter().map(|r| r[i].len()).chain([self.columns[i].len()]).max().unwrap_or(0))
                    .collect();
                let line = |items: Vec<&str>| {
                    let s = items.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).join("  ");
                    format!("{}\n", s.trim_end())
                };
                let mut out = line(self.columns.clone());
                for r in &cells {
                    out.push_str(&line(r.iter().map(String::as_str).collect()));
                }
                out
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn edges_text(g: &LabeledGraph) -> String {
    g.edges().map(|(u, v)| format!("{u}-{v}")).join(" ")
}

fn interval_cells(iv: &Interval) -> [Value; 2] {
    let (lo, hi) = iv.decimal_bounds(DIGITS);
    [json!(lo), json!(hi)]
}

/// What a subcommand produced besides its data.
#[derive(Default)]
struct Report {
    failures: Vec<Value>,
    budget_exhausted: bool,
    metadata: Map<String, Value>,
}

enum CliError {
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<(Output, Report), CliError>;

fn budget(secs: f64) -> std::result::Result<Duration, CliError> {
    if !(secs > 0.0) || !secs.is_finite() {
        return Err(CliError::Usage(format!("--budget must be a positive number of seconds, got {secs}")));
    }
    Ok(Duration::from_secs_f64(secs))
}

fn guard(what: &str, n: usize, limit: usize, force: bool, err: &mut dyn Write) -> std::result::Result<(), CliError> {
    if n > MAX_VERTICES {
        return Err(CliError::Usage(format!("n = {n} exceeds the supported maximum {MAX_VERTICES}")));
    }
    if n > limit {
        if !force {
            return Err(CliError::Usage(format!(
                "n = {n} is beyond the safe range for {what} (n <= {limit}); pass --force to run anyway"
            )));
        }
        let _ = writeln!(err, "{}", json!({"warning": format!("{what} at n = {n} is beyond the safe range n <= {limit}")}));
    }
    Ok(())
}

fn parse_graph(n: usize, text: &str) -> std::result::Result<LabeledGraph, CliError> {
    let edges = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once('-')
                .ok_or_else(|| CliError::Usage(format!("edge `{t}` is not `u-v`")))?;
            let a = a.parse().map_err(|_| CliError::Usage(format!("bad vertex in `{t}`")))?;
            let b = b.parse().map_err(|_| CliError::Usage(format!("bad vertex in `{t}`")))?;
            Ok((a, b))
        })
        .collect::<std::result::Result<Vec<(usize, usize)>, CliError>>()?;
    Ok(LabeledGraph::new(n, &edges)?)
}

/// The universes selected by the arguments, one per `n`.
fn universes(args: &UniverseArgs, err: &mut dyn Write) -> std::result::Result<Vec<Universe>, CliError> {
    let need_n = || args.n.ok_or_else(|| CliError::Usage("--n is required for this universe".into()));
    let out = match args.universe {
        UniverseKind::HamiltonCycles => need_n()?.values().map(Universe::HamiltonCycles).collect_vec(),
        UniverseKind::HamiltonPaths => need_n()?.values().map(Universe::HamiltonPaths).collect_vec(),
        UniverseKind::TwoRegular => need_n()?.values().map(Universe::TwoRegular).collect_vec(),
        UniverseKind::TwoRegularShape => {
            let text = args.shape.as_deref().ok_or_else(|| CliError::Usage("--shape is required".into()))?;
            let p = PartitionShape::from_str(text)?;
            p.check_two_regular()?;
            if let Some(r) = args.n {
                if r.lo != p.n() || r.hi != p.n() {
                    return Err(CliError::Usage(format!("--n disagrees with shape {p}")));
                }
            }
            vec![Universe::TwoRegularShape(p)]
        }
        UniverseKind::CopiesOf => {
            let text = args.graph.as_deref().ok_or_else(|| CliError::Usage("--graph is required".into()))?;
            let r = need_n()?;
            if r.lo != r.hi {
                return Err(CliError::Usage("copies-of takes a single --n".into()));
            }
            vec![Universe::CopiesOf(parse_graph(r.lo, text)?)]
        }
    };
    for u in &out {
        let (what, limit) = match u {
            Universe::HamiltonCycles(_) => ("hamilton-cycles", 8),
            Universe::HamiltonPaths(_) => ("hamilton-paths", 7),
            Universe::TwoRegular(_) | Universe::TwoRegularShape(_) => ("two-regular", 8),
            Universe::CopiesOf(_) => ("copies-of", 8),
        };
        guard(what, u.n(), limit, args.force, err)?;
    }
    Ok(out)
}

fn cmd_enumerate(c: &UniverseCmd, err: &mut dyn Write) -> CmdResult {
    let mut out = Output::new(vec!["universe", "n", "index", "edges"]);
    let mut lines = Vec::new();
    for u in universes(&c.universe, err)? {
        let members = u.sorted_members()?;
        lines.push(json!({"n": u.n(), "universe": u.tag(), "size": members.len()}));
        for (i, g) in members.iter().enumerate() {
            lines.push(serde_json::to_value(g).expect("graphs serialize"));
            out.push(vec![json!(u.tag()), json!(u.n()), json!(i), json!(edges_text(g))]);
        }
    }
    out.jsonl = Some(lines);
    Ok((out, Report::default()))
}

fn cmd_greedy(c: &SearchCmd, err: &mut dyn Write) -> CmdResult {
    let mut out = Output::new(vec!["universe", "n", "predicate", "index", "edges"]);
    let mut lines = Vec::new();
    let mut report = Report::default();
    let relation = Relation::Doubling(c.predicate);
    for u in universes(&c.universe, err)? {
        let candidates = u.sorted_members()?;
        let fam = greedy_family(candidates.iter().copied(), relation, u.clone())?;
        let check = verify_family(&fam);
        if !check.valid || !is_inclusion_maximal(&fam, &candidates) {
            report.failures.push(json!({
                "check": "greedy",
                "n": u.n(),
                "expected": "valid and inclusion-maximal family",
                "valid": check.valid,
                "failing_pair": check.failing_pair,
            }));
        }
        lines.push(fam.header());
        for (i, g) in fam.members().iter().enumerate() {
            lines.push(serde_json::to_value(g).expect("graphs serialize"));
            out.push(vec![json!(u.tag()), json!(u.n()), json!(c.predicate.to_string()), json!(i), json!(edges_text(g))]);
        }
    }
    out.jsonl = Some(lines);
    Ok((out, report))
}

fn cmd_exact(c: &SearchCmd, err: &mut dyn Write) -> CmdResult {
    let limit = budget(c.budget)?;
    let mut out = Output::new(vec!["universe", "n", "predicate", "value", "status", "nodes_explored", "witness"]);
    let mut lines = Vec::new();
    let mut report = Report::default();
    let mut timings = Vec::new();
    let relation = Relation::Doubling(c.predicate);
    for u in universes(&c.universe, err)? {
        let candidates = u.sorted_members()?;
        let opts = SolveOptions {
            budget: limit,
            vertex_transitive: u.is_single_orbit(),
        };
        let r = max_family_exact(&candidates, relation, u.clone(), opts)?;
        if r.status == SolveStatus::LowerBound {
            report.budget_exhausted = true;
        }
        timings.push(json!({"n": u.n(), "elapsed_ms": r.elapsed.as_millis() as u64}));
        let mut line = r.to_json();
        line["n"] = json!(u.n());
        lines.push(line);
        out.push(vec![
            json!(u.tag()),
            json!(u.n()),
            json!(c.predicate.to_string()),
            json!(r.value),
            json!(r.status.to_string()),
            json!(r.nodes_explored),
            json!(r.witness.members().iter().map(edges_text).join("; ")),
        ]);
    }
    out.jsonl = Some(lines);
    report.metadata.insert("solves".into(), json!(timings));
    Ok((out, report))
}

fn cmd_bounds(c: &BoundsCmd) -> CmdResult {
    if c.n.lo < 3 {
        return Err(CliError::Usage("bounds start at n = 3".into()));
    }
    if c.precision == 0 || c.precision > crate::interval::MAX_PRECISION {
        return Err(CliError::Usage(format!("--precision must be in 1..={}", crate::interval::MAX_PRECISION)));
    }
    let mut out = Output::new(vec![
        "n", "eq1", "near", "q_upper", "q_upper_weak", "q_lower_lo", "q_lower_hi", "eq3", "final_lo", "final_hi",
        "r_lower", "r_upper_lo", "r_upper_hi", "p_n", "hr_lo", "hr_hi", "hr_holds",
    ]);
    let bits = c.precision;
    for n in c.n.values() {
        let n64 = n as u64;
        let t1 = bounds::theorem1_bounds(n64, bits)?;
        let t2 = bounds::theorem2_bounds(n64, bits)?;
        let p = bounds::partition_count(n64);
        let hr = bounds::hardy_ramanujan(n64, bits);
        let holds = bounds::strictly_below(&p, |b| bounds::hardy_ramanujan(n64, b));
        let opt = |r: crate::Result<BigInt>| r.map(|v| json!(v.to_string())).unwrap_or(Value::Null);
        let [ql, qh] = interval_cells(&t1.lower);
        let [fl, fh] = interval_cells(&bounds::final_bound(n64, bits));
        let [rl, rh] = interval_cells(&t2.upper);
        let [hl, hh] = interval_cells(&hr);
        out.push(vec![
            json!(n),
            opt(bounds::eq1_count(n64)),
            opt(bounds::near_count(n64)),
            json!(t1.upper.to_string()),
            json!(t1.upper_weak.to_string()),
            ql,
            qh,
            json!(bounds::eq3_bound(n64).to_string()),
            fl,
            fh,
            json!(t2.lower.to_string()),
            rl,
            rh,
            json!(p.to_string()),
            hl,
            hh,
            json!(holds),
        ]);
    }
    Ok((out, Report::default()))
}

/// One formula-versus-oracle comparison.
struct Comparison {
    check: &'static str,
    n: usize,
    case: String,
    expected: String,
    formula: String,
    oracle: String,
    relation: &'static str,
    holds: Option<bool>,
    asserted: bool,
}

impl Comparison {
    fn row(&self) -> Vec<Value> {
        vec![
            json!(self.check),
            json!(self.n),
            json!(self.case),
            json!(self.expected),
            json!(self.formula),
            json!(self.oracle),
            json!(self.relation),
            json!(self.holds),
            json!(self.asserted),
            json!(!self.asserted && self.holds == Some(false)),
        ]
    }

    fn failure(&self) -> Value {
        json!({
            "check": self.check,
            "n": self.n,
            "case": self.case,
            "expected": self.expected,
            "formula": self.formula,
            "oracle": self.oracle,
            "relation": self.relation,
        })
    }
}

fn cmp_bound(oracle: &BigInt, relation: &str, bound: &BoundValue) -> Option<bool> {
    use std::cmp::Ordering::*;
    let ord = bound.cmp_integer(oracle)?;
    Some(match relation {
        "=" => ord == Equal,
        "<=" => ord != Less,
        ">=" => ord != Greater,
        "<" => ord == Greater,
        _ => unreachable!("known relations only"),
    })
}

fn bound_text(b: &BoundValue) -> String {
    match b {
        BoundValue::Interval(iv) => {
            let (lo, hi) = iv.decimal_bounds(DIGITS);
            format!("[{lo}, {hi}]")
        }
        other => other.to_string(),
    }
}

fn rational_bound(q: &BigRational) -> BoundValue {
    BoundValue::Rational(q.clone())
}

fn fixed_near_matching(n: usize) -> crate::Result<LabeledGraph> {
    let mut edges = vec![(1, 2), (2, 3)];
    edges.extend((4..n).step_by(2).map(|v| (v, v + 1)));
    LabeledGraph::new(n, &edges)
}

fn fixed_matching(n: usize) -> crate::Result<LabeledGraph> {
    LabeledGraph::new(n, &(1..n).step_by(2).map(|v| (v, v + 1)).collect_vec())
}

fn verify_n(
    check: Check,
    n: usize,
    only: Option<&PartitionShape>,
    limit: Duration,
    report: &mut Report,
) -> std::result::Result<Vec<Comparison>, CliError> {
    let n64 = n as u64;
    let mut out = Vec::new();
    let mut cmp = |case: String, expected: &str, formula: BoundValue, oracle: BigInt, relation: &'static str, asserted: bool| {
        let holds = cmp_bound(&oracle, relation, &formula);
        out.push(Comparison {
            check: match check {
                Check::Eq1 => "eq1",
                Check::Near => "near",
                Check::Coverings => "coverings",
                Check::Uniformity => "uniformity",
                Check::Thm2Shapes => "thm2-shapes",
                Check::Partitions => "partitions",
            },
            n,
            case,
            expected: expected.to_string(),
            formula: bound_text(&formula),
            oracle: oracle.to_string(),
            relation,
            holds,
            asserted,
        });
    };
    match check {
        Check::Eq1 => {
            let formula = bounds::eq1_count(n64)?;
            let p = fixed_matching(n)?;
            let oracle = members_containing(&p, &Universe::HamiltonCycles(n))?.count();
            cmp(edges_text(&p), "(n/2)! 2^(n/2) / n", BoundValue::Integer(formula), oracle.into(), "=", true);
        }
        Check::Near => {
            let formula = bounds::near_count(n64)?;
            let p = fixed_near_matching(n)?;
            let oracle = members_containing(&p, &Universe::HamiltonCycles(n))?.count();
            cmp(edges_text(&p), "floor(n/2)! 2^floor(n/2) / (n-1)", BoundValue::Integer(formula), oracle.into(), "=", true);
        }
        Check::Coverings => {
            let host = LabeledGraph::cycle(n, &(1..=n).collect_vec())?;
            let census = covering_census(&host)?;
            let s_range = n.div_ceil(3)..=n / 2;
            for s in s_range.clone().chain(census.keys().copied().filter(|s| !s_range.contains(s))) {
                let oracle = census.get(&s).copied().unwrap_or(0);
                let formula = bounds::covering_formula(n64, s as u64);
                cmp(format!("s={s}"), "C(s, n-2s)", BoundValue::Integer(formula), oracle.into(), "=", false);
            }
            let incompatible: BigInt = incompatible_count(&host, &DoublingPredicate::default())?.into();
            cmp(
                "incompatible".into(),
                "(1+sqrt 2)^n floor(n/2)!",
                BoundValue::Interval(bounds::final_bound(n64, 64)),
                incompatible.clone(),
                "<=",
                true,
            );
            cmp(
                "incompatible".into(),
                "sum_s C(s, n-2s) 2^s (s-1)!",
                BoundValue::Integer(bounds::eq3_bound(n64)),
                incompatible,
                "<=",
                false,
            );
        }
        Check::Uniformity => {
            let (patterns, label): (Vec<LabeledGraph>, &str) = if n % 2 == 0 {
                (perfect_matchings(n)?.collect(), "perfect matchings per cycle")
            } else {
                (near_matchings(n)?.collect(), "near-matchings per cycle")
            };
            let counts: Vec<usize> = hamilton_cycles(n)?
                .map(|c| patterns.iter().filter(|p| c.contains_subgraph(p)).count())
                .collect();
            let (min, max) = counts.iter().copied().minmax().into_option().unwrap_or((0, 0));
            if n % 2 == 0 {
                for (case, v) in [("min", min), ("max", max)] {
                    cmp(format!("{label} ({case})"), "2", BoundValue::Integer(2.into()), v.into(), "=", true);
                }
            } else {
                cmp(format!("{label} (max)"), "min over cycles", BoundValue::Integer(min.into()), max.into(), "=", true);
            }
        }
        Check::Thm2Shapes => {
            let shapes: Vec<PartitionShape> = partitions(n, 3).filter(|p| only.is_none_or(|o| o == p)).collect();
            for p in shapes {
                let b = shape_bounds(&p)?;
                let u = Universe::TwoRegularShape(p.clone());
                let members = u.sorted_members()?;
                let fixed = pattern_for_shape(&p)?;
                let class = members.iter().filter(|g| g.contains_subgraph(&fixed)).count();
                let case = p.to_string();
                cmp(case.clone(), "|F(p)| <= n!/(t! 2^t prod n_i)", rational_bound(&b.f_upper), members.len().into(), "<=", true);
                cmp(case.clone(), "|C(p)| >= (k+l)!/(n t! prod n_i)", rational_bound(&b.c_lower), class.into(), ">=", true);
                let opts = SolveOptions {
                    budget: limit,
                    vertex_transitive: true,
                };
                let r = max_family_exact(&members, Relation::default(), u, opts)?;
                if r.status == SolveStatus::LowerBound {
                    report.budget_exhausted = true;
                }
                cmp(case.clone(), "M(F(p)) <= n n!/floor(n/3)!", rational_bound(&b.m_upper), r.value.into(), "<=", true);
                cmp(case.clone(), "M(F(p)) <= n n!/(k+l)!", rational_bound(&b.m_upper_shape), r.value.into(), "<=", true);
                cmp(
                    case,
                    "n <= 3(k+l)",
                    BoundValue::Integer((3 * (b.k + b.l)).into()),
                    n.into(),
                    "<=",
                    true,
                );
            }
        }
        Check::Partitions => {
            let p = bounds::partition_count(n64);
            let listed = partitions(n, 1).count();
            cmp("recurrence".into(), "pentagonal recurrence", BoundValue::Integer(p.clone()), listed.into(), "=", true);
            let holds = bounds::strictly_below(&p, |b| bounds::hardy_ramanujan(n64, b));
            let hr = bounds::hardy_ramanujan(n64, 64);
            out.push(Comparison {
                check: "partitions",
                n,
                case: "hardy-ramanujan".into(),
                expected: "p(n) < e^(sqrt n)/n".into(),
                formula: bound_text(&BoundValue::Interval(hr)),
                oracle: p.to_string(),
                relation: "<",
                holds,
                asserted: false,
            });
        }
    }
    Ok(out)
}

fn cmd_verify(c: &VerifyCmd, err: &mut dyn Write) -> CmdResult {
    let limit = budget(c.budget)?;
    let (limit_n, parity): (usize, Option<usize>) = match c.check {
        Check::Eq1 => (8, Some(0)),
        Check::Near => (9, Some(1)),
        Check::Coverings | Check::Uniformity => (8, None),
        Check::Thm2Shapes => (7, None),
        Check::Partitions => (80, None),
    };
    let min_n = match c.check {
        Check::Eq1 => 4,
        Check::Near => 5,
        Check::Uniformity => 4,
        Check::Coverings | Check::Thm2Shapes => 3,
        Check::Partitions => 1,
    };
    let ns: Vec<usize> = c
        .n
        .values()
        .filter(|n| *n >= min_n && parity.is_none_or(|p| n % 2 == p))
        .collect();
    if ns.is_empty() {
        return Err(CliError::Usage(format!("no n in the range suits check {:?}", c.check)));
    }
    let mut out = Output::new(vec![
        "check", "n", "case", "expected", "formula", "oracle", "relation", "holds", "asserted", "discrepancy",
    ]);
    let only = match &c.shape {
        Some(text) if c.check == Check::Thm2Shapes => Some(PartitionShape::from_str(text)?),
        Some(_) => return Err(CliError::Usage("--shape only applies to thm2-shapes".into())),
        None => None,
    };
    let mut report = Report::default();
    for n in ns {
        if c.check != Check::Partitions {
            guard("verify", n, limit_n, c.force, err)?;
        } else if n > limit_n && !c.force {
            return Err(CliError::Usage(format!("partitions check limited to n <= {limit_n}; pass --force")));
        }
        for comp in verify_n(c.check, n, only.as_ref(), limit, &mut report)? {
            if comp.asserted && comp.holds != Some(true) {
                report.failures.push(comp.failure());
            }
            out.push(comp.row());
        }
    }
    Ok((out, report))
}

fn cmd_nu(c: &NuCmd, err: &mut dyn Write) -> CmdResult {
    let limit = budget(c.budget)?;
    if let Some(max_n) = c.claim {
        guard("neighborhood claim", max_n, 5, c.force, err)?;
        let claim = neighborhood_claim(max_n, limit)?;
        let mut out = Output::new(vec!["reading", "n", "graph", "nu"]);
        for (reading, list) in [
            ("distinct-pairs", &claim.distinct_pair_counterexamples),
            ("pairs-with-equal", &claim.any_pair_counterexamples),
        ] {
            for (g, v) in list {
                out.push(vec![json!(reading), json!(g.n()), json!(edges_text(g)), json!(v)]);
            }
        }
        let mut report = Report::default();
        report.metadata.insert("graphs_checked".into(), json!(claim.graphs_checked));
        return Ok((out, report));
    }
    let g = match (c.cycle, &c.graph) {
        (Some(k), None) => LabeledGraph::cycle(k, &(1..=k).collect_vec())?,
        (None, Some(text)) => {
            let n = c.n.ok_or_else(|| CliError::Usage("--graph needs --n".into()))?;
            parse_graph(n, text)?
        }
        _ => return Err(CliError::Usage("give exactly one of --cycle, --graph or --claim".into())),
    };
    guard("nu", g.n(), 7, c.force, err)?;
    let r = nu(&g, limit)?;
    let mut report = Report::default();
    if r.report.status == SolveStatus::LowerBound {
        report.budget_exhausted = true;
    }
    report.metadata.insert("elapsed_ms".into(), json!(r.report.elapsed.as_millis() as u64));
    let mut out = Output::new(vec!["n", "graph", "value", "status", "copies", "nodes_explored", "isolated_vertices"]);
    out.push(vec![
        json!(g.n()),
        json!(edges_text(&g)),
        json!(r.report.value),
        json!(r.report.status.to_string()),
        json!(r.copies),
        json!(r.report.nodes_explored),
        json!(r.isolated_vertices.iter().join(" ")),
    ]);
    let mut line = r.to_json();
    line["n"] = json!(g.n());
    out.jsonl = Some(vec![line]);
    Ok((out, report))
}

/// Count vectors of length `k` summing to `m`, lexicographically decreasing.
fn compositions(k: usize, m: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![m]];
    }
    (0..=m)
        .rev()
        .flat_map(|first| {
            compositions(k - 1, m - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn cmd_capacity(c: &CapacityCmd, err: &mut dyn Write) -> CmdResult {
    let limit = budget(c.budget)?;
    let w = match (&c.channel, c.noiseless) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Channel::from_csv(&text)?
        }
        (None, Some(k)) => Channel::noiseless(k)?,
        _ => return Err(CliError::Usage("give exactly one of --channel or --noiseless".into())),
    };
    let symbols = w.inputs().len() + w.outputs().len();
    guard("channel alphabets", symbols, 12, c.force, err)?;
    if c.max_block > DEFAULT_BLOCK_CAP && !c.force {
        return Err(CliError::Usage(format!(
            "block length {} exceeds the default cap {DEFAULT_BLOCK_CAP}; pass --force",
            c.max_block
        )));
    }
    let comps: Vec<Composition> = match &c.composition {
        Some(text) => vec![Composition::from_str(text)?],
        None => (1..=c.max_block)
            .flat_map(|m| compositions(w.inputs().len(), m))
            .map(Composition::new)
            .collect::<crate::Result<_>>()?,
    };
    let d = channel_digraph(&w);
    let mut lines = vec![json!({
        "inputs": w.inputs(),
        "outputs": w.outputs(),
        "digraph_vertices": d.n(),
        "digraph_arcs": d.arcs(),
    })];
    let mut out = Output::new(vec![
        "m", "composition", "class_size", "vertices", "copies", "nu", "status", "nu_rate_lo", "nu_rate_hi", "max_code",
        "code_rate_lo", "code_rate_hi",
    ]);
    let mut report = Report::default();
    for p in comps {
        let r = composition_class_nu(&w, &p, limit, c.max_block)?;
        if r.nu.status == SolveStatus::LowerBound {
            report.budget_exhausted = true;
        }
        let [nl, nh] = interval_cells(&r.nu_rate);
        let [cl, ch] = interval_cells(&r.code_rate);
        out.push(vec![
            json!(r.m),
            json!(p.to_string()),
            json!(r.class_size),
            json!(r.vertices),
            json!(r.copies),
            json!(r.nu.value),
            json!(r.nu.status.to_string()),
            nl.clone(),
            nh.clone(),
            json!(r.max_code),
            cl.clone(),
            ch.clone(),
        ]);
        let mut line = r.to_json();
        line["nu_rate"] = json!([nl, nh]);
        line["code_rate"] = json!([cl, ch]);
        lines.push(line);
    }
    out.jsonl = Some(lines);
    Ok((out, report))
}

fn cmd_thm3(c: &Thm3Cmd, err: &mut dyn Write) -> CmdResult {
    let limit = budget(c.budget)?;
    let mut out = Output::new(vec![
        "n", "m_cycles", "cycles_status", "m_paths", "paths_status", "path_target", "paths_meet_target",
        "cycles_at_least_paths", "best_edge", "derived_size", "derived_valid",
    ]);
    let mut report = Report::default();
    for n in c.n.values() {
        if n < 3 {
            return Err(CliError::Usage("thm3 needs n >= 3".into()));
        }
        guard("thm3", n, 7, c.force, err)?;
        let s = sandwich(n, &c.predicate, limit)?;
        let exact = s.cycles.status == SolveStatus::Exact && s.paths.status == SolveStatus::Exact;
        if !exact {
            report.budget_exhausted = true;
        } else if !s.paths_meet_target {
            report.failures.push(json!({
                "check": "thm3",
                "n": n,
                "expected": "M(paths) >= ceil(2 M(cycles) / (n-1))",
                "formula": s.path_target.to_string(),
                "oracle": s.paths.value,
            }));
        }
        out.push(vec![
            json!(n),
            json!(s.cycles.value),
            json!(s.cycles.status.to_string()),
            json!(s.paths.value),
            json!(s.paths.status.to_string()),
            json!(s.path_target.to_string()),
            json!(s.paths_meet_target),
            json!(s.cycles_at_least_paths),
            json!(format!("{}-{}", s.best_edge.0, s.best_edge.1)),
            json!(s.derived.len()),
            json!(s.derived_valid),
        ]);
    }
    Ok((out, report))
}

fn output_args(cmd: &Command) -> (&OutputArgs, Format) {
    match cmd {
        Command::Enumerate(c) => (&c.output, Format::Jsonl),
        Command::Greedy(c) | Command::Exact(c) => (&c.output, Format::Jsonl),
        Command::Bounds(c) => (&c.output, Format::Csv),
        Command::Verify(c) => (&c.output, Format::Jsonl),
        Command::Nu(c) => (&c.output, Format::Jsonl),
        Command::CapacityDemo(c) => (&c.output, Format::Jsonl),
        Command::Thm3(c) => (&c.output, Format::Jsonl),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Enumerate(_) => "enumerate",
        Command::Greedy(_) => "greedy",
        Command::Exact(_) => "exact",
        Command::Bounds(_) => "bounds",
        Command::Verify(_) => "verify",
        Command::Nu(_) => "nu",
        Command::CapacityDemo(_) => "capacity-demo",
        Command::Thm3(_) => "thm3",
    }
}

fn dispatch(cmd: &Command, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Enumerate(c) => cmd_enumerate(c, err),
        Command::Greedy(c) => cmd_greedy(c, err),
        Command::Exact(c) => cmd_exact(c, err),
        Command::Bounds(c) => cmd_bounds(c),
        Command::Verify(c) => cmd_verify(c, err),
        Command::Nu(c) => cmd_nu(c, err),
        Command::CapacityDemo(c) => cmd_capacity(c, err),
        Command::Thm3(c) => cmd_thm3(c, err),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let pool = match cli.threads {
        Some(0) => {
            let _ = writeln!(err, "{}", json!({"error": "--threads must be at least 1"}));
            return EXIT_USAGE;
        }
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{}", json!({"error": e.to_string()}));
            return EXIT_USAGE;
        }
    };
    let start = Instant::now();
    let mut warnings: Vec<u8> = Vec::new();
    let result = pool.install(|| dispatch(&cli.command, &mut warnings));
    let _ = err.write_all(&warnings);
    let (output, report) = match result {
        Ok(v) => v,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "{}", json!({"error": msg}));
            return EXIT_USAGE;
        }
    };
    let (args, default_format) = output_args(&cli.command);
    let text = output.render(args.format.unwrap_or(default_format));
    let written = match &args.output {
        Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "{}", json!({"error": msg}));
        return EXIT_USAGE;
    }
    for f in &report.failures {
        let _ = writeln!(err, "{}", json!({ "failure": f }));
    }
    let mut meta = report.metadata;
    meta.insert("command".into(), json!(command_name(&cli.command)));
    meta.insert("elapsed_ms".into(), json!(start.elapsed().as_millis() as u64));
    meta.insert("threads".into(), json!(pool.current_num_threads()));
    let _ = writeln!(err, "{}", json!({ "metadata": meta }));
    if !report.failures.is_empty() {
        EXIT_ASSERTION
    } else if report.budget_exhausted {
        EXIT_BUDGET
    } else {
        EXIT_OK
    }
}
