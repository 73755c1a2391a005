//! Shannon distinguishability of labeled copies, the invariant `nu`, and the
//! channel-to-digraph construction with its constant-composition classes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::bits::BitSet;
use crate::clique::{max_clique, CliqueOptions, CompatibilityGraph};
use crate::enumeration::{labeled_copies, Universe};
use crate::error::{invalid, Error, Result};
use crate::families::{solve_universe, Relation, SolveReport, SolveStatus};
use crate::graph::LabeledGraph;
use crate::interval::{root_enclosure, Interval};

/// Literal test: some vertex has disjoint neighborhoods in `f` and `g`.
pub(crate) fn graphs_distinguishable(f: &LabeledGraph, g: &LabeledGraph) -> bool {
    (1..=f.n()).any(|v| f.neighbor_mask(v) & g.neighbor_mask(v) == 0)
}

/// Loop-free directed graph on `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digraph {
    n: usize,
    out: Vec<BitSet>,
}

impl Digraph {
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVertices);
        }
        let mut out = vec![BitSet::new(n); n];
        for &(u, v) in arcs {
            if u == v {
                return Err(Error::LoopEdge(u));
            }
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::EndpointOutOfRange { u, v, n });
            }
            if out[u - 1].contains(v - 1) {
                return Err(Error::DuplicateEdge(u, v));
            }
            out[u - 1].insert(v - 1);
        }
        Ok(Digraph { n, out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u >= 1 && u <= self.n && v >= 1 && self.out[u - 1].contains(v - 1)
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(BitSet::count).sum()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.out[u].iter().map(move |v| (u + 1, v + 1)))
            .collect()
    }

    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        self.out[v - 1].iter().map(|u| u + 1).collect()
    }

    /// Image under `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Digraph {
        let mut out = vec![BitSet::new(self.n); self.n];
        for (u, row) in self.out.iter().enumerate() {
            for v in row.iter() {
                out[perm[u] - 1].insert(perm[v] - 1);
            }
        }
        Digraph { n: self.n, out }
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (1..=self.n).filter(|&v| self.out[v - 1].is_empty()).collect()
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph({}; ", self.n)?;
        f.debug_list().entries(self.arcs()).finish()?;
        f.write_str(")")
    }
}

/// Graphs whose copies can be compared vertex by vertex.
pub trait Neighborhoods {
    fn order(&self) -> usize;
    /// Whether `v` has disjoint (out-)neighborhoods in `self` and `other`.
    fn disjoint_at(&self, other: &Self, v: usize) -> bool;
}

impl Neighborhoods for LabeledGraph {
    fn order(&self) -> usize {
        self.n()
    }

    fn disjoint_at(&self, other: &Self, v: usize) -> bool {
        self.neighbor_mask(v) & other.neighbor_mask(v) == 0
    }
}

impl Neighborhoods for Digraph {
    fn order(&self) -> usize {
        self.n
    }

    fn disjoint_at(&self, other: &Self, v: usize) -> bool {
        self.out[v - 1].is_disjoint(&other.out[v - 1])
    }
}

/// Whether some vertex has disjoint neighborhoods; empty sets count as disjoint.
pub fn shannon_distinguishable<T: Neighborhoods + PartialEq>(f: &T, g: &T) -> Result<bool> {
    if f.order() != g.order() {
        return Err(Error::MismatchedOrder(f.order(), g.order()));
    }
    if f == g {
        return Err(Error::EqualGraphs);
    }
    Ok((1..=f.order()).any(|v| f.disjoint_at(g, v)))
}

/// `nu` of an undirected graph, with its isolated vertices listed because they make
/// any two copies that share them distinguishable.
#[derive(Clone, Debug)]
pub struct GraphNu {
    pub report: SolveReport,
    pub copies: usize,
    pub isolated_vertices: Vec<usize>,
}

impl GraphNu {
    pub fn to_json(&self) -> Value {
        let mut v = self.report.to_json();
        v["copies"] = json!(self.copies);
        v["isolated_vertices"] = json!(self.isolated_vertices);
        v["empty_neighborhoods_disjoint"] = json!(!self.isolated_vertices.is_empty());
        v
    }
}

pub fn nu(g: &LabeledGraph, budget: Duration) -> Result<GraphNu> {
    let universe = Universe::CopiesOf(*g);
    let report = solve_universe(&universe, Relation::ShannonDistinguishable, budget)?;
    Ok(GraphNu {
        copies: labeled_copies(g).count(),
        isolated_vertices: g.isolated_vertices(),
        report,
    })
}

#[derive(Clone, Debug)]
pub struct DigraphNu {
    pub value: usize,
    pub status: SolveStatus,
    pub witness: Vec<Digraph>,
    pub copies: usize,
    pub isolated_vertices: Vec<usize>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

impl DigraphNu {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "status": self.status.to_string(),
            "copies": self.copies,
            "nodes_explored": self.nodes_explored,
            "isolated_vertices": self.isolated_vertices,
            "empty_neighborhoods_disjoint": !self.isolated_vertices.is_empty(),
            "witness": self.witness.iter().map(Digraph::arcs).collect::<Vec<_>>(),
        })
    }
}

/// Largest pairwise-distinguishable subset of `copies` (sorted, distinct).
fn digraph_family(copies: Vec<Digraph>, budget: Duration, vertex_transitive: bool) -> Result<DigraphNu> {
    if budget.is_zero() {
        return Err(invalid("time budget must be positive"));
    }
    let start = Instant::now();
    let isolated = copies.first().map(Digraph::isolated_vertices).unwrap_or_default();
    let graph = CompatibilityGraph::from_relation(&copies, Vec::new(), |a, b| {
        (1..=a.n).any(|v| a.disjoint_at(b, v))
    });
    let outcome = max_clique(
        &graph,
        &CliqueOptions {
            deadline: Some(start + budget),
            root: (vertex_transitive && !copies.is_empty()).then_some(0),
        },
    );
    Ok(DigraphNu {
        value: outcome.clique.len(),
        status: if outcome.exact { SolveStatus::Exact } else { SolveStatus::LowerBound },
        witness: outcome.clique.iter().map(|&i| copies[i].clone()).collect(),
        copies: copies.len(),
        isolated_vertices: isolated,
        nodes_explored: outcome.nodes,
        elapsed: start.elapsed(),
    })
}

/// `nu` of a digraph over all its distinct relabelings.
pub fn digraph_nu(d: &Digraph, budget: Duration) -> Result<DigraphNu> {
    if d.n > 9 {
        return Err(invalid(format!("digraph copies on {} vertices are out of reach", d.n)));
    }
    let copies: Vec<Digraph> = (1..=d.n)
        .permutations(d.n)
        .map(|p| d.relabel(&p))
        .collect::<HashSet<_>>()
        .into_iter()
        .sorted()
        .collect();
    digraph_family(copies, budget, true)
}

/// Parses `"a/b"`, integers and finite decimals exactly.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not an exact rational or decimal"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(digits * sign, scale))
}

/// Stochastic matrix with exact entries, rows indexed by inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Channel {
    inputs: Vec<String>,
    outputs: Vec<String>,
    w: Vec<Vec<BigRational>>,
}

impl Channel {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, w: Vec<Vec<BigRational>>) -> Result<Self> {
        if inputs.is_empty() || outputs.is_empty() {
            return Err(Error::InvalidChannel("alphabets must be non-empty".into()));
        }
        for (name, list) in [("input", &inputs), ("output", &outputs)] {
            if let Some(d) = list.iter().duplicates().next() {
                return Err(Error::InvalidChannel(format!("repeated {name} symbol `{d}`")));
            }
        }
        if w.len() != inputs.len() {
            return Err(Error::InvalidChannel(format!("{} rows for {} inputs", w.len(), inputs.len())));
        }
        for (x, row) in inputs.iter().zip(&w) {
            if row.len() != outputs.len() {
                return Err(Error::InvalidChannel(format!("row `{x}` has {} entries, expected {}", row.len(), outputs.len())));
            }
            if row.iter().any(Signed::is_negative) {
                return Err(Error::InvalidChannel(format!("row `{x}` has a negative entry")));
            }
            let total: BigRational = row.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidChannel(format!("row `{x}` sums to {total}, not 1")));
            }
        }
        Ok(Channel { inputs, outputs, w })
    }

    /// Identity matrix on `k` symbols named `0..k`.
    pub fn noiseless(k: usize) -> Result<Self> {
        let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        let w = (0..k)
            .map(|i| (0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        Channel::new(names.clone(), names, w)
    }

    /// Header row of output symbols after a corner cell; one row per input symbol.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        let outputs: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut inputs = Vec::new();
        let mut w = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let mut cells = record.iter();
            inputs.push(cells.next().unwrap_or_default().to_owned());
            w.push(cells.map(parse_exact).collect::<Result<Vec<_>>>()?);
        }
        Channel::new(inputs, outputs, w)
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn probability(&self, x: usize, y: usize) -> &BigRational {
        &self.w[x][y]
    }

    fn positive(&self, x: usize, y: usize) -> bool {
        self.w[x][y].is_positive()
    }
}

/// Arcs `x -> y` for `W(y|x) > 0` and from every output to every other vertex.
/// Inputs are vertices `1..=|X|`, outputs follow.
pub fn channel_digraph(w: &Channel) -> Digraph {
    let a = w.inputs.len();
    let b = w.outputs.len();
    let n = a + b;
    let mut arcs = Vec::new();
    for x in 0..a {
        for y in 0..b {
            if w.positive(x, y) {
                arcs.push((x + 1, a + y + 1));
            }
        }
    }
    for y in a + 1..=n {
        arcs.extend((1..=n).filter(|&v| v != y).map(|v| (y, v)));
    }
    Digraph::new(n, &arcs).expect("arcs are in range and distinct")
}

/// Number of occurrences of each input symbol in a block of length `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    m: usize,
    counts: Vec<usize>,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        let m = counts.iter().sum();
        if m == 0 {
            return Err(invalid("composition must have positive block length"));
        }
        Ok(Composition { m, counts })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Sequences over `0..counts.len()` with this composition, lexicographic.
    pub fn class(&self) -> Vec<Vec<usize>> {
        let symbols: Vec<usize> = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(a, &c)| std::iter::repeat_n(a, c))
            .collect();
        let mut seqs: Vec<Vec<usize>> = symbols.iter().copied().permutations(self.m).collect();
        seqs.sort();
        seqs.dedup();
        seqs
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.counts.iter().join(","))
    }
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let counts = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad composition count `{t}`"))))
            .collect::<Result<Vec<usize>>>()?;
        Composition::new(counts)
    }
}

/// One constant-composition datapoint.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub m: usize,
    pub composition: Composition,
    pub class_size: usize,
    /// Class vertices plus the `|Y|^m` output sequences.
    pub vertices: usize,
    /// Distinct copies induced by coordinate permutations.
    pub copies: usize,
    pub nu: DigraphNu,
    /// `nu^(1/m)`.
    pub nu_rate: Interval,
    /// Largest set of class sequences with pairwise disjoint output sets.
    pub max_code: usize,
    pub code_rate: Interval,
}

impl ClassReport {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "composition": self.composition.counts(),
            "class_size": self.class_size,
            "vertices": self.vertices,
            "copies": self.copies,
            "nu": self.nu.value,
            "status": self.nu.status.to_string(),
            "nodes_explored": self.nu.nodes_explored,
            "nu_rate": [self.nu_rate.lo().to_string(), self.nu_rate.hi().to_string()],
            "max_code": self.max_code,
            "code_rate": [self.code_rate.lo().to_string(), self.code_rate.hi().to_string()],
        })
    }
}

pub const DEFAULT_BLOCK_CAP: usize = 2;

/// `nu` of the digraph induced on a constant-composition class and the output
/// sequences. Copies move the class sequences by a common coordinate permutation
/// and fix the outputs.
pub fn composition_class_nu(w: &Channel, p: &Composition, budget: Duration, cap: usize) -> Result<ClassReport> {
    let m = p.m;
    if m > cap {
        return Err(invalid(format!("block length {m} exceeds the cap {cap}")));
    }
    if p.counts.len() != w.inputs.len() {
        return Err(invalid(format!(
            "composition has {} counts for {} input symbols",
            p.counts.len(),
            w.inputs.len()
        )));
    }
    let class = p.class();
    let b = w.outputs.len();
    let outputs: Vec<Vec<usize>> = (0..m).map(|_| 0..b).multi_cartesian_product().collect();
    let t = class.len();
    let n = t + outputs.len();
    let out_index: BTreeMap<&Vec<usize>, usize> = outputs.iter().enumerate().map(|(i, y)| (y, t + i + 1)).collect();

    let reach = |x: &[usize]| -> Vec<usize> {
        outputs
            .iter()
            .filter(|y| x.iter().zip(y.iter()).all(|(&xi, &yi)| w.positive(xi, yi)))
            .map(|y| out_index[y])
            .collect()
    };
    let build = |order: &[usize]| -> Digraph {
        // vertex i + 1 carries the outputs of class[order[i]]
        let mut arcs = Vec::new();
        for (i, &src) in order.iter().enumerate() {
            arcs.extend(reach(&class[src]).into_iter().map(|y| (i + 1, y)));
        }
        for y in t + 1..=n {
            arcs.extend((1..=n).filter(|&v| v != y).map(|v| (y, v)));
        }
        Digraph::new(n, &arcs).expect("valid arcs")
    };

    let position: BTreeMap<&Vec<usize>, usize> = class.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut copies: Vec<Digraph> = (0..m)
        .permutations(m)
        .map(|sigma| {
            // copy sigma: vertex of x carries the outputs of sigma^{-1}(x)
            let order: Vec<usize> = class
                .iter()
                .map(|x| {
                    let mut pre = vec![0; m];
                    for (i, &s) in sigma.iter().enumerate() {
                        pre[i] = x[s];
                    }
                    position[&pre]
                })
                .collect();
            build(&order)
        })
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    copies.sort();
    let nu = digraph_family(copies, budget, true)?;

    let reaches: Vec<BitSet> = class
        .iter()
        .map(|x| {
            let mut s = BitSet::new(n + 1);
            for y in reach(x) {
                s.insert(y);
            }
            s
        })
        .collect();
    let code_graph = CompatibilityGraph::from_relation(&reaches, Vec::new(), |a, b| a.is_disjoint(b));
    let max_code = max_clique(&code_graph, &CliqueOptions::default()).clique.len();

    let bits = 64;
    let rate = |v: usize| root_enclosure(&BigRational::from_integer(v.into()), m as u32, bits);
    Ok(ClassReport {
        m,
        composition: p.clone(),
        class_size: t,
        vertices: n,
        copies: nu.copies,
        nu_rate: rate(nu.value),
        max_code,
        code_rate: rate(max_code),
        nu,
    })
}

/// Outcome of testing "no two vertices with disjoint neighborhoods implies nu = 1"
/// on every graph up to a given order, under both readings of "two vertices".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NeighborhoodClaim {
    pub graphs_checked: usize,
    /// Premise over distinct pairs holds but `nu > 1`.
    pub distinct_pair_counterexamples: Vec<(LabeledGraph, usize)>,
    /// Premise including `u = v` (no empty neighborhood) holds but `nu > 1`.
    pub any_pair_counterexamples: Vec<(LabeledGraph, usize)>,
}

fn no_disjoint_pair(g: &LabeledGraph, allow_equal: bool) -> bool {
    let n = g.n();
    (1..=n).all(|u| {
        (u..=n)
            .filter(|&v| allow_equal || v != u)
            .all(|v| g.neighbor_mask(u) & g.neighbor_mask(v) != 0)
    })
}

/// Checks one representative per isomorphism class on `1..=max_n` vertices.
pub fn neighborhood_claim(max_n: usize, budget: Duration) -> Result<NeighborhoodClaim> {
    let mut out = NeighborhoodClaim::default();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> = (1..=n).tuple_combinations().collect();
        let mut seen = HashSet::new();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e).collect();
            let g = LabeledGraph::new(n, &edges)?;
            let rep = labeled_copies(&g).min().expect("at least one copy");
            if !seen.insert(rep) {
                continue;
            }
            out.graphs_checked += 1;
            let distinct = no_disjoint_pair(&rep, false);
            let any = no_disjoint_pair(&rep, true);
            if !distinct && !any {
                continue;
            }
            let value = nu(&rep, budget)?.report.value;
            if value > 1 {
                if distinct {
                    out.distinct_pair_counterexamples.push((rep, value));
                }
                if any {
                    out.any_pair_counterexamples.push((rep, value));
                }
            }
        }
    }
    Ok(out)
}
