//! Degree-doubling families: greedy selection, exact maxima by clique search,
//! the triangle-factor construction, covering certificates and path families.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::bounds::{self, BoundValue};
use crate::clique::{max_clique, CliqueOptions, CompatibilityGraph};
use crate::distinguish::graphs_distinguishable;
use crate::enumeration::{
    hamilton_cycles, labeled_copies, near_matchings, pattern_for_shape, perfect_matchings, triangle_factors,
    PartitionShape, Universe,
};
use crate::error::{invalid, Error, Result};
use crate::graph::{DoublingPredicate, LabeledGraph};

/// The pairwise condition a family must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Doubling(DoublingPredicate),
    ShannonDistinguishable,
}

impl Default for Relation {
    fn default() -> Self {
        Relation::Doubling(DoublingPredicate::default())
    }
}

impl Relation {
    /// Whether two graphs on the same vertex set may both belong to a family.
    pub fn holds(&self, f: &LabeledGraph, g: &LabeledGraph) -> bool {
        if f.n() != g.n() {
            return false;
        }
        match self {
            Relation::Doubling(p) => p.accepts_union_mask(f.n(), f.mask() | g.mask()),
            Relation::ShannonDistinguishable => f != g && graphs_distinguishable(f, g),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Doubling(p) => write!(f, "{p}"),
            Relation::ShannonDistinguishable => f.write_str("shannon"),
        }
    }
}

impl From<DoublingPredicate> for Relation {
    fn from(p: DoublingPredicate) -> Self {
        Relation::Doubling(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    n: usize,
    members: Vec<LabeledGraph>,
    relation: Relation,
    universe: Universe,
}

impl Family {
    /// Checks orders, distinctness and universe membership. Pairwise validity is
    /// left to [`verify_family`].
    pub fn new(universe: Universe, relation: Relation, members: Vec<LabeledGraph>) -> Result<Self> {
        let n = universe.n();
        let copies: Option<HashSet<LabeledGraph>> = match &universe {
            Universe::CopiesOf(g) => Some(labeled_copies(g).collect()),
            _ => None,
        };
        let mut seen = std::collections::HashMap::new();
        for (i, g) in members.iter().enumerate() {
            if g.n() != n {
                return Err(Error::MismatchedOrder(g.n(), n));
            }
            if let Some(j) = seen.insert(*g, i) {
                return Err(Error::DuplicateMember(j, i));
            }
            let inside = match &copies {
                Some(set) => set.contains(g),
                None => universe.contains(g),
            };
            if !inside {
                return Err(Error::NotInUniverse(i, universe.tag()));
            }
        }
        Ok(Family {
            n,
            members,
            relation,
            universe,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[LabeledGraph] {
        &self.members
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn header(&self) -> Value {
        json!({
            "n": self.n,
            "predicate": self.relation.to_string(),
            "universe": self.universe.tag(),
            "size": self.members.len(),
        })
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.header();
        v["members"] = serde_json::to_value(&self.members).expect("graphs serialize");
        v
    }

    /// Header line followed by one member per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = self.header().to_string();
        out.push('\n');
        for g in &self.members {
            out.push_str(&serde_json::to_string(g).expect("graphs serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    /// Indices of the first failing pair in lexicographic order.
    pub failing_pair: Option<(usize, usize)>,
}

pub fn verify_family(fam: &Family) -> Verification {
    let m = fam.members();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if !fam.relation.holds(&m[i], &m[j]) {
                return Verification {
                    valid: false,
                    failing_pair: Some((i, j)),
                };
            }
        }
    }
    Verification {
        valid: true,
        failing_pair: None,
    }
}

/// Pairwise relation over `candidates`, which must share `n` and be distinct.
pub fn relation_graph(candidates: &[LabeledGraph], relation: Relation) -> Result<CompatibilityGraph> {
    if let Some(first) = candidates.first() {
        let mut seen = std::collections::HashMap::new();
        for (i, g) in candidates.iter().enumerate() {
            if g.n() != first.n() {
                return Err(Error::MismatchedOrder(first.n(), g.n()));
            }
            if let Some(j) = seen.insert(*g, i) {
                return Err(Error::DuplicateMember(j, i));
            }
        }
    }
    let keys = candidates.iter().map(LabeledGraph::canonical_key).collect();
    Ok(CompatibilityGraph::from_relation(candidates, keys, |f, g| relation.holds(f, g)))
}

pub fn compatibility_graph(candidates: &[LabeledGraph], pred: &DoublingPredicate) -> Result<CompatibilityGraph> {
    relation_graph(candidates, Relation::Doubling(*pred))
}

/// Takes the first surviving candidate, discards everything it is incompatible
/// with, and repeats. Repeated candidates are skipped.
pub fn greedy_family<I>(candidates: I, relation: Relation, universe: Universe) -> Result<Family>
where
    I: IntoIterator<Item = LabeledGraph>,
{
    let mut chosen: Vec<LabeledGraph> = Vec::new();
    let mut seen = HashSet::new();
    for g in candidates {
        if !seen.insert(g) {
            continue;
        }
        if chosen.iter().all(|h| relation.holds(h, &g)) {
            chosen.push(g);
        }
    }
    Family::new(universe, relation, chosen)
}

/// Whether no candidate outside `fam` is compatible with every member.
pub fn is_inclusion_maximal(fam: &Family, candidates: &[LabeledGraph]) -> bool {
    let members: HashSet<_> = fam.members().iter().collect();
    candidates
        .iter()
        .filter(|g| !members.contains(g))
        .all(|g| fam.members().iter().any(|h| !fam.relation.holds(h, g)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Exact,
    LowerBound,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Exact => "exact",
            SolveStatus::LowerBound => "lower-bound",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub value: usize,
    pub status: SolveStatus,
    pub witness: Family,
    pub elapsed: Duration,
    pub nodes_explored: u64,
}

impl SolveReport {
    /// Deterministic fields only; timing lives in [`SolveReport::timing_json`].
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "status": self.status.to_string(),
            "nodes_explored": self.nodes_explored,
            "witness": self.witness.to_json(),
        })
    }

    pub fn timing_json(&self) -> Value {
        json!({ "elapsed_ms": self.elapsed.as_millis() as u64 })
    }

    /// Both records merged into one object.
    pub fn to_json_with_timing(&self) -> Value {
        let mut v = self.to_json();
        v["elapsed_ms"] = self.timing_json()["elapsed_ms"].clone();
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub budget: Duration,
    /// The candidate set is one orbit under relabeling, so some maximum family
    /// contains the first candidate.
    pub vertex_transitive: bool,
}

impl SolveOptions {
    pub fn with_budget(budget: Duration) -> Self {
        SolveOptions {
            budget,
            vertex_transitive: false,
        }
    }
}

/// Largest family among `candidates`, searched in the given order.
pub fn max_family_exact(
    candidates: &[LabeledGraph],
    relation: Relation,
    universe: Universe,
    opts: SolveOptions,
) -> Result<SolveReport> {
    if opts.budget.is_zero() {
        return Err(invalid("time budget must be positive"));
    }
    let start = Instant::now();
    let graph = relation_graph(candidates, relation)?;
    let outcome = max_clique(
        &graph,
        &CliqueOptions {
            deadline: Some(start + opts.budget),
            root: (opts.vertex_transitive && !candidates.is_empty()).then_some(0),
        },
    );
    let members = outcome.clique.iter().map(|&i| candidates[i]).collect();
    let witness = Family::new(universe, relation, members)?;
    Ok(SolveReport {
        value: witness.len(),
        status: if outcome.exact { SolveStatus::Exact } else { SolveStatus::LowerBound },
        witness,
        elapsed: start.elapsed(),
        nodes_explored: outcome.nodes,
    })
}

/// Exact maximum over a whole universe in canonical order, rooting the search at
/// the first member when the universe is a single orbit.
pub fn solve_universe(universe: &Universe, relation: Relation, budget: Duration) -> Result<SolveReport> {
    let candidates = universe.sorted_members()?;
    let opts = SolveOptions {
        budget,
        vertex_transitive: universe.is_single_orbit(),
    };
    max_family_exact(&candidates, relation, universe.clone(), opts)
}

/// Triangle factors on `[3q]`, each completed by the increasing cycle on the last
/// `r` vertices, where `n = 3q + r` and `r` is 0, 4 or 5.
pub fn triangle_family(n: usize) -> Result<Family> {
    if n < 3 {
        return Err(invalid(format!("triangle family needs n >= 3, got {n}")));
    }
    let (q, r) = bounds::triangle_split(n as u64);
    let (q, r) = (q as usize, r as usize);
    let gadget: Vec<(usize, usize)> = if r == 0 {
        Vec::new()
    } else {
        let top: Vec<usize> = (3 * q + 1..=n).collect();
        (0..r).map(|i| (top[i], top[(i + 1) % r])).collect()
    };
    let members: Vec<LabeledGraph> = if q == 0 {
        vec![LabeledGraph::new(n, &gadget)?]
    } else {
        triangle_factors(3 * q)?
            .map(|f| {
                let mut edges: Vec<(usize, usize)> = f.edges().collect();
                edges.extend_from_slice(&gadget);
                LabeledGraph::new(n, &edges)
            })
            .collect::<Result<_>>()?
    };
    Family::new(Universe::TwoRegular(n), Relation::default(), members)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternKind {
    Matching,
    NearMatching,
    Shape(PartitionShape),
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternKind::Matching => f.write_str("matching"),
            PatternKind::NearMatching => f.write_str("near-matching"),
            PatternKind::Shape(p) => write!(f, "pattern{p}"),
        }
    }
}

/// Upper bound on a family by counting pattern classes, with the exhaustive
/// containment data that backs it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverBound {
    pub kind: PatternKind,
    pub universe: Universe,
    pub universe_size: usize,
    pub pattern_count: usize,
    /// Class size `|C(P)|` for the fixed pattern.
    pub fixed_class_size: usize,
    pub min_class_size: usize,
    pub max_class_size: usize,
    pub min_copies_per_member: usize,
    pub max_copies_per_member: usize,
    /// The closed form: `n!/(floor(n/2)! 2^floor(n/2))` for matchings and
    /// near-matchings, `|F(p)|/|C(p)|` for shapes.
    pub bound: BoundValue,
    /// `pattern_count / min_copies_per_member`; each class holds at most one member
    /// of a valid family, so this bounds every family.
    pub double_count: BigRational,
    /// Largest number of witness members inside a single class.
    pub witness_max_hits: Option<usize>,
}

impl CoverBound {
    pub fn uniform(&self) -> bool {
        self.min_copies_per_member == self.max_copies_per_member && self.min_class_size == self.max_class_size
    }

    /// Uniform containment and, when a witness was supplied, at most one member per class.
    pub fn certified(&self) -> bool {
        self.uniform() && self.witness_max_hits.is_none_or(|h| h <= 1)
    }
}

fn pattern_setup(n: usize, kind: &PatternKind) -> Result<(Universe, Vec<LabeledGraph>, LabeledGraph)> {
    let (universe, patterns): (Universe, Vec<LabeledGraph>) = match kind {
        PatternKind::Matching => {
            if n < 4 || n % 2 == 1 {
                return Err(invalid(format!("matching patterns need even n >= 4, got {n}")));
            }
            (Universe::HamiltonCycles(n), perfect_matchings(n)?.collect())
        }
        PatternKind::NearMatching => {
            if n < 5 || n % 2 == 0 {
                return Err(invalid(format!("near-matching patterns need odd n >= 5, got {n}")));
            }
            (Universe::HamiltonCycles(n), near_matchings(n)?.collect())
        }
        PatternKind::Shape(p) => {
            p.check_two_regular()?;
            if p.n() != n {
                return Err(Error::MismatchedOrder(p.n(), n));
            }
            let fixed = pattern_for_shape(p)?;
            (Universe::TwoRegularShape(p.clone()), labeled_copies(&fixed).collect())
        }
    };
    let fixed = match kind {
        PatternKind::Shape(p) => pattern_for_shape(p)?,
        _ => *patterns.iter().min().expect("at least one pattern"),
    };
    Ok((universe, patterns, fixed))
}

pub fn cover_upper_bound(n: usize, kind: &PatternKind, witness: Option<&Family>) -> Result<CoverBound> {
    let (universe, patterns, fixed) = pattern_setup(n, kind)?;
    let members = universe.sorted_members()?;
    let mut class_sizes = vec![0usize; patterns.len()];
    let mut copies = Vec::with_capacity(members.len());
    for g in &members {
        let mut c = 0;
        for (i, p) in patterns.iter().enumerate() {
            if g.contains_subgraph(p) {
                class_sizes[i] += 1;
                c += 1;
            }
        }
        copies.push(c);
    }
    let fixed_class_size = members.iter().filter(|g| g.contains_subgraph(&fixed)).count();
    let min_copies = copies.iter().copied().min().unwrap_or(0);
    if min_copies == 0 {
        return Err(invalid(format!("some member of {} contains no {kind} pattern", universe.tag())));
    }
    let bound = match kind {
        PatternKind::Matching | PatternKind::NearMatching => {
            BoundValue::Integer(bounds::theorem1_bounds(n as u64, 64)?.upper)
        }
        PatternKind::Shape(_) => {
            let q = BigRational::new(BigInt::from(members.len()), BigInt::from(fixed_class_size));
            if q.is_integer() {
                BoundValue::Integer(q.to_integer())
            } else {
                BoundValue::Rational(q)
            }
        }
    };
    let witness_max_hits = match witness {
        Some(fam) => Some(max_class_hits(fam, &patterns)?),
        None => None,
    };
    Ok(CoverBound {
        kind: kind.clone(),
        universe,
        universe_size: members.len(),
        pattern_count: patterns.len(),
        fixed_class_size,
        min_class_size: class_sizes.iter().copied().min().unwrap_or(0),
        max_class_size: class_sizes.iter().copied().max().unwrap_or(0),
        min_copies_per_member: min_copies,
        max_copies_per_member: copies.iter().copied().max().unwrap_or(0),
        bound,
        double_count: BigRational::new(BigInt::from(patterns.len()), BigInt::from(min_copies)),
        witness_max_hits,
    })
}

/// Largest number of family members containing one pattern.
pub fn max_class_hits(fam: &Family, patterns: &[LabeledGraph]) -> Result<usize> {
    if let Some(p) = patterns.iter().find(|p| p.n() != fam.n()) {
        return Err(Error::MismatchedOrder(p.n(), fam.n()));
    }
    Ok(patterns
        .iter()
        .map(|p| fam.members().iter().filter(|g| g.contains_subgraph(p)).count())
        .max()
        .unwrap_or(0))
}

/// Paths obtained by deleting `{a, b}` from every member of a cycle family that
/// contains it.
pub fn path_family(cycle_family: &Family, edge: (usize, usize)) -> Result<Family> {
    let n = cycle_family.n();
    let (a, b) = edge;
    if a == b || a == 0 || b == 0 || a > n || b > n {
        return Err(invalid(format!("({a}, {b}) is not an edge slot on {n} vertices")));
    }
    if let Some(i) = cycle_family.members().iter().position(|g| !g.is_hamilton_cycle()) {
        return Err(Error::NotInUniverse(i, Universe::HamiltonCycles(n).tag()));
    }
    let members = cycle_family
        .members()
        .iter()
        .filter(|g| g.has_edge(a, b))
        .map(|g| g.without_edge(a, b))
        .collect();
    Family::new(Universe::HamiltonPaths(n), cycle_family.relation(), members)
}

/// The edge whose path family is largest, first in lexicographic order on ties.
pub fn best_path_family(cycle_family: &Family) -> Result<((usize, usize), Family)> {
    let n = cycle_family.n();
    let mut best: Option<((usize, usize), Family)> = None;
    for a in 1..=n {
        for b in a + 1..=n {
            let fam = path_family(cycle_family, (a, b))?;
            if best.as_ref().is_none_or(|(_, f)| fam.len() > f.len()) {
                best = Some(((a, b), fam));
            }
        }
    }
    best.ok_or_else(|| invalid("path families need n >= 2"))
}

/// Hamilton cycles on `[n]`, `h` included, whose union with `h` fails `pred`.
pub fn incompatible_count(h: &LabeledGraph, pred: &DoublingPredicate) -> Result<usize> {
    if !h.is_hamilton_cycle() {
        return Err(invalid("incompatibility counts are taken against a Hamilton cycle"));
    }
    let n = h.n();
    Ok(hamilton_cycles(n)?
        .filter(|c| !pred.accepts_union_mask(n, c.mask() | h.mask()))
        .count())
}

/// Cycle and path maxima at one `n`, with the comparisons between them.
#[derive(Clone, Debug)]
pub struct Sandwich {
    pub n: usize,
    pub cycles: SolveReport,
    pub paths: SolveReport,
    /// `ceil(2 M / (n - 1))`.
    pub path_target: BigInt,
    pub paths_meet_target: bool,
    pub cycles_at_least_paths: bool,
    pub best_edge: (usize, usize),
    /// Path family derived from the cycle witness through `best_edge`.
    pub derived: Family,
    pub derived_valid: bool,
}

pub fn sandwich(n: usize, pred: &DoublingPredicate, budget: Duration) -> Result<Sandwich> {
    if n < 3 {
        return Err(invalid(format!("cycle and path comparison needs n >= 3, got {n}")));
    }
    let relation = Relation::Doubling(*pred);
    let cycles = solve_universe(&Universe::HamiltonCycles(n), relation, budget)?;
    let paths = solve_universe(&Universe::HamiltonPaths(n), relation, budget)?;
    let path_target = BigInt::from(2 * cycles.value).div_ceil(&BigInt::from(n - 1));
    let (best_edge, derived) = best_path_family(&cycles.witness)?;
    let derived_valid = verify_family(&derived).valid;
    Ok(Sandwich {
        n,
        paths_meet_target: BigInt::from(paths.value) >= path_target,
        cycles_at_least_paths: cycles.value >= paths.value,
        path_target,
        best_edge,
        derived,
        derived_valid,
        cycles,
        paths,
    })
}
