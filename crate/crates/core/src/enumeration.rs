//! Exhaustive generators for the graph classes used throughout the crate.
//!
//! Every spanning class here (Hamilton cycles and paths, 2-regular graphs of a given
//! shape, perfect matchings, near-matchings, triangle factors) is a set of graphs whose
//! components have a prescribed multiset of kinds. [`SpanningFactors`] enumerates such
//! a set lazily: the component containing the smallest uncovered vertex is chosen
//! first, which gives every graph exactly one derivation. Within a component the
//! structures are produced in lexicographic order of their vertex sequence, so the
//! stream order is a deterministic function of the parameters.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::{invalid, Error, Result};
use crate::graph::{edge_mask, ComponentKind, LabeledGraph, MAX_VERTICES};

pub type GraphStream = Box<dyn Iterator<Item = LabeledGraph> + Send>;

/// Component kind in a spanning factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    /// Cycle on `k >= 3` vertices.
    Cycle(usize),
    /// Path on `k >= 1` vertices (`Path(2)` is a single edge).
    Path(usize),
}

impl Piece {
    pub fn size(&self) -> usize {
        match *self {
            Piece::Cycle(k) | Piece::Path(k) => k,
        }
    }
}

type Choice = (usize, u32, u128);

struct Frame {
    choices: Box<dyn Iterator<Item = Choice> + Send>,
    free: u32,
    remaining: Vec<(Piece, usize)>,
    edges: u128,
}

/// Lazy enumeration of all spanning subgraphs of `K_n` whose components realize a
/// given multiset of [`Piece`]s.
pub struct SpanningFactors {
    n: usize,
    stack: Vec<Frame>,
}

impl SpanningFactors {
    pub fn new(n: usize, pieces: &[Piece]) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVertices);
        }
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        let total: usize = pieces.iter().map(Piece::size).sum();
        if total != n {
            return Err(invalid(format!("pieces cover {total} vertices, expected {n}")));
        }
        if let Some(p) = pieces.iter().find(|p| matches!(p, Piece::Cycle(k) if *k < 3) || p.size() == 0) {
            return Err(invalid(format!("degenerate piece {p:?}")));
        }
        let mut counts: BTreeMap<Piece, usize> = BTreeMap::new();
        for &p in pieces {
            *counts.entry(p).or_default() += 1;
        }
        let remaining: Vec<(Piece, usize)> = counts.into_iter().collect();
        let free: u32 = (1..=n).fold(0, |m, v| m | 1 << v);
        let choices = frame_choices(1, free, &remaining);
        Ok(SpanningFactors {
            n,
            stack: vec![Frame {
                choices,
                free,
                remaining,
                edges: 0,
            }],
        })
    }
}

impl Iterator for SpanningFactors {
    type Item = LabeledGraph;

    fn next(&mut self) -> Option<LabeledGraph> {
        loop {
            let frame = self.stack.last_mut()?;
            let Some((kind, vertices, edges)) = frame.choices.next() else {
                self.stack.pop();
                continue;
            };
            let free = frame.free & !vertices;
            let edges = frame.edges | edges;
            if free == 0 {
                return Some(LabeledGraph::from_mask(self.n, edges));
            }
            let mut remaining = frame.remaining.clone();
            remaining[kind].1 -= 1;
            let anchor = free.trailing_zeros() as usize;
            let choices = frame_choices(anchor, free, &remaining);
            self.stack.push(Frame {
                choices,
                free,
                remaining,
                edges,
            });
        }
    }
}

fn frame_choices(anchor: usize, free: u32, remaining: &[(Piece, usize)]) -> Box<dyn Iterator<Item = Choice> + Send> {
    let others: Vec<usize> = (anchor + 1..=MAX_VERTICES).filter(|&v| free & (1 << v) != 0).collect();
    let kinds: Vec<(usize, Piece)> = remaining
        .iter()
        .enumerate()
        .filter(|(_, (_, count))| *count > 0)
        .map(|(i, (p, _))| (i, *p))
        .collect();
    Box::new(kinds.into_iter().flat_map(move |(ki, piece)| {
        others
            .clone()
            .into_iter()
            .combinations(piece.size() - 1)
            .flat_map(move |chosen| {
                let vmask = chosen.iter().fold(1u32 << anchor, |m, &v| m | 1 << v);
                structures(anchor, chosen, piece).map(move |e| (ki, vmask, e))
            })
    }))
}

/// Labeled structures of the given kind on `{anchor} ∪ chosen`, `chosen` ascending.
fn structures(anchor: usize, chosen: Vec<usize>, piece: Piece) -> Box<dyn Iterator<Item = u128> + Send> {
    match piece {
        Piece::Cycle(k) => {
            Box::new(chosen.into_iter().permutations(k - 1).filter(|p| p[0] < p[p.len() - 1]).map(move |p| {
                let mut m = edge_mask(anchor, p[0]) | edge_mask(anchor, p[p.len() - 1]);
                for w in p.windows(2) {
                    m |= edge_mask(w[0], w[1]);
                }
                m
            }))
        }
        Piece::Path(1) => Box::new(std::iter::once(0)),
        Piece::Path(k) => {
            let mut all = chosen;
            all.push(anchor);
            all.sort_unstable();
            Box::new(all.into_iter().permutations(k).filter(|p| p[0] < p[p.len() - 1]).map(|p| {
                p.windows(2).fold(0u128, |m, w| m | edge_mask(w[0], w[1]))
            }))
        }
    }
}

/// Integer partition, parts stored non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionShape {
    parts: Vec<usize>,
}

impl PartitionShape {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidShape {
                parts,
                reason: "parts must be positive and non-empty".into(),
            });
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(PartitionShape { parts })
    }

    /// Shape of a 2-regular graph: every part is a cycle length.
    pub fn two_regular(parts: Vec<usize>) -> Result<Self> {
        let shape = Self::new(parts)?;
        shape.check_two_regular()?;
        Ok(shape)
    }

    pub fn check_two_regular(&self) -> Result<()> {
        if self.parts.iter().any(|&p| p < 3) {
            return Err(Error::InvalidShape {
                parts: self.parts.clone(),
                reason: "every cycle length must be at least 3".into(),
            });
        }
        Ok(())
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn t(&self) -> usize {
        self.parts.len()
    }

    /// Number of odd parts.
    pub fn odd_parts(&self) -> usize {
        self.parts.iter().filter(|&&p| p % 2 == 1).count()
    }

    /// Number of single edges in the covering pattern: `(n - 3k) / 2`.
    pub fn pattern_edges(&self) -> usize {
        (self.n() - 3 * self.odd_parts()) / 2
    }

    /// Multiplicity of each distinct part.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        self.parts.iter().copied().dedup_with_count().map(|(c, p)| (p, c)).collect()
    }
}

impl fmt::Display for PartitionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.parts.iter().join(","))
    }
}

impl FromStr for PartitionShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad part `{p}` in `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        PartitionShape::new(parts)
    }
}

pub fn hamilton_cycles(n: usize) -> Result<SpanningFactors> {
    if n < 3 {
        return Err(invalid(format!("Hamilton cycles need n >= 3, got {n}")));
    }
    SpanningFactors::new(n, &[Piece::Cycle(n)])
}

pub fn hamilton_paths(n: usize) -> Result<SpanningFactors> {
    if n < 2 {
        return Err(invalid(format!("Hamilton paths need n >= 2, got {n}")));
    }
    SpanningFactors::new(n, &[Piece::Path(n)])
}

/// All 2-regular graphs on `[n]`, optionally restricted to one component shape.
/// Without a shape the stream runs over the shapes in [`partitions`] order.
pub fn two_regular_graphs(n: usize, shape: Option<&PartitionShape>) -> Result<GraphStream> {
    if n < 3 {
        return Err(invalid(format!("2-regular graphs need n >= 3, got {n}")));
    }
    match shape {
        Some(p) => {
            p.check_two_regular()?;
            if p.n() != n {
                return Err(Error::InvalidShape {
                    parts: p.parts.clone(),
                    reason: format!("parts sum to {}, expected {n}", p.n()),
                });
            }
            let pieces: Vec<Piece> = p.parts.iter().map(|&k| Piece::Cycle(k)).collect();
            Ok(Box::new(SpanningFactors::new(n, &pieces)?))
        }
        None => {
            if n > MAX_VERTICES {
                return Err(Error::TooManyVertices(n));
            }
            Ok(Box::new(partitions(n, 3).flat_map(move |p| {
                let pieces: Vec<Piece> = p.parts.iter().map(|&k| Piece::Cycle(k)).collect();
                SpanningFactors::new(n, &pieces).expect("partition of n")
            })))
        }
    }
}

pub fn perfect_matchings(n: usize) -> Result<SpanningFactors> {
    if n < 2 || n % 2 == 1 {
        return Err(invalid(format!("perfect matchings need even n >= 2, got {n}")));
    }
    SpanningFactors::new(n, &vec![Piece::Path(2); n / 2])
}

/// One 2-edge path plus a perfect matching on the other `n - 3` vertices.
pub fn near_matchings(n: usize) -> Result<SpanningFactors> {
    if n < 3 || n % 2 == 0 {
        return Err(invalid(format!("near-matchings need odd n >= 3, got {n}")));
    }
    let mut pieces = vec![Piece::Path(3)];
    pieces.extend(std::iter::repeat(Piece::Path(2)).take((n - 3) / 2));
    SpanningFactors::new(n, &pieces)
}

pub fn triangle_factors(n: usize) -> Result<SpanningFactors> {
    if n == 0 || n % 3 != 0 {
        return Err(invalid(format!("triangle factors need 3 | n, got {n}")));
    }
    SpanningFactors::new(n, &vec![Piece::Cycle(3); n / 3])
}

/// Partitions of `n` with every part at least `min_part`, in decreasing
/// lexicographic order (`(6)` before `(3,3)`).
pub fn partitions(n: usize, min_part: usize) -> std::vec::IntoIter<PartitionShape> {
    fn rec(rest: usize, max: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<PartitionShape>) {
        if rest == 0 {
            out.push(PartitionShape { parts: cur.clone() });
            return;
        }
        for part in (min..=max.min(rest)).rev() {
            cur.push(part);
            rec(rest - part, part, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 1 {
        rec(n, n, min_part.max(1), &mut Vec::new(), &mut out);
    }
    out.into_iter()
}

/// The fixed covering pattern for a 2-regular shape: one 2-edge path per odd part on
/// the lowest vertex blocks, then single edges on consecutive pairs.
pub fn pattern_for_shape(shape: &PartitionShape) -> Result<LabeledGraph> {
    shape.check_two_regular()?;
    let n = shape.n();
    let k = shape.odd_parts();
    let mut edges = Vec::new();
    for i in 0..k {
        let b = 3 * i + 1;
        edges.push((b, b + 1));
        edges.push((b + 1, b + 2));
    }
    let mut v = 3 * k + 1;
    while v < n {
        edges.push((v, v + 1));
        v += 2;
    }
    LabeledGraph::new(n, &edges)
}

/// Distinct images of `g` under all permutations of its vertex set, `g` first.
pub fn labeled_copies(g: &LabeledGraph) -> impl Iterator<Item = LabeledGraph> + Send {
    let g = *g;
    let mut seen = HashSet::new();
    (1..=g.n()).permutations(g.n()).filter_map(move |perm| {
        let image = g.relabel(&perm);
        seen.insert(image.mask()).then_some(image)
    })
}

/// The candidate universes families are drawn from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universe {
    HamiltonCycles(usize),
    HamiltonPaths(usize),
    TwoRegular(usize),
    TwoRegularShape(PartitionShape),
    CopiesOf(LabeledGraph),
}

impl Universe {
    pub fn n(&self) -> usize {
        match self {
            Universe::HamiltonCycles(n) | Universe::HamiltonPaths(n) | Universe::TwoRegular(n) => *n,
            Universe::TwoRegularShape(p) => p.n(),
            Universe::CopiesOf(g) => g.n(),
        }
    }

    pub fn stream(&self) -> Result<GraphStream> {
        Ok(match self {
            Universe::HamiltonCycles(n) => Box::new(hamilton_cycles(*n)?),
            Universe::HamiltonPaths(n) => Box::new(hamilton_paths(*n)?),
            Universe::TwoRegular(n) => two_regular_graphs(*n, None)?,
            Universe::TwoRegularShape(p) => two_regular_graphs(p.n(), Some(p))?,
            Universe::CopiesOf(g) => Box::new(labeled_copies(g)),
        })
    }

    /// Members sorted by canonical key.
    pub fn sorted_members(&self) -> Result<Vec<LabeledGraph>> {
        let mut v: Vec<_> = self.stream()?.collect();
        v.sort_unstable();
        Ok(v)
    }

    pub fn contains(&self, g: &LabeledGraph) -> bool {
        if g.n() != self.n() {
            return false;
        }
        match self {
            Universe::HamiltonCycles(_) => g.is_hamilton_cycle(),
            Universe::HamiltonPaths(_) => g.is_hamilton_path(),
            Universe::TwoRegular(_) => g.is_regular(2),
            Universe::TwoRegularShape(p) => g.is_regular(2) && g.components().shape == p.parts,
            Universe::CopiesOf(h) => {
                g.edge_count() == h.edge_count()
                    && (1..=g.n()).permutations(g.n()).any(|perm| h.relabel(&perm) == *g)
            }
        }
    }

    /// Whether the universe is a single orbit of the symmetric group on `[n]`.
    pub fn is_single_orbit(&self) -> bool {
        match self {
            Universe::TwoRegular(n) => *n < 6, // one shape only below 6
            _ => true,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Universe::HamiltonCycles(_) => "hamilton-cycles".into(),
            Universe::HamiltonPaths(_) => "hamilton-paths".into(),
            Universe::TwoRegular(_) => "two-regular".into(),
            Universe::TwoRegularShape(p) => format!("two-regular-shape{p}"),
            Universe::CopiesOf(g) => format!("copies-of({})", g.edges().map(|(u, v)| format!("{u}-{v}")).join(",")),
        }
    }
}

/// Members of `universe` whose edge set contains the edges of `pattern`.
pub fn members_containing(pattern: &LabeledGraph, universe: &Universe) -> Result<impl Iterator<Item = LabeledGraph>> {
    if pattern.n() != universe.n() {
        return Err(Error::MismatchedOrder(pattern.n(), universe.n()));
    }
    let pattern = *pattern;
    Ok(universe.stream()?.filter(move |g| g.contains_subgraph(&pattern)))
}

/// Inclusion-minimal vertex-covering edge subset of a Hamilton cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalCovering {
    pub host: LabeledGraph,
    pub edges: LabeledGraph,
    /// Number of connected components `s`.
    pub components: usize,
    pub two_edge_paths: usize,
}

/// Every minimal covering of the cycle `host`, ordered by edge-subset bitmask over the
/// host's sorted edge list.
pub fn minimal_coverings(host: &LabeledGraph) -> Result<Vec<MinimalCovering>> {
    if !host.is_hamilton_cycle() {
        return Err(invalid(format!("{host:?} is not a Hamilton cycle")));
    }
    let n = host.n();
    let edges: Vec<(usize, usize)> = host.edges().collect();
    let all: u32 = (1..=n).fold(0, |m, v| m | 1 << v);
    let mut out = Vec::new();
    for subset in 0u32..(1 << edges.len()) {
        let chosen: Vec<(usize, usize)> = (0..edges.len()).filter(|i| subset & (1 << i) != 0).map(|i| edges[i]).collect();
        let mut cover = [0u8; MAX_VERTICES + 1];
        for &(u, v) in &chosen {
            cover[u] += 1;
            cover[v] += 1;
        }
        let covered = (1..=n).filter(|&v| cover[v] > 0).fold(0u32, |m, v| m | 1 << v);
        if covered != all {
            continue;
        }
        // minimal iff every edge owns an endpoint covered only by it
        if !chosen.iter().all(|&(u, v)| cover[u] == 1 || cover[v] == 1) {
            continue;
        }
        let sub = LabeledGraph::new(n, &chosen)?;
        let comps = sub.components();
        let two_edge_paths = comps.list.iter().filter(|c| c.kind == ComponentKind::TwoEdgePath).count();
        out.push(MinimalCovering {
            host: *host,
            edges: sub,
            components: comps.list.len(),
            two_edge_paths,
        });
    }
    Ok(out)
}

/// Number of minimal coverings of `host` per component count `s`.
pub fn covering_census(host: &LabeledGraph) -> Result<BTreeMap<usize, usize>> {
    let mut census = BTreeMap::new();
    for c in minimal_coverings(host)? {
        *census.entry(c.components).or_default() += 1;
    }
    Ok(census)
}
