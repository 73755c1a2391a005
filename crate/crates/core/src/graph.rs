//! Labeled simple graphs on `1..=n`, degree analytics and the degree-doubling predicate.
//!
//! Edges live in a single `u128` with one bit per vertex pair. Bit order is the
//! lexicographic order of pairs `(u, v)` with `u < v` over the maximum vertex range,
//! so iterating set bits yields the sorted edge list directly and the bit position of
//! a pair does not depend on `n`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 16;

const fn row_offset(a: usize) -> usize {
    // number of pairs (i, j) with i < a
    let mut off = 0;
    let mut i = 1;
    while i < a {
        off += MAX_VERTICES - i;
        i += 1;
    }
    off
}

const fn pair_bit(u: usize, v: usize) -> usize {
    row_offset(u) + (v - u - 1)
}

const PAIR_COUNT: usize = MAX_VERTICES * (MAX_VERTICES - 1) / 2;

const ENDPOINTS: [(u8, u8); PAIR_COUNT] = {
    let mut table = [(0u8, 0u8); PAIR_COUNT];
    let mut u = 1;
    while u <= MAX_VERTICES {
        let mut v = u + 1;
        while v <= MAX_VERTICES {
            table[pair_bit(u, v)] = (u as u8, v as u8);
            v += 1;
        }
        u += 1;
    }
    table
};

/// `INCIDENT[v]` has the bits of every pair containing `v` (index 0 unused).
const INCIDENT: [u128; MAX_VERTICES + 1] = {
    let mut table = [0u128; MAX_VERTICES + 1];
    let mut u = 1;
    while u <= MAX_VERTICES {
        let mut v = u + 1;
        while v <= MAX_VERTICES {
            let bit = 1u128 << pair_bit(u, v);
            table[u] |= bit;
            table[v] |= bit;
            v += 1;
        }
        u += 1;
    }
    table
};

#[inline]
pub(crate) fn edge_mask(u: usize, v: usize) -> u128 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    1u128 << pair_bit(a, b)
}

/// A simple graph on the vertex set `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    n: u8,
    edges: u128,
}

impl LabeledGraph {
    /// Builds a validated graph from an edge list.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u == v {
                if u < 1 || u > n {
                    return Err(Error::EndpointOutOfRange { u, v, n });
                }
                return Err(Error::LoopEdge(u));
            }
            if u < 1 || v < 1 || u > n || v > n {
                return Err(Error::EndpointOutOfRange { u, v, n });
            }
            let bit = edge_mask(u, v);
            if g.edges & bit != 0 {
                return Err(Error::DuplicateEdge(u, v));
            }
            g.edges |= bit;
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVertices);
        }
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        Ok(LabeledGraph {
            n: n as u8,
            edges: 0,
        })
    }

    /// Crate-internal constructor from a raw mask; callers guarantee validity.
    #[inline]
    pub(crate) fn from_mask(n: usize, edges: u128) -> Self {
        debug_assert!(n >= 1 && n <= MAX_VERTICES);
        LabeledGraph { n: n as u8, edges }
    }

    /// Cycle through the given vertices in order.
    pub fn cycle(n: usize, order: &[usize]) -> Result<Self> {
        let k = order.len();
        let edges: Vec<_> = (0..k).map(|i| (order[i], order[(i + 1) % k])).collect();
        Self::new(n, &edges)
    }

    /// Path through the given vertices in order.
    pub fn path(n: usize, order: &[usize]) -> Result<Self> {
        let edges: Vec<_> = order.windows(2).map(|w| (w[0], w[1])).collect();
        Self::new(n, &edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub(crate) fn mask(&self) -> u128 {
        self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.count_ones() as usize
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u >= 1 && v >= 1 && u <= self.n() && v <= self.n() && self.edges & edge_mask(u, v) != 0
    }

    /// Edges as sorted pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut word = self.edges;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let bit = word.trailing_zeros() as usize;
            word &= word - 1;
            let (u, v) = ENDPOINTS[bit];
            Some((u as usize, v as usize))
        })
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        (self.edges & INCIDENT[v]).count_ones() as usize
    }

    /// Neighbors of `v` as a bitmask over vertex labels (bit `u` set for neighbor `u`).
    pub fn neighbor_mask(&self, v: usize) -> u32 {
        let mut word = self.edges & INCIDENT[v];
        let mut out = 0u32;
        while word != 0 {
            let bit = word.trailing_zeros() as usize;
            word &= word - 1;
            let (a, b) = ENDPOINTS[bit];
            out |= 1 << if a as usize == v { b } else { a };
        }
        out
    }

    pub fn contains_subgraph(&self, pattern: &LabeledGraph) -> bool {
        self.n == pattern.n && pattern.edges & !self.edges == 0
    }

    pub fn union(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        self.same_order(other)?;
        Ok(LabeledGraph::from_mask(self.n(), self.edges | other.edges))
    }

    pub fn intersection(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        self.same_order(other)?;
        Ok(LabeledGraph::from_mask(self.n(), self.edges & other.edges))
    }

    /// Removes one edge; the edge need not be present.
    pub fn without_edge(&self, u: usize, v: usize) -> LabeledGraph {
        LabeledGraph::from_mask(self.n(), self.edges & !edge_mask(u, v))
    }

    fn same_order(&self, other: &LabeledGraph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::MismatchedOrder(self.n(), other.n()));
        }
        Ok(())
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees: Vec<usize> = (1..=self.n()).map(|v| self.degree(v)).collect();
        let max = degrees.iter().copied().max().unwrap_or(0);
        DegreeProfile {
            average: Ratio::new(2 * self.edge_count() as i64, self.n() as i64),
            degrees,
            max,
        }
    }

    pub fn is_regular(&self, d: usize) -> bool {
        (1..=self.n()).all(|v| self.degree(v) == d)
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&v| self.degree(v) == 0).collect()
    }

    pub fn has_isolated_vertex(&self) -> bool {
        (1..=self.n()).any(|v| self.edges & INCIDENT[v] == 0)
    }

    /// Image under the vertex map `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> LabeledGraph {
        debug_assert_eq!(perm.len(), self.n());
        let mut out = 0u128;
        for (u, v) in self.edges() {
            out |= edge_mask(perm[u - 1], perm[v - 1]);
        }
        LabeledGraph::from_mask(self.n(), out)
    }

    /// Byte key `[n, u1, v1, u2, v2, ...]` over the sorted edge list.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(1 + 2 * self.edge_count());
        key.push(self.n);
        for (u, v) in self.edges() {
            key.push(u as u8);
            key.push(v as u8);
        }
        key
    }

    pub fn components(&self) -> Components {
        let n = self.n();
        let adj: Vec<u32> = (0..=n)
            .map(|v| if v == 0 { 0 } else { self.neighbor_mask(v) })
            .collect();
        let mut seen = 0u32;
        let mut list = Vec::new();
        for start in 1..=n {
            if seen & (1 << start) != 0 {
                continue;
            }
            let mut comp = 1u32 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = adj[v] & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            seen |= comp;
            let vertices: Vec<usize> = (1..=n).filter(|&v| comp & (1 << v) != 0).collect();
            let edge_total: usize = vertices.iter().map(|&v| self.degree(v)).sum::<usize>() / 2;
            let k = vertices.len();
            let max_deg = vertices.iter().map(|&v| self.degree(v)).max().unwrap_or(0);
            let kind = match (k, edge_total, max_deg) {
                (1, 0, _) => ComponentKind::IsolatedVertex,
                (2, 1, _) => ComponentKind::SingleEdge,
                (3, 2, _) => ComponentKind::TwoEdgePath,
                (k, e, 2) if e == k => ComponentKind::Cycle(k),
                (k, e, 2) if e + 1 == k => ComponentKind::Path(k),
                _ => ComponentKind::Other,
            };
            list.push(Component { vertices, kind });
        }
        let mut shape: Vec<usize> = list.iter().map(|c| c.vertices.len()).collect();
        shape.sort_unstable_by(|a, b| b.cmp(a));
        Components { list, shape }
    }

    pub fn is_hamilton_cycle(&self) -> bool {
        self.n() >= 3 && self.is_regular(2) && self.components().list.len() == 1
    }

    pub fn is_hamilton_path(&self) -> bool {
        let c = self.components();
        c.list.len() == 1
            && matches!(
                c.list[0].kind,
                ComponentKind::SingleEdge | ComponentKind::TwoEdgePath | ComponentKind::Path(_)
            )
    }

    /// Edge-list text: `n <count>` then one sorted `u v` line per edge.
    pub fn to_edge_list_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["n", count] => count
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?,
            _ => return Err(Error::Parse(format!("expected `n <count>`, got `{header}`"))),
        };
        let mut edges = Vec::new();
        for line in lines {
            let parts: Vec<_> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("expected `u v`, got `{line}`")));
            }
            let u = parts[0].parse().map_err(|_| Error::Parse(format!("bad vertex `{}`", parts[0])))?;
            let v = parts[1].parse().map_err(|_| Error::Parse(format!("bad vertex `{}`", parts[1])))?;
            edges.push((u, v));
        }
        Self::new(n, &edges)
    }
}

impl Ord for LabeledGraph {
    /// Lexicographic order on the canonical key.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.edges().cmp(other.edges()))
    }
}

impl PartialOrd for LabeledGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}[", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for LabeledGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRecord {
            n: self.n(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LabeledGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = GraphRecord::deserialize(deserializer)?;
        let edges: Vec<_> = rec.edges.iter().map(|e| (e[0], e[1])).collect();
        LabeledGraph::new(rec.n, &edges).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub max: usize,
    pub average: Ratio<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    IsolatedVertex,
    SingleEdge,
    TwoEdgePath,
    /// Path on this many vertices (at least 4).
    Path(usize),
    Cycle(usize),
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub kind: ComponentKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub list: Vec<Component>,
    /// Component sizes, non-increasing.
    pub shape: Vec<usize>,
}

/// Condition a pairwise union must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DoublingPredicate {
    MaxDegreeAtLeast(usize),
    AverageDegreeAtLeast(Ratio<i64>),
}

impl Default for DoublingPredicate {
    fn default() -> Self {
        DoublingPredicate::MaxDegreeAtLeast(4)
    }
}

impl DoublingPredicate {
    pub fn average(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num < 0 {
            return Err(Error::InvalidParameter(format!(
                "average-degree threshold {num}/{den} must be a non-negative rational"
            )));
        }
        Ok(DoublingPredicate::AverageDegreeAtLeast(Ratio::new(num, den)))
    }

    pub fn accepts(&self, profile: &DegreeProfile) -> bool {
        match *self {
            DoublingPredicate::MaxDegreeAtLeast(d) => profile.max >= d,
            DoublingPredicate::AverageDegreeAtLeast(alpha) => profile.average >= alpha,
        }
    }

    /// Evaluates the predicate on the union of `f` and `g` without building a profile.
    #[inline]
    pub(crate) fn accepts_union_mask(&self, n: usize, union: u128) -> bool {
        match *self {
            DoublingPredicate::MaxDegreeAtLeast(d) => {
                d == 0 || (1..=n).any(|v| (union & INCIDENT[v]).count_ones() as usize >= d)
            }
            DoublingPredicate::AverageDegreeAtLeast(alpha) => {
                // 2|E| / n >= p / q  <=>  2|E| q >= p n
                2 * union.count_ones() as i64 * alpha.denom() >= alpha.numer() * n as i64
            }
        }
    }
}

impl fmt::Display for DoublingPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DoublingPredicate::MaxDegreeAtLeast(d) => write!(f, "maxdeg:{d}"),
            DoublingPredicate::AverageDegreeAtLeast(a) => write!(f, "avgdeg:{a}"),
        }
    }
}

impl FromStr for DoublingPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("predicate `{s}` is not `maxdeg:d` or `avgdeg:a`")))?;
        match tag {
            "maxdeg" => value
                .parse()
                .map(DoublingPredicate::MaxDegreeAtLeast)
                .map_err(|_| Error::Parse(format!("bad degree threshold `{value}`"))),
            "avgdeg" => {
                let (num, den) = match value.split_once('/') {
                    Some((a, b)) => (a.trim().parse(), b.trim().parse()),
                    None => (value.trim().parse(), Ok(1)),
                };
                match (num, den) {
                    (Ok(a), Ok(b)) => DoublingPredicate::average(a, b),
                    _ => Err(Error::Parse(format!("bad rational threshold `{value}`"))),
                }
            }
            _ => Err(Error::Parse(format!("unknown predicate `{tag}`"))),
        }
    }
}

/// True iff the union of `f` and `g` satisfies `pred`.
pub fn doubling_compatible(f: &LabeledGraph, g: &LabeledGraph, pred: &DoublingPredicate) -> Result<bool> {
    f.same_order(g)?;
    Ok(pred.accepts_union_mask(f.n(), f.edges | g.edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(n: usize, order: &[usize]) -> LabeledGraph {
        LabeledGraph::cycle(n, order).unwrap()
    }

    #[test]
    fn construction_and_validation() {
        let g = LabeledGraph::new(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2), (1, 4), (2, 3), (3, 4)]);
        assert_eq!(LabeledGraph::new(3, &[]).unwrap().edge_count(), 0);
        assert_eq!(LabeledGraph::new(3, &[(1, 1)]), Err(Error::LoopEdge(1)));
        assert_eq!(LabeledGraph::new(3, &[(1, 2), (2, 1)]), Err(Error::DuplicateEdge(2, 1)));
        assert_eq!(
            LabeledGraph::new(3, &[(1, 4)]),
            Err(Error::EndpointOutOfRange { u: 1, v: 4, n: 3 })
        );
        assert_eq!(LabeledGraph::new(0, &[]), Err(Error::NoVertices));
        assert!(LabeledGraph::new(17, &[]).is_err());
        let big = LabeledGraph::new(16, &[(15, 16), (1, 16)]).unwrap();
        assert_eq!(big.edges().collect::<Vec<_>>(), vec![(1, 16), (15, 16)]);
    }

    #[test]
    fn union_and_intersection_examples() {
        let a = c(5, &[1, 2, 3, 4, 5]);
        let b = c(5, &[1, 3, 5, 2, 4]);
        let u = a.union(&b).unwrap();
        assert_eq!(u.edge_count(), 10);
        assert!(u.is_regular(4));
        assert_eq!(a.union(&a).unwrap(), a);

        let p = c(4, &[1, 2, 3, 4]);
        let q = c(4, &[1, 2, 4, 3]);
        let u = p.union(&q).unwrap();
        assert_eq!(u.edge_count(), 6);
        assert!(u.is_regular(3));
        let i = p.intersection(&q).unwrap();
        assert_eq!(i.edges().collect::<Vec<_>>(), vec![(1, 2), (3, 4)]);
        assert_eq!(a.intersection(&b).unwrap().edge_count(), 0);
        assert_eq!(
            a.union(&p),
            Err(Error::MismatchedOrder(5, 4))
        );
    }

    #[test]
    fn degree_profiles() {
        let p = c(4, &[1, 2, 3, 4]).degree_profile();
        assert_eq!(p.degrees, vec![2, 2, 2, 2]);
        assert_eq!(p.max, 2);
        assert_eq!(p.average, Ratio::from_integer(2));
        let e = LabeledGraph::empty(3).unwrap().degree_profile();
        assert_eq!((e.degrees, e.max, e.average), (vec![0, 0, 0], 0, Ratio::from_integer(0)));
        let u = c(5, &[1, 2, 3, 4, 5]).union(&c(5, &[1, 3, 5, 2, 4])).unwrap().degree_profile();
        assert_eq!((u.max, u.average), (4, Ratio::from_integer(4)));
    }

    #[test]
    fn compatibility_examples() {
        let d = DoublingPredicate::default();
        let a = c(5, &[1, 2, 3, 4, 5]);
        let b = c(5, &[1, 3, 5, 2, 4]);
        assert!(doubling_compatible(&a, &b, &d).unwrap());
        assert!(!doubling_compatible(&a, &a, &d).unwrap());
        assert!(!doubling_compatible(&c(4, &[1, 2, 3, 4]), &c(4, &[1, 2, 4, 3]), &d).unwrap());
        // average exactly at the threshold counts
        let avg4 = DoublingPredicate::average(4, 1).unwrap();
        assert!(doubling_compatible(&a, &b, &avg4).unwrap());
        let avg9_2 = DoublingPredicate::average(9, 2).unwrap();
        assert!(!doubling_compatible(&a, &b, &avg9_2).unwrap());
    }

    #[test]
    fn isolated_and_components() {
        assert_eq!(LabeledGraph::empty(3).unwrap().isolated_vertices(), vec![1, 2, 3]);
        assert!(c(4, &[1, 2, 3, 4]).isolated_vertices().is_empty());
        assert_eq!(LabeledGraph::new(5, &[(1, 2)]).unwrap().isolated_vertices(), vec![3, 4, 5]);

        let tri = LabeledGraph::new(6, &[(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]).unwrap();
        let comps = tri.components();
        assert_eq!(comps.list.len(), 2);
        assert!(comps.list.iter().all(|c| c.kind == ComponentKind::Cycle(3)));
        assert_eq!(comps.shape, vec![3, 3]);

        let mixed = LabeledGraph::new(5, &[(1, 2), (3, 4), (4, 5)]).unwrap().components();
        let kinds: Vec<_> = mixed.list.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, vec![ComponentKind::SingleEdge, ComponentKind::TwoEdgePath]);

        let ham = c(6, &[1, 3, 2, 5, 4, 6]).components();
        assert_eq!(ham.list.len(), 1);
        assert_eq!(ham.list[0].kind, ComponentKind::Cycle(6));
        let star = LabeledGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap().components();
        assert_eq!(star.list[0].kind, ComponentKind::Other);
        let p4 = LabeledGraph::path(4, &[2, 1, 4, 3]).unwrap();
        assert_eq!(p4.components().list[0].kind, ComponentKind::Path(4));
        assert!(p4.is_hamilton_path());
    }

    #[test]
    fn canonical_keys() {
        let a = LabeledGraph::new(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let b = LabeledGraph::new(4, &[(4, 1), (3, 4), (1, 2), (2, 3)]).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_ne!(a.canonical_key(), c(4, &[1, 2, 4, 3]).canonical_key());
        assert_ne!(
            LabeledGraph::empty(3).unwrap().canonical_key(),
            LabeledGraph::empty(4).unwrap().canonical_key()
        );
        assert_eq!(a.canonical_key(), vec![4, 1, 2, 1, 4, 2, 3, 3, 4]);
    }

    #[test]
    fn edge_list_text_format() {
        let g = c(4, &[1, 2, 3, 4]);
        let text = g.to_edge_list_text();
        assert_eq!(text, "n 4\n1 2\n1 4\n2 3\n3 4\n");
        assert_eq!(LabeledGraph::from_edge_list_text(&text).unwrap(), g);
        assert!(LabeledGraph::from_edge_list_text("m 4\n").is_err());
        assert!(LabeledGraph::from_edge_list_text("n 3\n1 1\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = c(5, &[1, 3, 5, 2, 4]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":5,"edges":[[1,3],[1,4],[2,4],[2,5],[3,5]]}"#);
        assert_eq!(serde_json::from_str::<LabeledGraph>(&s).unwrap(), g);
    }

    #[test]
    fn predicate_parsing() {
        assert_eq!("maxdeg:4".parse::<DoublingPredicate>().unwrap(), DoublingPredicate::default());
        let p: DoublingPredicate = "avgdeg:9/2".parse().unwrap();
        assert_eq!(p.to_string(), "avgdeg:9/2");
        assert!("avgdeg:-1".parse::<DoublingPredicate>().is_err());
        assert!("deg:4".parse::<DoublingPredicate>().is_err());
    }

    fn arb_graph(n: usize) -> impl Strategy<Value = LabeledGraph> {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 1..=n {
                for v in u + 1..=n {
                    if bits[i] {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            LabeledGraph::new(n, &edges).unwrap()
        })
    }

    fn arb_pair() -> impl Strategy<Value = (LabeledGraph, LabeledGraph)> {
        (1usize..=9).prop_flat_map(|n| (arb_graph(n), arb_graph(n)))
    }

    proptest! {
        #[test]
        fn degree_additivity((f, g) in arb_pair()) {
            let u = f.union(&g).unwrap();
            let i = f.intersection(&g).unwrap();
            for x in 1..=f.n() {
                prop_assert_eq!(u.degree(x) + i.degree(x), f.degree(x) + g.degree(x));
            }
        }

        #[test]
        fn profile_sums((f, _g) in arb_pair()) {
            let p = f.degree_profile();
            prop_assert_eq!(p.degrees.iter().sum::<usize>(), 2 * f.edge_count());
            prop_assert!(Ratio::from_integer(p.max as i64) >= p.average);
        }

        #[test]
        fn compatibility_is_symmetric((f, g) in arb_pair(), d in 0usize..6, a in 0i64..12) {
            for pred in [DoublingPredicate::MaxDegreeAtLeast(d), DoublingPredicate::average(a, 2).unwrap()] {
                prop_assert_eq!(
                    doubling_compatible(&f, &g, &pred).unwrap(),
                    doubling_compatible(&g, &f, &pred).unwrap()
                );
                prop_assert_eq!(
                    doubling_compatible(&f, &g, &pred).unwrap(),
                    pred.accepts(&f.union(&g).unwrap().degree_profile())
                );
            }
        }

        #[test]
        fn key_stable_under_shuffle(perm in Just((0..15).collect::<Vec<usize>>()).prop_shuffle(), g in arb_graph(6)) {
            let edges: Vec<_> = g.edges().collect();
            let shuffled: Vec<_> = perm.iter().filter(|&&i| i < edges.len()).map(|&i| {
                let (u, v) = edges[i];
                if i % 2 == 0 { (v, u) } else { (u, v) }
            }).collect();
            let h = LabeledGraph::new(6, &shuffled).unwrap();
            prop_assert_eq!(h.canonical_key(), g.canonical_key());
        }

        #[test]
        fn ord_matches_key_order((f, g) in arb_pair()) {
            prop_assert_eq!(f.cmp(&g), f.canonical_key().cmp(&g.canonical_key()));
        }
    }
}
