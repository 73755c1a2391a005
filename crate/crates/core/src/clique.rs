//! Maximum clique search on bitset adjacency.
//!
//! Branch and bound in the style of MCQ/BBMC: vertices are renumbered by
//! non-increasing degree, each node greedily colors its candidate set into
//! independent classes, and a vertex is only expanded while `|C| + color` can still
//! beat the incumbent. The search is sequential so the node count and the returned
//! witness are reproducible.

use std::time::Instant;

use rayon::prelude::*;

use crate::bits::BitSet;

/// Symmetric irreflexive relation on `0..order`, stored as adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityGraph {
    rows: Vec<BitSet>,
    keys: Vec<Vec<u8>>,
}

impl CompatibilityGraph {
    /// Evaluates `related` on every unordered pair, in parallel over rows.
    pub fn from_relation<T, F>(items: &[T], keys: Vec<Vec<u8>>, related: F) -> Self
    where
        T: Sync,
        F: Fn(&T, &T) -> bool + Sync,
    {
        let n = items.len();
        let upper: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).filter(|&j| related(&items[i], &items[j])).collect())
            .collect();
        let mut rows = vec![BitSet::new(n); n];
        for (i, js) in upper.into_iter().enumerate() {
            for j in js {
                rows[i].insert(j);
                rows[j].insert(i);
            }
        }
        CompatibilityGraph { rows, keys }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn row(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum::<usize>() / 2
    }

    pub fn candidate_keys(&self) -> &[Vec<u8>] {
        &self.keys
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(a, &i)| vertices[a + 1..].iter().all(|&j| self.adjacent(i, j)))
    }
}

#[derive(Clone, Debug, Default)]
pub struct CliqueOptions {
    pub deadline: Option<Instant>,
    /// Restrict to cliques containing this vertex. Exact for the whole graph when the
    /// graph is vertex-transitive.
    pub root: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueOutcome {
    /// Original vertex indices, ascending.
    pub clique: Vec<usize>,
    /// False if the deadline stopped the search early.
    pub exact: bool,
    pub nodes: u64,
}

struct Search {
    adj: Vec<BitSet>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Search {
    fn expand(&mut self, mut candidates: BitSet) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        let order = self.color_sort(&candidates);
        for &(v, color) in order.iter().rev() {
            if self.current.len() + color <= self.best.len() || self.timed_out {
                return;
            }
            self.current.push(v);
            let next = candidates.intersection(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            candidates.remove(v);
        }
    }

    /// Greedy sequential coloring of `candidates`; returns `(vertex, color)` for the
    /// vertices whose color could still improve on the incumbent, colors ascending.
    fn color_sort(&self, candidates: &BitSet) -> Vec<(usize, usize)> {
        let min_color = (self.best.len() + 1).saturating_sub(self.current.len()).max(1);
        let mut uncolored = candidates.clone();
        let mut out = Vec::new();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut class = uncolored.clone();
            while let Some(v) = class.first() {
                uncolored.remove(v);
                class.remove(v);
                class.difference_with(&self.adj[v]);
                if color >= min_color {
                    out.push((v, color));
                }
            }
        }
        out
    }
}

/// Finds a maximum clique, or the best clique found before the deadline.
pub fn max_clique(graph: &CompatibilityGraph, opts: &CliqueOptions) -> CliqueOutcome {
    let n = graph.order();
    if n == 0 {
        return CliqueOutcome {
            clique: Vec::new(),
            exact: true,
            nodes: 0,
        };
    }
    // renumber by non-increasing degree, ties by index
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
    let mut position = vec![0; n];
    for (p, &v) in perm.iter().enumerate() {
        position[v] = p;
    }
    let adj: Vec<BitSet> = perm
        .iter()
        .map(|&v| {
            let mut row = BitSet::new(n);
            for u in graph.row(v).iter() {
                row.insert(position[u]);
            }
            row
        })
        .collect();

    let mut search = Search {
        best: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        deadline: opts.deadline,
        timed_out: false,
        adj,
    };
    // incumbent: greedy clique in degree order
    let mut seed = Vec::new();
    let mut pool = BitSet::full(n);
    if let Some(r) = opts.root {
        seed.push(position[r]);
        pool.intersect_with(&search.adj[position[r]]);
    }
    while let Some(v) = pool.first() {
        seed.push(v);
        pool.intersect_with(&search.adj[v]);
    }
    search.best = seed;

    match opts.root {
        Some(r) => {
            let r = position[r];
            search.current.push(r);
            let next = search.adj[r].clone();
            if !next.is_empty() {
                search.expand(next);
            }
        }
        None => search.expand(BitSet::full(n)),
    }
    let mut clique: Vec<usize> = search.best.iter().map(|&p| perm[p]).collect();
    clique.sort_unstable();
    CliqueOutcome {
        clique,
        exact: !search.timed_out,
        nodes: search.nodes,
    }
}
