//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails, except those listed in `KNOWN_FALSE`, which must fail.

use std::collections::{BTreeMap, HashSet};
use std::process::Command;
use std::time::{Duration, Instant};

use degree_doubling::bounds::{self, BoundValue};
use degree_doubling::distinguish::{nu, shannon_distinguishable};
use degree_doubling::enumeration::{
    hamilton_cycles, labeled_copies, partitions, pattern_for_shape, two_regular_graphs, PartitionShape, Universe,
};
use degree_doubling::families::{
    greedy_family, incompatible_count, is_inclusion_maximal, sandwich, solve_universe, triangle_family,
    verify_family, Relation, SolveStatus,
};
use degree_doubling::{doubling_compatible, DoublingPredicate, LabeledGraph};
use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;

const BUDGET: Duration = Duration::from_secs(300);

/// Sub-criteria that are false as stated; they are reported red and must stay red.
const KNOWN_FALSE: &[&str] = &["8c"];

struct Line {
    id: &'static str,
    pass: bool,
    text: String,
}

#[derive(Default)]
struct Suite {
    lines: Vec<Line>,
}

impl Suite {
    fn record(&mut self, id: &'static str, title: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let text = format!("[{tag}] {id:<3} {title}: {detail}");
        println!("{text}");
        self.lines.push(Line { id, pass, text });
    }
}

fn seq(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// Hamilton cycles from vertex sequences that start at 1, without the enumeration module.
fn cycle_oracle(n: usize) -> Vec<LabeledGraph> {
    let set: HashSet<LabeledGraph> = (2..=n)
        .permutations(n - 1)
        .map(|rest| {
            let mut order = vec![1];
            order.extend(rest);
            LabeledGraph::cycle(n, &order).unwrap()
        })
        .collect();
    set.into_iter().sorted().collect()
}

fn path_oracle(n: usize) -> Vec<LabeledGraph> {
    let set: HashSet<LabeledGraph> = seq(n)
        .into_iter()
        .permutations(n)
        .map(|order| LabeledGraph::path(n, &order).unwrap())
        .collect();
    set.into_iter().sorted().collect()
}

/// Spanning edge subsets of `host` whose degrees are all 1, or one 2 and the rest 1.
fn host_patterns(host: &LabeledGraph, near: bool) -> usize {
    let n = host.n();
    let edges: Vec<(usize, usize)> = host.edges().collect();
    (0u32..1 << edges.len())
        .filter(|mask| {
            let chosen: Vec<_> = (0..edges.len()).filter(|i| mask & (1 << i) != 0).map(|i| edges[i]).collect();
            let mut deg = vec![0usize; n + 1];
            for (u, v) in chosen {
                deg[u] += 1;
                deg[v] += 1;
            }
            let twos = deg[1..].iter().filter(|&&d| d == 2).count();
            let ones = deg[1..].iter().filter(|&&d| d == 1).count();
            if near {
                twos == 1 && ones == n - 1
            } else {
                ones == n
            }
        })
        .count()
}

/// Largest pairwise-valid subset, by scanning all subsets.
fn subset_max(candidates: &[LabeledGraph], ok: impl Fn(&LabeledGraph, &LabeledGraph) -> bool) -> usize {
    let m = candidates.len();
    assert!(m <= 20);
    (0u32..1 << m)
        .filter(|mask| {
            (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .tuple_combinations()
                .all(|(i, j)| ok(&candidates[i], &candidates[j]))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

fn max_degree_union(f: &LabeledGraph, g: &LabeledGraph) -> usize {
    f.union(g).unwrap().degree_profile().max
}

/// Partitions of `n` into parts of size at most `cap`, by plain recursion.
fn partition_oracle(n: usize, cap: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=cap.min(n)).map(|k| partition_oracle(n - k, k)).sum()
}

fn le(bound: &BoundValue, x: usize) -> bool {
    matches!(bound.cmp_integer(&BigInt::from(x)), Some(std::cmp::Ordering::Greater | std::cmp::Ordering::Equal))
}

fn ge(bound: &BoundValue, x: usize) -> bool {
    matches!(bound.cmp_integer(&BigInt::from(x)), Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_doubling")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn main() {
    let mut s = Suite::default();
    let pred = DoublingPredicate::default();
    let started = Instant::now();

    // 1
    let t = Instant::now();
    let counts: Vec<usize> = (4..=8).map(|n| hamilton_cycles(n).unwrap().count()).collect();
    let elapsed = t.elapsed();
    let oracle_ok = (4..=7).all(|n| {
        let mut got: Vec<_> = hamilton_cycles(n).unwrap().collect();
        got.sort();
        got == cycle_oracle(n)
    });
    s.record(
        "1",
        "Hamilton cycle counts n=4..8",
        counts == [3, 12, 60, 360, 2520] && oracle_ok && elapsed < Duration::from_secs(10),
        format!("{counts:?}, sequence oracle equal for n<=7: {oracle_ok}, {elapsed:.2?}"),
    );

    // 2
    let t = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [4, 6, 8] {
        let p = LabeledGraph::new(n, &(1..n).step_by(2).map(|v| (v, v + 1)).collect_vec()).unwrap();
        let oracle = cycle_oracle(n).iter().filter(|c| c.contains_subgraph(&p)).count();
        let formula = bounds::eq1_count(n as u64).unwrap();
        ok &= formula == BigInt::from(oracle);
        detail.push(format!("n={n}: formula {formula}, oracle {oracle}"));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    s.record("2", "matching-cycle count vs oracle", ok, format!("{}; {elapsed:.2?}", detail.join(", ")));

    // 3
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [5, 7] {
        let mut edges = vec![(1, 2), (2, 3)];
        edges.extend((4..n).step_by(2).map(|v| (v, v + 1)));
        let p = LabeledGraph::new(n, &edges).unwrap();
        let oracle = cycle_oracle(n).iter().filter(|c| c.contains_subgraph(&p)).count();
        let formula = bounds::near_count(n as u64).unwrap();
        ok &= formula == BigInt::from(oracle);
        detail.push(format!("n={n}: formula {formula}, oracle {oracle}"));
    }
    s.record("3", "near-matching-cycle count vs oracle", ok, detail.join(", "));

    // 4
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [4, 6] {
        let per: HashSet<usize> = cycle_oracle(n).iter().map(|c| host_patterns(c, false)).collect();
        ok &= per == HashSet::from([2]);
        detail.push(format!("n={n}: matchings per cycle {per:?}"));
    }
    for n in [5, 7] {
        let per: HashSet<usize> = cycle_oracle(n).iter().map(|c| host_patterns(c, true)).collect();
        ok &= per.len() == 1;
        detail.push(format!("n={n}: near-matchings per cycle {per:?}"));
    }
    s.record("4", "uniform covering premise", ok, detail.join(", "));

    // 5
    let mut q: BTreeMap<usize, usize> = BTreeMap::new();
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 4..=7 {
        let t = Instant::now();
        let r = solve_universe(&Universe::HamiltonCycles(n), Relation::default(), BUDGET).unwrap();
        let b = bounds::theorem1_bounds(n as u64, 128).unwrap();
        let within = r.status == SolveStatus::Exact
            && verify_family(&r.witness).valid
            && BigInt::from(r.value) <= b.upper
            && BigInt::from(r.value) <= b.upper_weak;
        let vacuous = b.lower.hi() < &BigRational::from_integer(1.into());
        ok &= within && vacuous;
        q.insert(n, r.value);
        let (lo, hi) = b.lower.decimal_bounds(4);
        detail.push(format!(
            "Q({n})={} [{}] <= {} and {}, lower formula in [{lo}, {hi}] ({:.1?})",
            r.value,
            r.status,
            b.upper,
            b.upper_weak,
            t.elapsed()
        ));
    }
    ok &= q[&4] == 1;
    let oracle_small: Vec<usize> = [4, 5]
        .iter()
        .map(|&n| subset_max(&cycle_oracle(n), |a, b| max_degree_union(a, b) >= 4))
        .collect();
    ok &= oracle_small == [q[&4], q[&5]];
    detail.push(format!("subset oracle n=4,5: {oracle_small:?}"));
    s.record("5", "exact Q(n), n=4..7, within upper bounds", ok, detail.join("; "));

    let q8_budget = std::env::var("ACCEPTANCE_Q8_SECONDS").ok().and_then(|v| v.parse().ok()).unwrap_or(20);
    let r8 = solve_universe(&Universe::HamiltonCycles(8), Relation::default(), Duration::from_secs(q8_budget)).unwrap();
    let b8 = bounds::theorem1_bounds(8, 128).unwrap();
    s.record(
        "5b",
        "Q(8) best effort",
        verify_family(&r8.witness).valid && BigInt::from(r8.value) <= b8.upper,
        format!("value {} [{}] after {q8_budget}s budget, {} nodes, upper bound {}", r8.value, r8.status, r8.nodes_explored, b8.upper),
    );

    // 6
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 4..=8 {
        let u = Universe::HamiltonCycles(n);
        let c = u.sorted_members().unwrap();
        let fam = greedy_family(c.iter().copied(), Relation::default(), u.clone()).unwrap();
        let valid = verify_family(&fam).valid;
        let maximal = is_inclusion_maximal(&fam, &c);
        // independent maximality recheck with explicit unions
        let chosen: HashSet<_> = fam.members().iter().collect();
        let recheck = c
            .iter()
            .filter(|g| !chosen.contains(g))
            .all(|g| fam.members().iter().any(|h| max_degree_union(g, h) < 4));
        let bounded = q.get(&n).is_none_or(|&e| fam.len() <= e);
        ok &= valid && maximal && recheck && bounded;
        detail.push(format!("n={n}: size {}{}", fam.len(), q.get(&n).map(|e| format!(" <= {e}")).unwrap_or_default()));
    }
    s.record("6", "greedy valid, maximal, below exact", ok, detail.join(", "));

    // 7
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 4..=8 {
        let h = LabeledGraph::cycle(n, &seq(n)).unwrap();
        let count = incompatible_count(&h, &pred).unwrap();
        let oracle = cycle_oracle(n).iter().filter(|c| max_degree_union(c, &h) < 4).count();
        let fb = bounds::final_bound(n as u64, 128);
        let below = fb.cmp_integer(&BigInt::from(count)) == Some(std::cmp::Ordering::Greater);
        let eq3 = bounds::eq3_bound(n as u64);
        ok &= count == oracle && below;
        detail.push(format!(
            "n={n}: {count} <= {} (eq3 sum {eq3}, discrepancy {})",
            fb.decimal_bounds(6).1,
            eq3 < BigInt::from(count)
        ));
    }
    let (code, coverings) = run_cli(&["verify", "--check", "coverings", "--n", "6", "--format", "csv"]);
    let coverings = String::from_utf8(coverings).unwrap();
    let flagged = coverings.contains("coverings,6,s=2,\"C(s, n-2s)\",1,3,=,false,false,true")
        && coverings.contains("coverings,6,s=3,\"C(s, n-2s)\",1,2,=,false,false,true");
    ok &= code == 0 && flagged;
    detail.push(format!("hexagon coverings 3 and 2 vs formula 1 and 1 flagged: {flagged}"));
    s.record("7", "incompatible cycles below the chained bound", ok, detail.join("; "));

    // 8
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 3..=9 {
        let fam = triangle_family(n).unwrap();
        let valid = verify_family(&fam).valid;
        ok &= valid;
        if n % 3 == 0 {
            let closed = bounds::factorial(n as u64)
                / (bounds::factorial(n as u64 / 3) * BigInt::from(6).pow(n as u32 / 3));
            ok &= BigInt::from(fam.len()) == closed;
            detail.push(format!("n={n}: {} = {closed}", fam.len()));
        } else {
            detail.push(format!("n={n}: {}", fam.len()));
        }
    }
    let sizes: Vec<usize> = [3, 6, 9].iter().map(|&n| triangle_family(n).unwrap().len()).collect();
    ok &= sizes == [1, 10, 280];
    s.record("8a", "triangle families valid with closed-form sizes", ok, detail.join(", "));

    let universe6 = Universe::TwoRegular(6);
    let all6 = two_regular_graphs(6, None).unwrap().count();
    let r6 = solve_universe(&universe6, Relation::default(), BUDGET).unwrap();
    s.record(
        "8b",
        "exact R(6) over all 2-regular graphs on 6 vertices",
        all6 == 70 && r6.status == SolveStatus::Exact && r6.value >= 10 && verify_family(&r6.witness).valid,
        format!("{all6} graphs, R(6) = {} [{}]", r6.value, r6.status),
    );

    let mut f_detail = Vec::new();
    let mut c_detail = Vec::new();
    let mut m_detail = Vec::new();
    let (mut f_ok, mut c_ok, mut m_ok) = (true, true, true);
    for n in 3..=7 {
        for p in partitions(n, 3) {
            let b = bounds::shape_bounds(&p).unwrap();
            let members = Universe::TwoRegularShape(p.clone()).sorted_members().unwrap();
            let fixed = pattern_for_shape(&p).unwrap();
            let class = members.iter().filter(|g| g.contains_subgraph(&fixed)).count();
            let f = le(&BoundValue::Rational(b.f_upper.clone()), members.len());
            f_ok &= f;
            f_detail.push(format!("{p}: {} vs {}{}", members.len(), b.f_upper, if f { "" } else { " VIOLATED" }));
            let c = ge(&BoundValue::Rational(b.c_lower.clone()), class);
            c_ok &= c;
            c_detail.push(format!("{p}: {class} vs {}", b.c_lower));
            let m = if let (1, Some(&v)) = (p.parts().len(), q.get(&n)) {
                v
            } else {
                let r = solve_universe(&Universe::TwoRegularShape(p.clone()), Relation::default(), BUDGET).unwrap();
                m_ok &= r.status == SolveStatus::Exact;
                r.value
            };
            let within = le(&BoundValue::Rational(b.m_upper.clone()), m);
            m_ok &= within;
            m_detail.push(format!("{p}: {m} <= {}", b.m_upper));
        }
    }
    s.record("8c", "|F(p)| <= n!/(t! 2^t prod n_i) for every shape, n<=7", f_ok, f_detail.join(", "));
    s.record("8d", "|C(p)| >= (k+l)!/(n t! prod n_i) for every shape, n<=7", c_ok, c_detail.join(", "));
    s.record("8e", "M(F(p)) <= n n!/floor(n/3)! for every shape, n<=7", m_ok, m_detail.join(", "));

    // 9
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [4, 5] {
        let sw = sandwich(n, &pred, BUDGET).unwrap();
        let paths_oracle = subset_max(&path_oracle(n)[..path_oracle(n).len().min(12)], |a, b| max_degree_union(a, b) >= 4);
        let exact = sw.cycles.status == SolveStatus::Exact && sw.paths.status == SolveStatus::Exact;
        ok &= exact && sw.paths_meet_target && sw.cycles.value == q[&n];
        if n == 4 {
            ok &= paths_oracle == sw.paths.value;
        }
        detail.push(format!(
            "n={n}: M={} M^H={} >= ceil(2M/(n-1))={}; M >= M^H: {}",
            sw.cycles.value, sw.paths.value, sw.path_target, sw.cycles_at_least_paths
        ));
    }
    s.record("9", "path maximum meets the averaging bound", ok, detail.join("; "));

    // 10
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [4, 5] {
        let g = LabeledGraph::cycle(n, &seq(n)).unwrap();
        let v = nu(&g, BUDGET).unwrap().report.value;
        ok &= v == q[&n];
        detail.push(format!("nu(C{n}) = {v} = Q({n})"));
    }
    let mut pairs = 0usize;
    let mut agree = true;
    for n in 3..=6 {
        for p in partitions(n, 3) {
            let rep = pattern_rep(&p);
            let copies: Vec<_> = labeled_copies(&rep).collect();
            for (a, b) in copies.iter().tuple_combinations() {
                pairs += 1;
                agree &= shannon_distinguishable(a, b).unwrap() == doubling_compatible(a, b, &pred).unwrap();
            }
        }
    }
    ok &= agree;
    detail.push(format!("distinguishable iff doubling on {pairs} copy pairs: {agree}"));
    s.record("10", "nu cross-check", ok, detail.join("; "));

    // 11
    let mut ok = true;
    for n in 0..=20u64 {
        let p = bounds::partition_count(n);
        ok &= p == BigInt::from(partition_oracle(n as usize, n as usize));
        if n >= 1 {
            ok &= p == BigInt::from(partitions(n as usize, 1).count());
        }
    }
    ok &= bounds::partition_count(5) == 7.into() && bounds::partition_count(10) == 42.into();
    let (code, table) = run_cli(&["verify", "--check", "partitions", "--n", "1..=10", "--format", "csv"]);
    let table = String::from_utf8(table).unwrap();
    let n3_flagged = table.lines().any(|l| l.starts_with("partitions,3,hardy-ramanujan,") && l.ends_with(",<,false,false,true"));
    ok &= code == 0 && n3_flagged;
    s.record(
        "11",
        "partition counts and inequality table",
        ok,
        format!("p(n) matches recursion and listing for n<=20; n=3 flagged as violating p(n) < e^sqrt(n)/n: {n3_flagged}"),
    );

    // 12
    let avg4 = DoublingPredicate::average(4, 1).unwrap();
    let r = solve_universe(&Universe::HamiltonCycles(5), Relation::Doubling(avg4), BUDGET).unwrap();
    let oracle = subset_max(&cycle_oracle(5), |a, b| a.union(b).unwrap().edge_count() >= 10);
    let disjoint = r.witness.members().iter().tuple_combinations().all(|(a, b)| a.intersection(b).unwrap().edge_count() == 0);
    s.record(
        "12",
        "average degree 4 over Hamilton cycles, n=5",
        r.value == 2 && oracle == 2 && disjoint,
        format!("clique {} , subset oracle {oracle}, witness edge-disjoint: {disjoint}", r.value),
    );

    // 13
    let commands: Vec<Vec<&str>> = vec![
        vec!["enumerate", "--n", "6"],
        vec!["enumerate", "--universe", "two-regular", "--n", "6", "--format", "csv"],
        vec!["greedy", "--n", "4..=7"],
        vec!["exact", "--n", "4..=6"],
        vec!["exact", "--universe", "two-regular", "--n", "6", "--format", "table"],
        vec!["bounds", "--n", "3..=12"],
        vec!["verify", "--check", "eq1", "--n", "4..=8"],
        vec!["verify", "--check", "coverings", "--n", "4..=8"],
        vec!["verify", "--check", "uniformity", "--n", "4..=7"],
        vec!["verify", "--check", "thm2-shapes", "--n", "6"],
        vec!["verify", "--check", "partitions", "--n", "1..=20"],
        vec!["nu", "--cycle", "5"],
        vec!["capacity-demo", "--noiseless", "2"],
        vec!["thm3", "--n", "4..=5"],
    ];
    let mut ok = true;
    let mut bad = Vec::new();
    for cmd in &commands {
        let runs: Vec<(i32, Vec<u8>)> = ["1", "4", "1"]
            .iter()
            .map(|t| {
                let mut args = vec!["--threads", t];
                args.extend(cmd.iter().copied());
                run_cli(&args)
            })
            .collect();
        let same = runs.iter().all(|r| r == &runs[0]) && runs[0].0 == 0 && !runs[0].1.is_empty();
        if !same {
            bad.push(cmd.join(" "));
        }
        ok &= same;
    }
    s.record(
        "13",
        "byte-identical output across runs and thread counts",
        ok,
        if bad.is_empty() { format!("{} commands x 3 runs", commands.len()) } else { format!("differs: {bad:?}") },
    );

    println!("total time {:.1?}", started.elapsed());
    let unexpected: Vec<&Line> = s.lines.iter().filter(|l| !l.pass && !KNOWN_FALSE.contains(&l.id)).collect();
    let fixed: Vec<&Line> = s.lines.iter().filter(|l| l.pass && KNOWN_FALSE.contains(&l.id)).collect();
    for l in &fixed {
        println!("known-false criterion unexpectedly passed: {}", l.text);
    }
    let red = s.lines.iter().filter(|l| !l.pass).count();
    println!(
        "{} criteria, {} passed, {} failed ({} known false: {})",
        s.lines.len(),
        s.lines.len() - red,
        red,
        KNOWN_FALSE.len(),
        KNOWN_FALSE.join(", ")
    );
    if !unexpected.is_empty() || !fixed.is_empty() {
        std::process::exit(1);
    }
}

/// A 2-regular graph of shape `p` on consecutive blocks.
fn pattern_rep(p: &PartitionShape) -> LabeledGraph {
    let mut edges = Vec::new();
    let mut start = 1;
    for &k in p.parts() {
        for i in 0..k {
            edges.push((start + i, start + (i + 1) % k));
        }
        start += k;
    }
    LabeledGraph::new(p.n(), &edges).unwrap()
}
