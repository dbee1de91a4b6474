//! Reference construction of the pseudo-orbit hop graph and its recurrent
//! components, from scratch: own word enumeration, own grid, own integrator,
//! and bounded-length chain reachability computed two independent ways.

use std::collections::BTreeSet;
use std::collections::VecDeque;

use morseflow::{DirectedGraph, Extension, HybridSystem, StateSpace, SymbolicSignal};

use crate::integrate::reference_flow;

/// Everything the oracle derived for one resolution setting.
#[derive(Debug, Clone)]
pub struct ChainOracleOutcome {
    pub grid: Vec<f64>,
    pub edges: BTreeSet<(usize, usize)>,
    /// Smallest `|distance - eps|` seen over every (sample, node) pair. A
    /// comfortably positive margin certifies that no hop decision rides on
    /// integrator rounding.
    pub boundary_margin: f64,
    /// Recurrent components under chains of at most `max_hops` hops,
    /// members ascending, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
}

fn point_distance(space: StateSpace, a: f64, b: f64) -> f64 {
    match space {
        StateSpace::Interval { .. } => (a - b).abs(),
        StateSpace::Circle => {
            let d = (a - b).rem_euclid(std::f64::consts::TAU);
            d.min(std::f64::consts::TAU - d)
        }
    }
}

fn oracle_grid(space: StateSpace, n: usize) -> Vec<f64> {
    match space {
        StateSpace::Interval { lo, hi } => {
            let spacing = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + spacing * i as f64 })
                .collect()
        }
        StateSpace::Circle => {
            let spacing = std::f64::consts::TAU / n as f64;
            (0..n).map(|i| spacing * i as f64).collect()
        }
    }
}

/// All words admissible for `g` with `1..=max_len` letters, grown breadth
/// first over the full vertex set.
pub fn all_admissible_words(g: &DirectedGraph, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..g.n_vertices()).map(|v| vec![v]).collect();
    for _ in 0..max_len {
        out.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for word in &layer {
            let last = *word.last().expect("nonempty");
            for w in g.successors(last) {
                let mut grown = word.clone();
                grown.push(w);
                next.push(grown);
            }
        }
        layer = next;
    }
    out
}

/// The driving signals for hops: every admissible word up to `max_len`,
/// repeated periodically where the wrap edge exists, and frozen at both ends
/// where both end vertices carry self-loops (multi-letter words only, since
/// for one letter the two rules give the same function).
pub fn oracle_signal_set(g: &DirectedGraph, max_len: usize, h: f64) -> Vec<SymbolicSignal> {
    let mut out = Vec::new();
    for word in all_admissible_words(g, max_len) {
        let first = word[0];
        let last = *word.last().expect("nonempty");
        if g.has_edge(last, first) {
            out.push(
                SymbolicSignal::new(word.clone(), h, 0.0, 0, Extension::PeriodicWord)
                    .expect("word is nonempty and h is positive"),
            );
        }
        if word.len() > 1 && g.has_edge(first, first) && g.has_edge(last, last) {
            out.push(
                SymbolicSignal::new(word, h, 0.0, 0, Extension::ConstantEnds)
                    .expect("word is nonempty and h is positive"),
            );
        }
    }
    out
}

fn bounded_reach_bfs(n: usize, edges: &BTreeSet<(usize, usize)>, max_hops: usize) -> Vec<Vec<bool>> {
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        succ[a].push(b);
    }
    let mut reach = vec![vec![false; n]; n];
    for start in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        // Seed from successors so reaching oneself requires a real cycle.
        for &w in &succ[start] {
            if dist[w] == usize::MAX {
                dist[w] = 1;
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            if dist[v] >= max_hops {
                continue;
            }
            for &w in &succ[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for v in 0..n {
            reach[start][v] = dist[v] <= max_hops;
        }
    }
    reach
}

fn bounded_reach_powers(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    max_hops: usize,
) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
    }
    let mut power = adj.clone();
    let mut acc = adj.clone();
    for _ in 1..max_hops {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if power[i][k] {
                    for j in 0..n {
                        if adj[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        power = next;
        for i in 0..n {
            for j in 0..n {
                acc[i][j] |= power[i][j];
            }
        }
    }
    acc
}

/// Components of mutual reachability by chains of at most `max_hops` hops.
/// The relation is computed twice, by breadth-first search and by boolean
/// matrix powers, and the two must agree. The instance must also be
/// saturated: allowing up to `n` hops may not reach any further pair, since
/// otherwise bounded mutual reachability is not transitive and the notion of
/// a component breaks down.
pub fn bounded_chain_components(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    max_hops: usize,
) -> Vec<Vec<usize>> {
    let reach = bounded_reach_bfs(n, edges, max_hops);
    assert_eq!(
        reach,
        bounded_reach_powers(n, edges, max_hops),
        "two reachability computations disagree"
    );
    assert_eq!(
        reach,
        bounded_reach_bfs(n, edges, n),
        "chains of {max_hops} hops do not saturate this instance; \
         pick a coarser grid, larger eps, or longer hop times"
    );
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if seen[v] || !reach[v][v] {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&w| reach[v][w] && reach[w][v]).collect();
        for &w in &members {
            seen[w] = true;
        }
        out.push(members);
    }
    out
}

/// Builds the hop graph and its bounded-chain components from first
/// principles. A hop joins node `i` to node `j` when some oracle signal
/// carries `grid[i]` to within `eps` of `grid[j]` at one of the sample times
/// `t_min, t_min + h, ..., t_max`; each sampled state is integrated from the
/// start with the step-doubling reference integrator at tolerance `tol`.
#[allow(clippy::too_many_arguments)]
pub fn run_chain_oracle(
    sys: &HybridSystem,
    grid_n: usize,
    eps: f64,
    t_min: f64,
    t_max: f64,
    word_len: usize,
    max_hops: usize,
    tol: f64,
) -> ChainOracleOutcome {
    let h = sys.h();
    let space = sys.space();
    let grid = oracle_grid(space, grid_n);
    let signals = oracle_signal_set(sys.graph(), word_len, h);
    let n_hops = ((t_max - t_min) / h).floor() as usize;

    let mut edges = BTreeSet::new();
    let mut boundary_margin = f64::INFINITY;
    for (i, &x0) in grid.iter().enumerate() {
        for sig in &signals {
            for k in 0..=n_hops {
                let t = t_min + k as f64 * h;
                let x = reference_flow(sys, sig, x0, t, tol);
                for (j, &node) in grid.iter().enumerate() {
                    let d = point_distance(space, x, node);
                    boundary_margin = boundary_margin.min((d - eps).abs());
                    if d <= eps {
                        edges.insert((i, j));
                    }
                }
            }
        }
    }

    let components = bounded_chain_components(grid.len(), &edges, max_hops);
    ChainOracleOutcome {
        grid,
        edges,
        boundary_margin,
        components,
    }
}
