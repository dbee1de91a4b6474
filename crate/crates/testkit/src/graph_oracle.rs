//! Reference implementation of communicating-class analysis by boolean
//! matrix closure, plus N-graph generators for exhaustive and randomized
//! cross-checking.

use morseflow::{ClassKind, CommClass, DirectedGraph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Reachability in one or more steps, by Warshall closure over the raw
/// adjacency matrix. `reach[i][j]` is true when some path with at least one
/// edge leads from `i` to `j`.
pub fn positive_reachability(g: &DirectedGraph) -> Vec<Vec<bool>> {
    let n = g.n_vertices();
    let mut reach = vec![vec![false; n]; n];
    for (a, b) in g.edges() {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Communicating classes derived from mutual reachability: a vertex belongs
/// to a class exactly when it lies on a cycle, and two such vertices share a
/// class when each reaches the other. A class is invariant when no edge
/// leaves its member set. Classes are returned with members ascending,
/// ordered by smallest member.
pub fn classes_by_reachability(g: &DirectedGraph) -> Vec<(Vec<usize>, ClassKind)> {
    let n = g.n_vertices();
    let reach = positive_reachability(g);
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
        let leaves = g
            .edges()
            .any(|(a, b)| members.contains(&a) && !members.contains(&b));
        let kind = if leaves {
            ClassKind::Variant
        } else {
            ClassKind::Invariant
        };
        out.push((members, kind));
    }
    out
}

/// Normalizes the main crate's class list to the oracle's comparison shape.
pub fn canonical_classes(classes: &[CommClass]) -> Vec<(Vec<usize>, ClassKind)> {
    classes
        .iter()
        .map(|c| (c.members.clone(), c.kind))
        .collect()
}

/// Is every in-degree and out-degree at least one?
pub fn degrees_ok(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut outs = vec![0usize; n];
    let mut ins = vec![0usize; n];
    for &(a, b) in edges {
        outs[a] += 1;
        ins[b] += 1;
    }
    outs.iter().all(|&d| d > 0) && ins.iter().all(|&d| d > 0)
}

/// All N-graphs on `n` vertices, by enumerating every subset of the `n * n`
/// possible edges and keeping those where every vertex has in-degree and
/// out-degree at least one. Intended for small `n` (at `n = 4` this scans
/// 65,536 subsets).
pub fn all_n_graphs(n: usize) -> Vec<DirectedGraph> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    assert!(slots.len() <= 20, "exhaustive enumeration kept small");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << slots.len()) {
        let edges: Vec<(usize, usize)> = slots
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if degrees_ok(n, &edges) {
            out.push(DirectedGraph::new(n, edges).expect("enumerated edges are in range"));
        }
    }
    out
}

/// Random N-graph with 2 to `n_max` vertices: a random permutation cycle
/// guarantees every degree is at least one, then each remaining edge slot is
/// included independently with probability `extra_p`.
pub fn random_n_graph<R: Rng>(rng: &mut R, n_max: usize, extra_p: f64) -> DirectedGraph {
    let n = rng.random_range(2..=n_max);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (perm[i], perm[(i + 1) % n])).collect();
    for a in 0..n {
        for b in 0..n {
            if !edges.contains(&(a, b)) && rng.random_bool(extra_p) {
                edges.push((a, b));
            }
        }
    }
    DirectedGraph::new(n, edges).expect("generated edges are in range and distinct")
}
