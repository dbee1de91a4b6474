//! Finite directed graphs and their communicating structure.
//!
//! A graph in which every vertex has at least one outgoing and at least one
//! incoming edge is called an N-graph here; exactly these graphs admit
//! bi-infinite admissible vertex sequences through every vertex, which is what
//! the switching-signal machinery needs. A communicating class is a maximal
//! set of vertices that are mutually reachable along paths with at least one
//! edge (so a lone vertex belongs to a class only if it sits on a cycle). A
//! class is invariant when no edge leaves it, variant otherwise; every
//! N-graph contains at least one invariant class.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Directed graph on vertices `0..n_vertices` with an ordered edge set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedGraph {
    n_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl DirectedGraph {
    /// Builds a graph, rejecting an empty vertex set, out-of-range endpoints
    /// and duplicate edges.
    pub fn new(
        n_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n_vertices == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n_vertices {
                return Err(GraphError::VertexOutOfRange(a, n_vertices));
            }
            if b >= n_vertices {
                return Err(GraphError::VertexOutOfRange(b, n_vertices));
            }
            if !set.insert((a, b)) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Self {
            n_vertices,
            edges: set,
        })
    }

    /// Complete graph on `n` vertices including all self-loops.
    pub fn complete_with_self_loops(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (0..n).map(move |b| (a, b)));
        Self::new(n, edges).expect("complete graph is always valid")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    /// Successors of `v` in ascending order.
    pub fn successors(&self, v: usize) -> Vec<usize> {
        self.edges
            .range((v, 0)..=(v, usize::MAX))
            .map(|&(_, b)| b)
            .collect()
    }

    /// Predecessors of `v` in ascending order.
    pub fn predecessors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, b)| b == v)
            .map(|&(a, _)| a)
            .collect()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.successors(v).len()
    }

    /// Adjacency lists for all vertices, successors ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
        }
        adj
    }
}

/// Out- and in-degrees for each vertex, plus the N-graph verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub out_degrees: Vec<usize>,
    pub in_degrees: Vec<usize>,
}

impl DegreeReport {
    /// True when every vertex has out-degree >= 1 and in-degree >= 1.
    pub fn is_n_graph(&self) -> bool {
        self.out_degrees.iter().all(|&d| d >= 1) && self.in_degrees.iter().all(|&d| d >= 1)
    }

    /// Vertices violating the N-graph condition, ascending.
    pub fn offenders(&self) -> Vec<usize> {
        (0..self.out_degrees.len())
            .filter(|&v| self.out_degrees[v] == 0 || self.in_degrees[v] == 0)
            .collect()
    }
}

/// Computes per-vertex degrees and flags whether `g` is an N-graph.
pub fn validate_n_graph(g: &DirectedGraph) -> DegreeReport {
    let mut out_degrees = vec![0usize; g.n_vertices()];
    let mut in_degrees = vec![0usize; g.n_vertices()];
    for (a, b) in g.edges() {
        out_degrees[a] += 1;
        in_degrees[b] += 1;
    }
    DegreeReport {
        out_degrees,
        in_degrees,
    }
}

/// Whether any admissible path can leave the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Variant,
    Invariant,
}

/// A communicating class: maximal mutually reachable vertex set (reachability
/// along paths with at least one edge).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommClass {
    /// Members in ascending order.
    pub members: Vec<usize>,
    pub kind: ClassKind,
}

impl CommClass {
    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn is_invariant(&self) -> bool {
        self.kind == ClassKind::Invariant
    }
}

/// Strongly connected components of the directed relation given by `succ`,
/// iterative Tarjan. Components are returned with members ascending, ordered
/// by smallest member.
pub(crate) fn strongly_connected_components(n: usize, succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    #[derive(Clone, Copy)]
    struct Frame {
        v: usize,
        next: usize,
    }

    let mut indices: Vec<Option<usize>> = vec![None; n];
    let mut lowlinks = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<Frame> = Vec::new();
    let mut next_index = 0usize;
    let mut comps: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if indices[root].is_some() {
            continue;
        }
        call.push(Frame { v: root, next: 0 });
        indices[root] = Some(next_index);
        lowlinks[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(frame) = call.last_mut() {
            let v = frame.v;
            if frame.next < succ[v].len() {
                let w = succ[v][frame.next];
                frame.next += 1;
                match indices[w] {
                    None => {
                        call.push(Frame { v: w, next: 0 });
                        indices[w] = Some(next_index);
                        lowlinks[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                    }
                    Some(wi) => {
                        if on_stack[w] && wi < lowlinks[v] {
                            lowlinks[v] = wi;
                        }
                    }
                }
            } else {
                // Root of a component.
                if lowlinks[v] == indices[v].expect("visited") {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("stack nonempty");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
                let done = *frame;
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.v;
                    if lowlinks[done.v] < lowlinks[p] {
                        lowlinks[p] = lowlinks[done.v];
                    }
                }
            }
        }
    }

    comps.sort_by_key(|c| c[0]);
    comps
}

/// Communicating classes of an N-graph, ordered by smallest member.
///
/// These are the strongly connected components that contain a cycle (more
/// than one vertex, or a single vertex with a self-loop). A class is
/// `Invariant` when no edge leads from a member to a non-member.
pub fn communicating_classes(g: &DirectedGraph) -> Result<Vec<CommClass>, GraphError> {
    let report = validate_n_graph(g);
    if !report.is_n_graph() {
        let v = report.offenders()[0];
        return Err(GraphError::NotAnNGraph {
            vertex: v,
            out_degree: report.out_degrees[v],
            in_degree: report.in_degrees[v],
        });
    }
    let adj = g.adjacency();
    let comps = strongly_connected_components(g.n_vertices(), &adj);
    let mut classes = Vec::new();
    for comp in comps {
        let cyclic = comp.len() > 1 || g.has_edge(comp[0], comp[0]);
        if !cyclic {
            continue;
        }
        let leaves = comp
            .iter()
            .any(|&v| adj[v].iter().any(|w| comp.binary_search(w).is_err()));
        classes.push(CommClass {
            members: comp,
            kind: if leaves {
                ClassKind::Variant
            } else {
                ClassKind::Invariant
            },
        });
    }
    Ok(classes)
}

/// Returns one invariant communicating class (the one with the smallest
/// leading vertex). Every N-graph has at least one.
pub fn invariant_class_exists(g: &DirectedGraph) -> Result<CommClass, GraphError> {
    communicating_classes(g)?
        .into_iter()
        .find(CommClass::is_invariant)
        .ok_or(GraphError::NoInvariantClass)
}

/// All admissible paths from `from` to `to` using between 1 and `max_len`
/// edges, ordered by length then lexicographically. The trivial single-vertex
/// path is never included: reaching oneself requires a cycle.
pub fn admissible_paths(
    g: &DirectedGraph,
    from: usize,
    to: usize,
    max_len: usize,
) -> Result<Vec<Vec<usize>>, GraphError> {
    if from >= g.n_vertices() {
        return Err(GraphError::VertexOutOfRange(from, g.n_vertices()));
    }
    if to >= g.n_vertices() {
        return Err(GraphError::VertexOutOfRange(to, g.n_vertices()));
    }
    let adj = g.adjacency();
    let mut out = Vec::new();
    let mut path = vec![from];
    collect_paths(&adj, to, max_len, &mut path, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

fn collect_paths(
    adj: &[Vec<usize>],
    to: usize,
    budget: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if budget == 0 {
        return;
    }
    let last = *path.last().expect("path nonempty");
    for &w in &adj[last] {
        path.push(w);
        if w == to {
            out.push(path.clone());
        }
        collect_paths(adj, to, budget - 1, path, out);
        path.pop();
    }
}

/// Shortest path from `a` to `b` along edges, with at least one edge (so
/// `a == b` yields a shortest cycle through `a`). Restricted to vertices in
/// `allowed`; `None` when unreachable. Breadth-first with ascending
/// neighbor order, hence deterministic.
pub(crate) fn shortest_path_with_edge(
    g: &DirectedGraph,
    a: usize,
    b: usize,
    allowed: &[usize],
) -> Option<Vec<usize>> {
    let in_allowed = |v: usize| allowed.binary_search(&v).is_ok();
    if !in_allowed(a) || !in_allowed(b) {
        return None;
    }
    let mut best: Option<Vec<usize>> = None;
    for s in g.successors(a) {
        if !in_allowed(s) {
            continue;
        }
        if s == b {
            return Some(vec![a, b]);
        }
        if s == a {
            continue;
        }
        let mut prev: Vec<Option<usize>> = vec![None; g.n_vertices()];
        let mut queue = std::collections::VecDeque::new();
        prev[s] = Some(a);
        queue.push_back(s);
        // Predecessor of b on the discovered path; kept separate so the
        // search can close a cycle back onto b == a.
        let mut pred_of_b: Option<usize> = None;
        'bfs: while let Some(v) = queue.pop_front() {
            for w in g.successors(v) {
                if !in_allowed(w) {
                    continue;
                }
                if w == b {
                    pred_of_b = Some(v);
                    break 'bfs;
                }
                if prev[w].is_some() || w == a {
                    continue;
                }
                prev[w] = Some(v);
                queue.push_back(w);
            }
        }
        if let Some(p) = pred_of_b {
            let mut path = vec![b, p];
            let mut cur = p;
            while cur != a {
                cur = prev[cur].expect("reached vertex has predecessor");
                path.push(cur);
            }
            path.reverse();
            match &best {
                Some(q) if q.len() <= path.len() => {}
                _ => best = Some(path),
            }
        }
    }
    best
}
