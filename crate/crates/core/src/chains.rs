//! Pseudo-orbit analysis at a fixed spatial resolution.
//!
//! The state interval (or circle) is discretized into a grid of nodes. A
//! directed edge joins node `i` to node `j` when some admissible signal from
//! the catalog carries `grid[i]` to within `eps` of `grid[j]` after a flow
//! time of at least `t_min` (sampled at whole dwells up to `t_max`). Strongly
//! connected components of that graph that carry a cycle are the recurrent
//! sets visible at resolution `eps`; [`perturbation_sweep`] tracks how they
//! move as a perturbation strength is dialed down.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::graph::{strongly_connected_components, DirectedGraph};
use crate::hybrid::{
    hybrid_flow, trajectory, FieldShape, HybridSystem, StateSpace, VectorFieldSpec,
};
use crate::signal::{signal_catalog, SymbolicSignal};

/// Number of dwells shadowed in each direction by [`lift_projection_check`].
pub const SHADOW_DWELLS: usize = 50;

/// Resolution parameters for one chain-graph construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Number of grid nodes over the state space.
    pub grid_n: usize,
    /// Jump radius: a hop may land anywhere within `eps` of a node.
    pub eps: f64,
    /// Minimum flow time of a hop.
    pub t_min: f64,
    /// Maximum flow time of a hop; hops are sampled at `t_min + k * h`.
    pub t_max: f64,
    /// Maximum word length of the signal catalog driving the hops.
    pub word_len: usize,
}

impl ChainParams {
    fn validate(&self) -> Result<(), AnalysisError> {
        if self.grid_n < 2 {
            return Err(AnalysisError::DegenerateGrid(self.grid_n));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(AnalysisError::BadEps(self.eps));
        }
        if !(self.t_min.is_finite() && self.t_max.is_finite())
            || self.t_min <= 0.0
            || self.t_max < self.t_min
        {
            return Err(AnalysisError::BadChainTimes {
                t_min: self.t_min,
                t_max: self.t_max,
            });
        }
        if self.word_len == 0 {
            return Err(AnalysisError::BadWordLength);
        }
        Ok(())
    }
}

/// One recorded hop witness: the first (signal, time) pair found that carries
/// the source node into the `eps`-ball of the target node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainEdge {
    pub from: usize,
    pub to: usize,
    /// Index into [`ChainGraph::signals`].
    pub signal: usize,
    /// Flow time of the witnessing hop.
    pub time: f64,
}

/// Hop graph over the state grid.
#[derive(Debug, Clone)]
pub struct ChainGraph {
    grid: Vec<f64>,
    spacing: f64,
    space: StateSpace,
    params: ChainParams,
    signals: Vec<SymbolicSignal>,
    edges: Vec<ChainEdge>,
    succ: Vec<Vec<usize>>,
}

impl ChainGraph {
    pub fn n_nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn signals(&self) -> &[SymbolicSignal] {
        &self.signals
    }

    pub fn edges(&self) -> &[ChainEdge] {
        &self.edges
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    /// States of the given nodes, in node order.
    pub fn states_of(&self, nodes: &[usize]) -> Vec<f64> {
        nodes.iter().map(|&i| self.grid[i]).collect()
    }

    /// Nearest grid node to `x` and its distance.
    pub fn nearest_node(&self, x: f64) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, &g) in self.grid.iter().enumerate() {
            let d = self.space.state_distance(g, x);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Indices of grid nodes within `radius` of `x`.
    fn nodes_within(&self, x: f64, radius: f64) -> Vec<usize> {
        let n = self.grid.len() as isize;
        let mut out = Vec::new();
        match self.space {
            StateSpace::Interval { lo, .. } => {
                let first = ((x - radius - lo) / self.spacing).floor() as isize - 1;
                let last = ((x + radius - lo) / self.spacing).ceil() as isize + 1;
                for k in first.max(0)..=last.min(n - 1) {
                    let k = k as usize;
                    if self.space.state_distance(self.grid[k], x) <= radius {
                        out.push(k);
                    }
                }
            }
            StateSpace::Circle => {
                let first = ((x - radius) / self.spacing).floor() as isize - 1;
                let last = ((x + radius) / self.spacing).ceil() as isize + 1;
                if last - first >= n {
                    for k in 0..self.grid.len() {
                        if self.space.state_distance(self.grid[k], x) <= radius {
                            out.push(k);
                        }
                    }
                } else {
                    for k in first..=last {
                        let k = k.rem_euclid(n) as usize;
                        if self.space.state_distance(self.grid[k], x) <= radius
                            && !out.contains(&k)
                        {
                            out.push(k);
                        }
                    }
                    out.sort_unstable();
                }
            }
        }
        out
    }
}

fn build_grid(space: StateSpace, n: usize) -> (Vec<f64>, f64) {
    match space {
        StateSpace::Interval { lo, hi } => {
            let spacing = (hi - lo) / (n - 1) as f64;
            let grid = (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + spacing * i as f64 })
                .collect();
            (grid, spacing)
        }
        StateSpace::Circle => {
            let spacing = std::f64::consts::TAU / n as f64;
            ((0..n).map(|i| spacing * i as f64).collect(), spacing)
        }
    }
}

/// Builds the hop graph for `sys` at the resolution given by `params`.
///
/// Hops start on grid nodes, follow one catalog signal, and are sampled at
/// flow times `t_min, t_min + h, ..., t_max`. The witness stored per edge is
/// the first found in (source node, catalog order, time) order, so the result
/// does not depend on thread count.
pub fn build_chain_graph(
    sys: &HybridSystem,
    params: &ChainParams,
) -> Result<ChainGraph, AnalysisError> {
    params.validate()?;
    let h = sys.h();
    let members: Vec<usize> = (0..sys.graph().n_vertices()).collect();
    let signals = signal_catalog(sys.graph(), &members, params.word_len, h);
    if signals.is_empty() {
        return Err(AnalysisError::EmptySignalCatalog);
    }
    let (grid, spacing) = build_grid(sys.space(), params.grid_n);
    let mut shell = ChainGraph {
        grid,
        spacing,
        space: sys.space(),
        params: params.clone(),
        signals,
        edges: Vec::new(),
        succ: Vec::new(),
    };

    let n_hops = ((params.t_max - params.t_min) / h).floor() as usize;
    let t_last = params.t_min + (n_hops as f64 + 0.5) * h;
    let tasks: Vec<(usize, usize)> = (0..shell.grid.len())
        .flat_map(|i| (0..shell.signals.len()).map(move |s| (i, s)))
        .collect();
    let partials: Vec<Result<Vec<(usize, f64)>, AnalysisError>> = tasks
        .par_iter()
        .map(|&(i, s)| {
            let samples = trajectory(
                sys,
                &shell.signals[s],
                shell.grid[i],
                params.t_min,
                t_last,
                h,
            )?;
            let mut first: BTreeMap<usize, f64> = BTreeMap::new();
            for sample in &samples {
                for j in shell.nodes_within(sample.x, params.eps) {
                    first.entry(j).or_insert(sample.t);
                }
            }
            Ok(first.into_iter().collect())
        })
        .collect();

    let mut best: BTreeMap<(usize, usize), (usize, f64)> = BTreeMap::new();
    for (&(i, s), partial) in tasks.iter().zip(partials) {
        for (j, t) in partial? {
            best.entry((i, j)).or_insert((s, t));
        }
    }
    shell.edges = best
        .into_iter()
        .map(|((from, to), (signal, time))| ChainEdge {
            from,
            to,
            signal,
            time,
        })
        .collect();
    shell.succ = vec![Vec::new(); shell.grid.len()];
    for e in &shell.edges {
        shell.succ[e.from].push(e.to);
    }
    Ok(shell)
}

/// A signal that keeps one member node inside the component tube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainWitness {
    pub node: usize,
    /// Index into the chain graph's signal catalog.
    pub signal: usize,
}

/// One recurrent component of the hop graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainComponent {
    /// Grid node indices, ascending.
    pub nodes: Vec<usize>,
    /// First (node, signal) pair whose whole-dwell samples over `[0, t_max]`
    /// stay within `eps` of the component, if any.
    pub witness: Option<ChainWitness>,
}

/// All recurrent components, ordered by smallest member node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSetResult {
    pub components: Vec<ChainComponent>,
}

impl ChainSetResult {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index of the component containing `node`, if any.
    pub fn component_of(&self, node: usize) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.nodes.binary_search(&node).is_ok())
    }
}

/// Extracts the components of the hop graph that carry a cycle, together with
/// a tube-invariance witness per component where one exists.
pub fn chain_sets(
    sys: &HybridSystem,
    cg: &ChainGraph,
) -> Result<ChainSetResult, AnalysisError> {
    let mut comps: Vec<Vec<usize>> = strongly_connected_components(cg.n_nodes(), &cg.succ)
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .filter(|c| c.len() > 1 || cg.has_edge(c[0], c[0]))
        .collect();
    comps.sort_by_key(|c| c[0]);

    let h = sys.h();
    let n_dwells = (cg.params.t_max / h).floor() as usize;
    let t_last = (n_dwells as f64 + 0.5) * h;
    let mut components = Vec::with_capacity(comps.len());
    for nodes in comps {
        let states = cg.states_of(&nodes);
        let mut witness = None;
        'search: for &node in &nodes {
            for (s, sig) in cg.signals.iter().enumerate() {
                let samples = trajectory(sys, sig, cg.grid[node], 0.0, t_last, h)?;
                let stays = samples.iter().all(|sample| {
                    states
                        .iter()
                        .any(|&g| cg.space.state_distance(g, sample.x) <= cg.params.eps)
                });
                if stays {
                    witness = Some(ChainWitness { node, signal: s });
                    break 'search;
                }
            }
        }
        components.push(ChainComponent { nodes, witness });
    }
    Ok(ChainSetResult { components })
}

/// Outcome of [`lift_projection_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftCheckReport {
    /// Every member node has a catalog signal that keeps it inside the
    /// component tube for [`SHADOW_DWELLS`] dwells in both time directions.
    pub invariance_ok: bool,
    /// Every ordered pair of member nodes is joined by a hop path that stays
    /// inside the member set.
    pub connectivity_ok: bool,
    pub passed: bool,
    /// Largest distance between a flowed state and the node it was snapped
    /// to, over all accepted shadowing steps.
    pub max_snap_drift: f64,
    pub failures: Vec<String>,
}

/// Shadows `sig` from `x0` for `dwells` whole dwells in direction `dir`
/// (+1 forward, -1 backward), snapping to the nearest member state after each
/// dwell. Returns (dwells survived, max snap distance).
fn shadow_dwells(
    sys: &HybridSystem,
    cg: &ChainGraph,
    states: &[f64],
    sig: &SymbolicSignal,
    x0: f64,
    dwells: usize,
    dir: i64,
) -> Result<(usize, f64), AnalysisError> {
    let h = sys.h();
    let mut x = x0;
    let mut drift: f64 = 0.0;
    for k in 0..dwells {
        let step = sig.shift_by_dwell(dir * k as i64);
        let y = hybrid_flow(sys, &step, x, dir as f64 * h)?;
        let mut best = (f64::INFINITY, 0usize);
        for (idx, &g) in states.iter().enumerate() {
            let d = cg.space.state_distance(g, y);
            if d < best.0 {
                best = (d, idx);
            }
        }
        if best.0 > cg.params.eps {
            return Ok((k, drift));
        }
        drift = drift.max(best.0);
        x = states[best.1];
    }
    Ok((dwells, drift))
}

/// Checks that a node set behaves like a genuine recurrent set rather than a
/// grid artifact: (1) each member carries a signal whose orbit, corrected by
/// at most `eps` at each dwell boundary, stays in the set for
/// [`SHADOW_DWELLS`] dwells both forward and backward; (2) each ordered pair
/// of members is joined by a hop path inside the set. Failures are reported
/// as diagnostics at the grid's resolution.
pub fn lift_projection_check(
    sys: &HybridSystem,
    cg: &ChainGraph,
    members: &[usize],
) -> Result<LiftCheckReport, AnalysisError> {
    if members.is_empty() {
        return Err(AnalysisError::Precondition(
            "component must have at least one node".into(),
        ));
    }
    let mut nodes: Vec<usize> = members.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if *nodes.last().unwrap() >= cg.n_nodes() {
        return Err(AnalysisError::Precondition(format!(
            "node {} out of range for a {}-node grid",
            nodes.last().unwrap(),
            cg.n_nodes()
        )));
    }
    let states = cg.states_of(&nodes);
    let mut failures = Vec::new();
    let mut max_snap_drift: f64 = 0.0;

    let mut invariance_ok = true;
    for (local, &node) in nodes.iter().enumerate() {
        let mut found = false;
        let mut best = (0usize, 0usize, 0usize);
        for (s, sig) in cg.signals.iter().enumerate() {
            let (fwd, fwd_drift) =
                shadow_dwells(sys, cg, &states, sig, states[local], SHADOW_DWELLS, 1)?;
            let (bwd, bwd_drift) = if fwd == SHADOW_DWELLS {
                shadow_dwells(sys, cg, &states, sig, states[local], SHADOW_DWELLS, -1)?
            } else {
                (0, 0.0)
            };
            if fwd == SHADOW_DWELLS && bwd == SHADOW_DWELLS {
                found = true;
                max_snap_drift = max_snap_drift.max(fwd_drift).max(bwd_drift);
                break;
            }
            if fwd + bwd > best.0 + best.1 {
                best = (fwd, bwd, s);
            }
        }
        if !found {
            invariance_ok = false;
            failures.push(format!(
                "node {} (x={:.6}): no catalog signal stays in the tube for {} dwells \
                 (best: signal {} lasted {} forward, {} backward)",
                node, states[local], SHADOW_DWELLS, best.2, best.0, best.1,
            ));
        }
    }

    let index_of: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(l, &n)| (n, l)).collect();
    let mut succ_local = vec![Vec::new(); nodes.len()];
    let mut pred_local = vec![Vec::new(); nodes.len()];
    for &node in &nodes {
        for &to in cg.successors(node) {
            if let Some(&tl) = index_of.get(&to) {
                let fl = index_of[&node];
                succ_local[fl].push(tl);
                pred_local[tl].push(fl);
            }
        }
    }
    let reach = |adj: &Vec<Vec<usize>>| -> Vec<bool> {
        let mut seen = vec![false; nodes.len()];
        let mut queue: Vec<usize> = adj[0].clone();
        while let Some(v) = queue.pop() {
            if !seen[v] {
                seen[v] = true;
                queue.extend_from_slice(&adj[v]);
            }
        }
        seen
    };
    let fwd = reach(&succ_local);
    let bwd = reach(&pred_local);
    let mut connectivity_ok = true;
    for local in 0..nodes.len() {
        if !fwd[local] {
            connectivity_ok = false;
            failures.push(format!(
                "node {} is not hop-reachable from node {} inside the set",
                nodes[local], nodes[0]
            ));
        }
        if !bwd[local] {
            connectivity_ok = false;
            failures.push(format!(
                "node {} cannot hop-reach node {} inside the set",
                nodes[local], nodes[0]
            ));
        }
    }

    Ok(LiftCheckReport {
        invariance_ok,
        connectivity_ok,
        passed: invariance_ok && connectivity_ok,
        max_snap_drift,
        failures,
    })
}

/// Symmetric Hausdorff distance between two nonempty finite state sets.
pub fn hausdorff_distance(space: StateSpace, a: &[f64], b: &[f64]) -> f64 {
    let directed = |from: &[f64], to: &[f64]| -> f64 {
        from.iter()
            .map(|&x| {
                to.iter()
                    .map(|&y| space.state_distance(x, y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    directed(a, b).max(directed(b, a))
}

/// Specification of a [`perturbation_sweep`].
///
/// Vertex `i` of the constructed system carries the field
/// `base(x) + rho * (targets[i] - x)`: the base field nudged toward the
/// target state with strength `rho`. The graph is complete with self-loops,
/// so every vertex (in particular the one carrying each target) can be held
/// indefinitely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Polynomial coefficients of the unperturbed field.
    pub base: Vec<f64>,
    /// Per-vertex pull targets.
    pub targets: Vec<f64>,
    /// Perturbation strengths, strongest first; must contain 0.
    pub rho_ladder: Vec<f64>,
    pub space: StateSpace,
    pub h: f64,
    pub params: ChainParams,
}

/// Chain sets of one perturbation strength, matched against the rho = 0 run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub rho: f64,
    pub result: ChainSetResult,
    /// States of each component's nodes.
    pub component_states: Vec<Vec<f64>>,
    /// For each component, the index of the rho = 0 component sharing the
    /// most grid nodes (ties to the smaller index).
    pub matched: Vec<Option<usize>>,
    /// Hausdorff distance to the matched rho = 0 component.
    pub hausdorff: Vec<Option<f64>>,
}

impl SweepLevel {
    pub fn matched_count(&self) -> usize {
        self.matched.iter().filter(|m| m.is_some()).count()
    }
}

/// Full sweep outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// One level per ladder entry, in ladder order.
    pub levels: Vec<SweepLevel>,
    /// Index of the rho = 0 level.
    pub baseline: usize,
    /// Grid spacing shared by all levels.
    pub spacing: f64,
    /// Smallest C with every matched Hausdorff distance at strength rho > 0
    /// bounded by `2 * (spacing + rho * C)`.
    pub bound_constant: f64,
}

impl SweepReport {
    /// Hausdorff distances of the components matched to one baseline
    /// component, in ladder order. Levels where several components match the
    /// same baseline component contribute their largest distance; levels
    /// where none matches are skipped.
    pub fn series_for(&self, baseline_comp: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for level in &self.levels {
            let mut worst: Option<f64> = None;
            for (m, d) in level.matched.iter().zip(&level.hausdorff) {
                if *m == Some(baseline_comp) {
                    let d = d.expect("matched component always has a distance");
                    worst = Some(worst.map_or(d, |w: f64| w.max(d)));
                }
            }
            if let Some(w) = worst {
                out.push((level.rho, w));
            }
        }
        out
    }
}

/// Runs the chain analysis across a ladder of perturbation strengths and
/// matches each level's components against the unperturbed run.
pub fn perturbation_sweep(spec: &SweepSpec) -> Result<SweepReport, AnalysisError> {
    if !spec.rho_ladder.contains(&0.0) {
        return Err(AnalysisError::MissingZeroRho);
    }
    if spec.targets.is_empty() {
        return Err(AnalysisError::Precondition(
            "sweep needs at least one pull target".into(),
        ));
    }
    if spec.base.is_empty() {
        return Err(AnalysisError::Precondition(
            "sweep needs a base field".into(),
        ));
    }

    let graph = DirectedGraph::complete_with_self_loops(spec.targets.len());
    let mut runs = Vec::with_capacity(spec.rho_ladder.len());
    for &rho in &spec.rho_ladder {
        let fields: Vec<VectorFieldSpec> = spec
            .targets
            .iter()
            .map(|&u| {
                let mut coeffs = spec.base.clone();
                if coeffs.len() < 2 {
                    coeffs.resize(2, 0.0);
                }
                coeffs[0] += rho * u;
                coeffs[1] -= rho;
                VectorFieldSpec::new(
                    format!("pull-to-{u}-at-{rho}"),
                    FieldShape::Polynomial { coeffs },
                )
            })
            .collect();
        let sys = HybridSystem::new(graph.clone(), fields, spec.space, spec.h)?;
        let cg = build_chain_graph(&sys, &spec.params)?;
        let result = chain_sets(&sys, &cg)?;
        let states: Vec<Vec<f64>> = result
            .components
            .iter()
            .map(|c| cg.states_of(&c.nodes))
            .collect();
        runs.push((rho, result, states));
    }

    let baseline = spec
        .rho_ladder
        .iter()
        .position(|&r| r == 0.0)
        .expect("ladder contains 0 by the check above");
    let base_comps: Vec<Vec<usize>> = runs[baseline]
        .1
        .components
        .iter()
        .map(|c| c.nodes.clone())
        .collect();
    let base_states: Vec<Vec<f64>> = runs[baseline].2.clone();

    let mut levels = Vec::with_capacity(runs.len());
    let mut bound_constant: f64 = 0.0;
    let spacing = match spec.space {
        StateSpace::Interval { lo, hi } => (hi - lo) / (spec.params.grid_n - 1) as f64,
        StateSpace::Circle => std::f64::consts::TAU / spec.params.grid_n as f64,
    };
    for (rho, result, component_states) in runs {
        let mut matched = Vec::with_capacity(result.components.len());
        let mut hausdorff = Vec::with_capacity(result.components.len());
        for (c, states) in result.components.iter().zip(&component_states) {
            let mut best: Option<(usize, usize)> = None;
            for (b, base_nodes) in base_comps.iter().enumerate() {
                let overlap = c
                    .nodes
                    .iter()
                    .filter(|n| base_nodes.binary_search(n).is_ok())
                    .count();
                if overlap > 0 && best.map_or(true, |(_, o)| overlap > o) {
                    best = Some((b, overlap));
                }
            }
            match best {
                Some((b, _)) => {
                    let d = hausdorff_distance(spec.space, states, &base_states[b]);
                    if rho > 0.0 {
                        bound_constant = bound_constant.max((d / 2.0 - spacing).max(0.0) / rho);
                    }
                    matched.push(Some(b));
                    hausdorff.push(Some(d));
                }
                None => {
                    matched.push(None);
                    hausdorff.push(None);
                }
            }
        }
        levels.push(SweepLevel {
            rho,
            result,
            component_states,
            matched,
            hausdorff,
        });
    }

    Ok(SweepReport {
        levels,
        baseline,
        spacing,
        bound_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_field(coeffs: &[f64], space: StateSpace, h: f64) -> HybridSystem {
        let g = DirectedGraph::complete_with_self_loops(1);
        let f = VectorFieldSpec::new(
            "only",
            FieldShape::Polynomial {
                coeffs: coeffs.to_vec(),
            },
        );
        HybridSystem::new(g, vec![f], space, h).unwrap()
    }

    fn bistable() -> HybridSystem {
        single_field(
            &[0.0, 1.0, 0.0, -1.0],
            StateSpace::Interval { lo: -1.3, hi: 1.3 },
            1.0,
        )
    }

    fn params(grid_n: usize, eps: f64) -> ChainParams {
        ChainParams {
            grid_n,
            eps,
            t_min: 2.0,
            t_max: 10.0,
            word_len: 1,
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let sys = bistable();
        let bad = |p: ChainParams| build_chain_graph(&sys, &p).unwrap_err();
        assert_eq!(
            bad(ChainParams { grid_n: 1, ..params(27, 0.15) }),
            AnalysisError::DegenerateGrid(1)
        );
        assert_eq!(
            bad(ChainParams { eps: 0.0, ..params(27, 0.15) }),
            AnalysisError::BadEps(0.0)
        );
        assert_eq!(
            bad(ChainParams { t_min: 0.0, ..params(27, 0.15) }),
            AnalysisError::BadChainTimes { t_min: 0.0, t_max: 10.0 }
        );
        assert_eq!(
            bad(ChainParams { t_max: 1.0, ..params(27, 0.15) }),
            AnalysisError::BadChainTimes { t_min: 2.0, t_max: 1.0 }
        );
        assert_eq!(
            bad(ChainParams { word_len: 0, ..params(27, 0.15) }),
            AnalysisError::BadWordLength
        );
    }

    #[test]
    fn contraction_yields_single_component_at_zero() {
        let sys = single_field(
            &[0.0, -1.0],
            StateSpace::Interval { lo: -1.0, hi: 1.0 },
            1.0,
        );
        let p = ChainParams {
            grid_n: 21,
            eps: 0.15,
            t_min: 2.0,
            t_max: 8.0,
            word_len: 1,
        };
        let cg = build_chain_graph(&sys, &p).unwrap();
        let sets = chain_sets(&sys, &cg).unwrap();
        assert_eq!(sets.len(), 1);
        let comp = &sets.components[0];
        assert!(comp.nodes.contains(&10), "origin node missing: {:?}", comp.nodes);
        for &n in &comp.nodes {
            assert!(cg.grid()[n].abs() <= p.eps + 1e-9);
        }
        assert!(comp.witness.is_some());
    }

    #[test]
    fn bistable_field_has_three_components() {
        let sys = bistable();
        let cg = build_chain_graph(&sys, &params(27, 0.15)).unwrap();
        let sets = chain_sets(&sys, &cg).unwrap();
        assert_eq!(sets.len(), 3, "components: {:?}", sets.components);
        assert_eq!(sets.component_of(3), Some(0));
        assert_eq!(sets.component_of(13), Some(1));
        assert_eq!(sets.component_of(23), Some(2));
        for comp in &sets.components {
            assert!(comp.witness.is_some());
        }
    }

    #[test]
    fn enlarging_eps_only_merges_components() {
        let sys = bistable();
        let tight = chain_sets(&sys, &build_chain_graph(&sys, &params(27, 0.15)).unwrap()).unwrap();
        let loose = chain_sets(&sys, &build_chain_graph(&sys, &params(27, 0.3)).unwrap()).unwrap();
        for comp in &tight.components {
            let homes: Vec<Option<usize>> = comp
                .nodes
                .iter()
                .map(|&n| loose.component_of(n))
                .collect();
            assert!(homes.iter().all(|h| h.is_some() && *h == homes[0]));
        }
    }

    #[test]
    fn circle_component_spans_the_seam() {
        let g = DirectedGraph::complete_with_self_loops(1);
        let f = VectorFieldSpec::new(
            "toward-zero",
            FieldShape::Harmonic {
                offset: 0.0,
                amplitude: 1.0,
                phase: -std::f64::consts::FRAC_PI_2,
            },
        );
        let sys = HybridSystem::new(g, vec![f], StateSpace::Circle, 1.0).unwrap();
        let p = ChainParams {
            grid_n: 16,
            eps: 0.5,
            t_min: 3.0,
            t_max: 9.0,
            word_len: 1,
        };
        let cg = build_chain_graph(&sys, &p).unwrap();
        let sets = chain_sets(&sys, &cg).unwrap();
        assert_eq!(sets.len(), 2, "components: {:?}", sets.components);
        let zero_comp = sets.component_of(0).unwrap();
        let comp = &sets.components[zero_comp];
        assert!(comp.nodes.contains(&15), "seam not crossed: {:?}", comp.nodes);
        assert_eq!(sets.component_of(8), Some(1 - zero_comp));
    }

    #[test]
    fn lift_check_passes_on_invariant_core() {
        let sys = bistable();
        let cg = build_chain_graph(&sys, &params(27, 0.15)).unwrap();
        let sets = chain_sets(&sys, &cg).unwrap();
        let core = &sets.components[1];
        assert_eq!(core.nodes, vec![13]);
        let report = lift_projection_check(&sys, &cg, &core.nodes).unwrap();
        assert!(report.passed, "failures: {:?}", report.failures);
        assert!(report.max_snap_drift <= cg.params().eps);
    }

    #[test]
    fn lift_check_separates_skirt_from_split() {
        let sys = bistable();
        let cg = build_chain_graph(&sys, &params(27, 0.15)).unwrap();
        let sets = chain_sets(&sys, &cg).unwrap();

        // The eps-skirt of an attractor is hop-recurrent, but skirt nodes have
        // no full orbit inside the tube: backward flow leaves it.
        let attractor = &sets.components[2];
        assert!(attractor.nodes.len() > 1);
        let report = lift_projection_check(&sys, &cg, &attractor.nodes).unwrap();
        assert!(report.connectivity_ok, "failures: {:?}", report.failures);
        assert!(!report.invariance_ok);
        assert!(!report.passed);

        // A union of two unrelated pieces fails pairwise hop-connectivity.
        let padded = vec![8, 13];
        let report = lift_projection_check(&sys, &cg, &padded).unwrap();
        assert!(!report.connectivity_ok);
        assert!(!report.passed);
    }

    #[test]
    fn sweep_tracks_components_toward_the_unperturbed_run() {
        let spec = SweepSpec {
            base: vec![0.0, 1.0, 0.0, -1.0],
            targets: vec![-1.0, 0.0, 1.0],
            rho_ladder: vec![0.1, 0.0],
            space: StateSpace::Interval { lo: -1.3, hi: 1.3 },
            h: 1.0,
            params: ChainParams {
                grid_n: 27,
                eps: 0.15,
                t_min: 2.0,
                t_max: 10.0,
                word_len: 1,
            },
        };
        let report = perturbation_sweep(&spec).unwrap();
        assert_eq!(report.baseline, 1);
        assert_eq!(report.levels.len(), 2);
        for level in &report.levels {
            assert_eq!(level.result.len(), 3, "rho={}: {:?}", level.rho, level.result);
            assert_eq!(level.matched_count(), 3);
        }
        for d in report.levels[report.baseline].hausdorff.iter() {
            assert_eq!(*d, Some(0.0));
        }
        assert!(report.bound_constant.is_finite());
        for b in 0..3 {
            let series = report.series_for(b);
            assert_eq!(series.len(), 2);
            assert!(series[0].1 >= series[1].1);
        }
    }

    #[test]
    fn sweep_requires_zero_rho() {
        let spec = SweepSpec {
            base: vec![0.0, 1.0, 0.0, -1.0],
            targets: vec![0.0],
            rho_ladder: vec![0.2, 0.1],
            space: StateSpace::Interval { lo: -1.3, hi: 1.3 },
            h: 1.0,
            params: params(27, 0.15),
        };
        assert_eq!(
            perturbation_sweep(&spec).unwrap_err(),
            AnalysisError::MissingZeroRho
        );
    }
}
