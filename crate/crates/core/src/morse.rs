//! Verification of ordered invariant-region families for hybrid systems.
//!
//! A candidate pairs a state-space part (finite union of closed intervals,
//! possibly degenerate points) with a signal family described symbolically:
//! all admissible signals, the single constant signal at a vertex, or all
//! signals confined to a vertex class. [`verify_morse_decomposition`] runs
//! seven numeric condition checks over sampled trajectories and assembles a
//! report with one verdict per condition plus the observed order edges
//! (backward-limit candidate to forward-limit candidate per sampled
//! trajectory).
//!
//! Every check is a sampling proxy, not a proof: invariance is checked along
//! finitely many trajectories, isolation by state-shell escape, limit
//! containment through clustered limit estimates. The report says exactly
//! which samples were used so failures are reproducible.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::graph::{strongly_connected_components, DirectedGraph};
use crate::hybrid::{hybrid_flow, trajectory, HybridSystem, ProductPoint, StateSpace};
use crate::limits::{
    alpha_limit_estimate, omega_limit_estimate, LimitSetEstimate, DEFAULT_BURN_DWELLS,
    DEFAULT_CLUSTER_RADIUS, DEFAULT_HORIZON_DWELLS,
};
use crate::signal::{signal_catalog, Extension, SymbolicSignal};

/// Finite union of closed state intervals (degenerate intervals are points).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    intervals: Vec<(f64, f64)>,
}

impl Region {
    /// Builds a region from closed intervals; sorts them and requires them
    /// to be finite, ordered and pairwise disjoint.
    pub fn from_intervals(intervals: Vec<(f64, f64)>) -> Result<Self, AnalysisError> {
        if intervals.is_empty() {
            return Err(AnalysisError::BadRegion("no intervals".into()));
        }
        let mut iv = intervals;
        for &(lo, hi) in &iv {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(AnalysisError::BadRegion(format!("bad interval [{lo}, {hi}]")));
            }
        }
        iv.sort_by(|a, b| a.partial_cmp(b).expect("finite intervals"));
        for pair in iv.windows(2) {
            if pair[1].0 <= pair[0].1 {
                return Err(AnalysisError::BadRegion(format!(
                    "overlapping intervals [{}, {}] and [{}, {}]",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(Self { intervals: iv })
    }

    /// Single point region.
    pub fn point(x: f64) -> Result<Self, AnalysisError> {
        Self::from_intervals(vec![(x, x)])
    }

    /// Single interval region.
    pub fn interval(lo: f64, hi: f64) -> Result<Self, AnalysisError> {
        Self::from_intervals(vec![(lo, hi)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Distance from `x` to the region (0 inside).
    pub fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// Closed-interval overlap with another region.
    pub fn intersects(&self, other: &Region) -> bool {
        self.intervals.iter().any(|&(a_lo, a_hi)| {
            other
                .intervals
                .iter()
                .any(|&(b_lo, b_hi)| a_lo <= b_hi && b_lo <= a_hi)
        })
    }

    /// True when every point of `self` lies in `other`.
    pub fn contained_in(&self, other: &Region) -> bool {
        self.intervals.iter().all(|&(lo, hi)| {
            other
                .intervals
                .iter()
                .any(|&(o_lo, o_hi)| o_lo <= lo && hi <= o_hi)
        })
    }

    /// Deterministic sample states: for each interval its endpoints plus
    /// `per_interval - 2` evenly spaced interior points (a single point for
    /// degenerate intervals).
    pub fn sample_states(&self, per_interval: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for &(lo, hi) in &self.intervals {
            if lo == hi {
                out.push(lo);
                continue;
            }
            let n = per_interval.max(2);
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                out.push(lo + t * (hi - lo));
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.intervals[0].0
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].1
    }
}

/// Symbolic description of a family of switching signals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DeltaFamily {
    /// Every signal admissible for the system graph.
    AllAdmissible,
    /// The single constant signal at `vertex` (requires a self-loop there).
    ConstantAt { vertex: usize },
    /// All admissible signals confined to the given vertex set.
    LiftOfClass { members: Vec<usize> },
}

impl DeltaFamily {
    /// Checks the family describes a nonempty signal set for `g`.
    pub fn validate(&self, g: &DirectedGraph) -> Result<(), String> {
        match self {
            DeltaFamily::AllAdmissible => Ok(()),
            DeltaFamily::ConstantAt { vertex } => {
                if *vertex >= g.n_vertices() {
                    return Err(format!("vertex {vertex} out of range"));
                }
                if !g.has_edge(*vertex, *vertex) {
                    return Err(format!("vertex {vertex} has no self-loop"));
                }
                Ok(())
            }
            DeltaFamily::LiftOfClass { members } => {
                if members.is_empty() {
                    return Err("empty class".into());
                }
                let mut sorted = members.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != members.len() || &sorted != members {
                    return Err("members must be sorted and unique".into());
                }
                if members.iter().any(|&v| v >= g.n_vertices()) {
                    return Err("class member out of range".into());
                }
                if !induced_subgraph_has_cycle(g, members) {
                    return Err("class supports no bi-infinite signal (no cycle)".into());
                }
                Ok(())
            }
        }
    }

    /// Signal membership (admissibility is assumed checked separately).
    pub fn contains_signal(&self, sig: &SymbolicSignal) -> bool {
        match self {
            DeltaFamily::AllAdmissible => true,
            DeltaFamily::ConstantAt { vertex } => sig.word().iter().all(|&v| v == *vertex),
            DeltaFamily::LiftOfClass { members } => sig
                .word()
                .iter()
                .all(|&v| members.binary_search(&v).is_ok()),
        }
    }

    /// Deterministic finite sample of the family.
    pub fn sample_signals(
        &self,
        g: &DirectedGraph,
        word_len: usize,
        h: f64,
    ) -> Vec<SymbolicSignal> {
        match self {
            DeltaFamily::AllAdmissible => {
                let all: Vec<usize> = (0..g.n_vertices()).collect();
                signal_catalog(g, &all, word_len, h)
            }
            DeltaFamily::ConstantAt { vertex } => vec![SymbolicSignal::constant(*vertex, h)],
            DeltaFamily::LiftOfClass { members } => signal_catalog(g, members, word_len, h),
        }
    }

    /// Whether two families share at least one signal.
    pub fn intersects(&self, other: &DeltaFamily, g: &DirectedGraph) -> bool {
        use DeltaFamily::*;
        match (self, other) {
            (AllAdmissible, f) | (f, AllAdmissible) => f.validate(g).is_ok(),
            (ConstantAt { vertex: a }, ConstantAt { vertex: b }) => a == b,
            (ConstantAt { vertex }, LiftOfClass { members })
            | (LiftOfClass { members }, ConstantAt { vertex }) => {
                members.binary_search(vertex).is_ok() && g.has_edge(*vertex, *vertex)
            }
            (LiftOfClass { members: a }, LiftOfClass { members: b }) => {
                let common: Vec<usize> = a
                    .iter()
                    .copied()
                    .filter(|v| b.binary_search(v).is_ok())
                    .collect();
                !common.is_empty() && induced_subgraph_has_cycle(g, &common)
            }
        }
    }

    /// The signal family reached in forward time by `sig` (constant tail for
    /// constant-ends signals, the shift orbit of `sig` itself otherwise) is
    /// contained in this family.
    pub fn contains_forward_limit(&self, sig: &SymbolicSignal) -> bool {
        match sig.extension() {
            Extension::ConstantEnds => {
                let last = *sig.word().last().expect("nonempty word");
                self.contains_signal(&SymbolicSignal::constant(last, sig.h()))
            }
            Extension::PeriodicWord => self.contains_signal(sig),
        }
    }

    /// Backward-time counterpart of [`Self::contains_forward_limit`].
    pub fn contains_backward_limit(&self, sig: &SymbolicSignal) -> bool {
        match sig.extension() {
            Extension::ConstantEnds => {
                let first = sig.word()[0];
                self.contains_signal(&SymbolicSignal::constant(first, sig.h()))
            }
            Extension::PeriodicWord => self.contains_signal(sig),
        }
    }
}

/// Does the subgraph induced on `members` (sorted) contain a cycle?
fn induced_subgraph_has_cycle(g: &DirectedGraph, members: &[usize]) -> bool {
    let succ: Vec<Vec<usize>> = (0..g.n_vertices())
        .map(|v| {
            if members.binary_search(&v).is_ok() {
                g.successors(v)
                    .into_iter()
                    .filter(|w| members.binary_search(w).is_ok())
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    strongly_connected_components(g.n_vertices(), &succ)
        .into_iter()
        .any(|comp| {
            members.binary_search(&comp[0]).is_ok()
                && (comp.len() > 1 || g.has_edge(comp[0], comp[0]))
        })
}

/// One member of a proposed decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseCandidate {
    pub name: String,
    pub m_part: Region,
    pub delta_part: DeltaFamily,
}

impl MorseCandidate {
    pub fn new(name: impl Into<String>, m_part: Region, delta_part: DeltaFamily) -> Self {
        Self {
            name: name.into(),
            m_part,
            delta_part,
        }
    }

    /// Does the candidate contain the product point up to `tol` in state and
    /// exactly in signal family?
    pub fn contains_point(&self, p: &ProductPoint, tol: f64) -> bool {
        self.m_part.contains(p.x, tol) && self.delta_part.contains_signal(&p.signal)
    }
}

/// Tolerances, horizons and sample counts for the verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    /// Burn-in time for limit estimates.
    pub burn: f64,
    /// Horizon for limit estimates.
    pub horizon: f64,
    /// Cluster radius for limit estimates.
    pub cluster_radius: f64,
    /// State tolerance for containment and invariance checks.
    pub match_tol: f64,
    /// Inner shell radius for the isolation proxy (outer is twice this).
    pub isolation_shell: f64,
    /// Forward/backward horizon for shell escape.
    pub isolation_horizon: f64,
    /// Half-width of the invariance check window.
    pub invariance_span: f64,
    /// Maximum word length for signal catalogs.
    pub word_len: usize,
    /// States sampled per interval and across the space hull.
    pub n_state_samples: usize,
    /// Additional product points checked for limit containment (connecting
    /// orbit witnesses).
    pub extra_witnesses: Vec<ProductPoint>,
}

impl SamplingPlan {
    /// Defaults scaled by the dwell length.
    pub fn default_for(h: f64) -> Self {
        Self {
            burn: DEFAULT_BURN_DWELLS * h,
            horizon: DEFAULT_HORIZON_DWELLS * h,
            cluster_radius: DEFAULT_CLUSTER_RADIUS,
            match_tol: 1e-2,
            isolation_shell: 1e-2,
            isolation_horizon: 100.0 * h,
            invariance_span: 50.0 * h,
            word_len: 3,
            n_state_samples: 12,
            extra_witnesses: Vec::new(),
        }
    }
}

/// Verdict for one of the seven checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub passed: bool,
    pub details: String,
}

impl ConditionReport {
    fn pass(condition: &str, details: impl Into<String>) -> Self {
        Self {
            condition: condition.into(),
            passed: true,
            details: details.into(),
        }
    }

    fn fail(condition: &str, details: impl Into<String>) -> Self {
        Self {
            condition: condition.into(),
            passed: false,
            details: details.into(),
        }
    }
}

/// A connecting-orbit observation: some sampled trajectory has its backward
/// limit in candidate `from` and its forward limit in candidate `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEdge {
    pub from: usize,
    pub to: usize,
    /// Initial state of the witness trajectory.
    pub witness_x: f64,
    /// Readable description of the witness signal.
    pub witness_signal: String,
}

/// Aggregated verification outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub conditions: Vec<ConditionReport>,
    pub order_edges: Vec<OrderEdge>,
    pub passed: bool,
}

impl MorseReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.condition == name)
    }

    /// Reflexive-transitive closure of the order edges over `n` candidates.
    pub fn order_closure(&self, n: usize) -> Vec<(usize, usize)> {
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n {
            reach[i][i] = true;
        }
        for e in &self.order_edges {
            reach[e.from][e.to] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (i, row) in reach.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if r {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn has_order_edge(&self, from: usize, to: usize) -> bool {
        self.order_edges.iter().any(|e| e.from == from && e.to == to)
    }
}

pub const CONDITION_NAMES: [&str; 7] = [
    "nonvoid",
    "pairwise-disjoint",
    "invariant",
    "isolated",
    "omega-containment",
    "alpha-containment",
    "order-acyclic",
];

/// Runs the seven condition checks against `candidates`.
pub fn verify_morse_decomposition(
    sys: &HybridSystem,
    candidates: &[MorseCandidate],
    plan: &SamplingPlan,
) -> Result<MorseReport, AnalysisError> {
    if candidates.is_empty() {
        return Err(AnalysisError::Precondition(
            "at least one candidate required".into(),
        ));
    }
    for (index, c) in candidates.iter().enumerate() {
        if let Err(reason) = c.delta_part.validate(sys.graph()) {
            return Err(AnalysisError::BadCandidate { index, reason });
        }
        if let StateSpace::Interval { lo, hi } = sys.space() {
            if c.m_part.min() < lo || c.m_part.max() > hi {
                return Err(AnalysisError::BadCandidate {
                    index,
                    reason: "state part leaves the state space".into(),
                });
            }
        }
    }

    let mut conditions = Vec::with_capacity(7);
    conditions.push(check_nonvoid(candidates));
    conditions.push(check_disjoint(sys.graph(), candidates));
    conditions.push(check_invariant(sys, candidates, plan));
    conditions.push(check_isolated(sys, candidates, plan));
    let (omega_cond, alpha_cond, order_edges) = check_containment(sys, candidates, plan)?;
    conditions.push(omega_cond);
    conditions.push(alpha_cond);
    conditions.push(check_acyclic(&order_edges, candidates));

    let passed = conditions.iter().all(|c| c.passed);
    Ok(MorseReport {
        conditions,
        order_edges,
        passed,
    })
}

fn check_nonvoid(candidates: &[MorseCandidate]) -> ConditionReport {
    // Regions and validated families are nonempty by construction.
    ConditionReport::pass(
        "nonvoid",
        format!("{} candidates, all nonempty", candidates.len()),
    )
}

fn check_disjoint(g: &DirectedGraph, candidates: &[MorseCandidate]) -> ConditionReport {
    let mut clashes = Vec::new();
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            let a = &candidates[i];
            let b = &candidates[j];
            if a.m_part.intersects(&b.m_part) && a.delta_part.intersects(&b.delta_part, g) {
                clashes.push(format!("{} overlaps {}", a.name, b.name));
            }
        }
    }
    if clashes.is_empty() {
        ConditionReport::pass("pairwise-disjoint", "no product overlap between candidates")
    } else {
        ConditionReport::fail("pairwise-disjoint", clashes.join("; "))
    }
}

fn check_invariant(
    sys: &HybridSystem,
    candidates: &[MorseCandidate],
    plan: &SamplingPlan,
) -> ConditionReport {
    let mut failures = Vec::new();
    let mut n_checked = 0usize;
    for c in candidates {
        let states = c.m_part.sample_states(plan.n_state_samples.min(5).max(2));
        let signals = c
            .delta_part
            .sample_signals(sys.graph(), plan.word_len, sys.h());
        let runs: Vec<Option<String>> = pairs(&states, &signals)
            .par_iter()
            .map(|(x0, sig)| {
                for dir in [1.0f64, -1.0] {
                    let t_end = dir * plan.invariance_span;
                    let samples = match trajectory(sys, sig, *x0, 0.0, t_end, sys.h()) {
                        Ok(s) => s,
                        Err(e) => return Some(format!("{}: flow error {e}", c.name)),
                    };
                    for s in &samples {
                        if !c.m_part.contains(s.x, plan.match_tol) {
                            return Some(format!(
                                "{}: x0={x0} signal {} left the region at t={} (x={})",
                                c.name,
                                describe_signal(sig),
                                s.t,
                                s.x
                            ));
                        }
                    }
                }
                None
            })
            .collect();
        n_checked += runs.len();
        failures.extend(runs.into_iter().flatten());
    }
    if failures.is_empty() {
        ConditionReport::pass(
            "invariant",
            format!("{n_checked} sampled trajectories stayed in their candidate"),
        )
    } else {
        failures.truncate(5);
        ConditionReport::fail("invariant", failures.join("; "))
    }
}

fn check_isolated(
    sys: &HybridSystem,
    candidates: &[MorseCandidate],
    plan: &SamplingPlan,
) -> ConditionReport {
    let r = plan.isolation_shell;
    // All-admissible signals probe the shell regardless of the candidate's
    // own family; a shell point must escape the annulus under each of them.
    let all: Vec<usize> = (0..sys.graph().n_vertices()).collect();
    let mut probe_signals = signal_catalog(sys.graph(), &all, plan.word_len, sys.h());
    let mut failures = Vec::new();
    let mut n_checked = 0usize;
    for c in candidates {
        let mut shell_states = Vec::new();
        for &(lo, hi) in c.m_part.intervals() {
            for x in [lo - 1.5 * r, hi + 1.5 * r] {
                let in_space = sys.space().contains(x);
                let in_shell = {
                    let d = c.m_part.distance_to(x);
                    d > r && d < 2.0 * r
                };
                if in_space && in_shell {
                    shell_states.push(x);
                }
            }
        }
        for own in c.delta_part.sample_signals(sys.graph(), plan.word_len, sys.h()) {
            if !probe_signals.contains(&own) {
                probe_signals.push(own);
            }
        }
        let runs: Vec<Option<String>> = pairs(&shell_states, &probe_signals)
            .par_iter()
            .map(|(x0, sig)| {
                let samples =
                    match trajectory(sys, sig, *x0, 0.0, plan.isolation_horizon, sys.h()) {
                        Ok(s) => s,
                        Err(e) => return Some(format!("{}: flow error {e}", c.name)),
                    };
                let escapes = |s: &[crate::hybrid::TrajectorySample]| {
                    s.iter().any(|s| {
                        let d = c.m_part.distance_to(s.x);
                        d <= r || d >= 2.0 * r
                    })
                };
                if escapes(&samples) {
                    return None;
                }
                let back =
                    match trajectory(sys, sig, *x0, 0.0, -plan.isolation_horizon, sys.h()) {
                        Ok(s) => s,
                        Err(e) => return Some(format!("{}: flow error {e}", c.name)),
                    };
                if escapes(&back) {
                    return None;
                }
                Some(format!(
                    "{}: shell point {x0} with signal {} never left the annulus",
                    c.name,
                    describe_signal(sig)
                ))
            })
            .collect();
        n_checked += runs.len();
        failures.extend(runs.into_iter().flatten());
    }
    if failures.is_empty() {
        ConditionReport::pass(
            "isolated",
            format!("{n_checked} shell trajectories escaped the annulus"),
        )
    } else {
        failures.truncate(5);
        ConditionReport::fail("isolated", failures.join("; "))
    }
}

struct ContainmentOutcome {
    alpha_idx: Option<usize>,
    omega_idx: Option<usize>,
    witness_x: f64,
    witness_signal: String,
}

fn check_containment(
    sys: &HybridSystem,
    candidates: &[MorseCandidate],
    plan: &SamplingPlan,
) -> Result<(ConditionReport, ConditionReport, Vec<OrderEdge>), AnalysisError> {
    let all: Vec<usize> = (0..sys.graph().n_vertices()).collect();
    let signals = signal_catalog(sys.graph(), &all, plan.word_len, sys.h());
    let mut batch: Vec<ProductPoint> = Vec::new();
    if let StateSpace::Interval { lo, hi } = sys.space() {
        let n = plan.n_state_samples.max(2);
        for i in 0..n {
            let x = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
            for sig in &signals {
                batch.push(ProductPoint {
                    x,
                    signal: sig.clone(),
                });
            }
        }
    } else {
        let n = plan.n_state_samples.max(2);
        for i in 0..n {
            let x = std::f64::consts::TAU * (i as f64) / (n as f64);
            for sig in &signals {
                batch.push(ProductPoint {
                    x,
                    signal: sig.clone(),
                });
            }
        }
    }
    batch.extend(plan.extra_witnesses.iter().cloned());

    let outcomes: Vec<Result<ContainmentOutcome, AnalysisError>> = batch
        .par_iter()
        .map(|p| {
            let omega = omega_limit_estimate(sys, p, plan.burn, plan.horizon, plan.cluster_radius)?;
            let alpha = alpha_limit_estimate(sys, p, plan.burn, plan.horizon, plan.cluster_radius)?;
            Ok(ContainmentOutcome {
                alpha_idx: locate_limit(candidates, &alpha, &p.signal, plan.match_tol, false),
                omega_idx: locate_limit(candidates, &omega, &p.signal, plan.match_tol, true),
                witness_x: p.x,
                witness_signal: describe_signal(&p.signal),
            })
        })
        .collect();

    let mut omega_failures = Vec::new();
    let mut alpha_failures = Vec::new();
    let mut edges: Vec<OrderEdge> = Vec::new();
    let mut n_points = 0usize;
    for outcome in outcomes {
        let o = outcome?;
        n_points += 1;
        match (o.alpha_idx, o.omega_idx) {
            (Some(a), Some(w)) => {
                if a != w && !edges.iter().any(|e| e.from == a && e.to == w) {
                    edges.push(OrderEdge {
                        from: a,
                        to: w,
                        witness_x: o.witness_x,
                        witness_signal: o.witness_signal.clone(),
                    });
                }
            }
            _ => {
                if o.omega_idx.is_none() {
                    omega_failures.push(format!(
                        "x0={} signal {}: forward limit in no candidate",
                        o.witness_x, o.witness_signal
                    ));
                }
                if o.alpha_idx.is_none() {
                    alpha_failures.push(format!(
                        "x0={} signal {}: backward limit in no candidate",
                        o.witness_x, o.witness_signal
                    ));
                }
            }
        }
    }
    edges.sort_by_key(|e| (e.from, e.to));

    let omega_cond = if omega_failures.is_empty() {
        ConditionReport::pass(
            "omega-containment",
            format!("forward limits of {n_points} sampled points all landed in candidates"),
        )
    } else {
        let shown = omega_failures.len().min(5);
        ConditionReport::fail(
            "omega-containment",
            format!(
                "{} of {} sampled points escaped: {}",
                omega_failures.len(),
                n_points,
                omega_failures[..shown].join("; ")
            ),
        )
    };
    let alpha_cond = if alpha_failures.is_empty() {
        ConditionReport::pass(
            "alpha-containment",
            format!("backward limits of {n_points} sampled points all landed in candidates"),
        )
    } else {
        let shown = alpha_failures.len().min(5);
        ConditionReport::fail(
            "alpha-containment",
            format!(
                "{} of {} sampled points escaped: {}",
                alpha_failures.len(),
                n_points,
                alpha_failures[..shown].join("; ")
            ),
        )
    };
    Ok((omega_cond, alpha_cond, edges))
}

/// Index of the candidate containing every representative of `est` (state
/// within `tol`) and the limiting signal family of `sig` in the requested
/// time direction.
fn locate_limit(
    candidates: &[MorseCandidate],
    est: &LimitSetEstimate,
    sig: &SymbolicSignal,
    tol: f64,
    forward: bool,
) -> Option<usize> {
    candidates.iter().position(|c| {
        let states_ok = est.points.iter().all(|&p| c.m_part.contains(p, tol));
        let signal_ok = if forward {
            c.delta_part.contains_forward_limit(sig)
        } else {
            c.delta_part.contains_backward_limit(sig)
        };
        states_ok && signal_ok
    })
}

fn check_acyclic(edges: &[OrderEdge], candidates: &[MorseCandidate]) -> ConditionReport {
    let n = candidates.len();
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.from].push(e.to);
    }
    // Kahn's algorithm; leftovers mean a cycle.
    let mut indeg = vec![0usize; n];
    for tos in &adj {
        for &t in tos {
            indeg[t] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0usize;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &t in &adj[v] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push(t);
            }
        }
    }
    if seen == n {
        ConditionReport::pass(
            "order-acyclic",
            format!("{} connecting edges form no cycle", edges.len()),
        )
    } else {
        let cyclic: Vec<String> = (0..n)
            .filter(|&v| indeg[v] > 0)
            .map(|v| candidates[v].name.clone())
            .collect();
        ConditionReport::fail(
            "order-acyclic",
            format!("cycle through {}", cyclic.join(", ")),
        )
    }
}

fn pairs<'a>(
    states: &'a [f64],
    signals: &'a [SymbolicSignal],
) -> Vec<(f64, &'a SymbolicSignal)> {
    let mut out = Vec::with_capacity(states.len() * signals.len());
    for &x in states {
        for sig in signals {
            out.push((x, sig));
        }
    }
    out
}

fn describe_signal(sig: &SymbolicSignal) -> String {
    let ext = match sig.extension() {
        Extension::PeriodicWord => "periodic",
        Extension::ConstantEnds => "constant-ends",
    };
    format!("{:?}/{ext}", sig.word())
}

/// Result of the attracting-region probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractingReport {
    /// Every sampled trajectory from `n_region` entered `a_region` and
    /// stayed there (within tolerance) for the rest of the horizon.
    pub attracting: bool,
    /// Largest observed first-entry time over all samples (0 when all
    /// sampled states start inside the region).
    pub entry_time: f64,
    /// Witnesses for trajectories that never entered or re-escaped.
    pub failures: Vec<String>,
    pub n_trajectories: usize,
}

/// Samples trajectories from `n_region` under the full signal catalog and
/// checks they enter `a_region` and remain there, reporting the empirical
/// uniform entry time.
pub fn attracting_region_check(
    sys: &HybridSystem,
    a_region: &Region,
    n_region: &Region,
    plan: &SamplingPlan,
) -> Result<AttractingReport, AnalysisError> {
    if !a_region.contained_in(n_region) {
        return Err(AnalysisError::RegionNotContained);
    }
    let all: Vec<usize> = (0..sys.graph().n_vertices()).collect();
    let signals = signal_catalog(sys.graph(), &all, plan.word_len, sys.h());
    if signals.is_empty() {
        return Err(AnalysisError::EmptySignalCatalog);
    }
    let states = n_region.sample_states(plan.n_state_samples.max(5));
    let runs: Vec<Result<(Option<f64>, Option<String>), AnalysisError>> =
        pairs(&states, &signals)
            .par_iter()
            .map(|(x0, sig)| {
                let samples = trajectory(sys, sig, *x0, 0.0, plan.horizon, sys.h())?;
                let entry = samples.iter().find(|s| a_region.contains(s.x, 0.0));
                match entry {
                    None => Ok((
                        None,
                        Some(format!(
                            "x0={x0} signal {} never entered within t={}",
                            describe_signal(sig),
                            plan.horizon
                        )),
                    )),
                    Some(e) => {
                        let re_exit = samples
                            .iter()
                            .filter(|s| s.t > e.t)
                            .find(|s| !a_region.contains(s.x, plan.match_tol));
                        match re_exit {
                            Some(s) => Ok((
                                None,
                                Some(format!(
                                    "x0={x0} signal {} re-escaped at t={} (x={})",
                                    describe_signal(sig),
                                    s.t,
                                    s.x
                                )),
                            )),
                            None => Ok((Some(e.t), None)),
                        }
                    }
                }
            })
            .collect();

    let mut entry_time: f64 = 0.0;
    let mut failures = Vec::new();
    let mut n_trajectories = 0usize;
    for run in runs {
        let (entry, failure) = run?;
        n_trajectories += 1;
        if let Some(t) = entry {
            entry_time = entry_time.max(t);
        }
        if let Some(f) = failure {
            failures.push(f);
        }
    }
    failures.truncate(10);
    Ok(AttractingReport {
        attracting: failures.is_empty(),
        entry_time,
        failures,
        n_trajectories,
    })
}

/// One visit in the self-loop dwell schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitRecord {
    pub round: usize,
    pub vertex: usize,
    pub eps: f64,
    /// Dwell intervals spent at the vertex during this visit.
    pub dwell_steps: usize,
    /// Final distance to the vertex's own forward limit set.
    pub achieved_distance: f64,
    /// Representatives of that limit set.
    pub limit_points: Vec<f64>,
}

const MAX_DWELL_STEPS: usize = 100_000;

/// Builds a switching signal by dwelling at each vertex in turn until the
/// state is within the round's tolerance of that vertex's own forward limit
/// set, cycling through all vertices once per schedule entry. Requires every
/// vertex to have a self-loop and the graph to be one communicating class.
/// Returns the signal prefix (frozen at its last vertex) and the visit log.
pub fn selfloop_visit_schedule(
    sys: &HybridSystem,
    x0: f64,
    eps_schedule: &[f64],
) -> Result<(SymbolicSignal, Vec<VisitRecord>), AnalysisError> {
    let g = sys.graph();
    for v in 0..g.n_vertices() {
        if !g.has_edge(v, v) {
            return Err(AnalysisError::Precondition(format!(
                "vertex {v} has no self-loop"
            )));
        }
    }
    let classes = crate::graph::communicating_classes(g)?;
    let all: Vec<usize> = (0..g.n_vertices()).collect();
    if classes.len() != 1 || classes[0].members != all {
        return Err(AnalysisError::Precondition(
            "graph must form a single communicating class".into(),
        ));
    }
    if eps_schedule.is_empty() || eps_schedule.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
        return Err(AnalysisError::Precondition(
            "eps schedule must be nonempty and positive".into(),
        ));
    }
    if !sys.space().contains(x0) {
        return Err(AnalysisError::Precondition(format!(
            "x0={x0} outside the state space"
        )));
    }

    let h = sys.h();
    let mut word: Vec<usize> = Vec::new();
    let mut x = x0;
    let mut log = Vec::new();
    for (round, &eps) in eps_schedule.iter().enumerate() {
        for v in 0..g.n_vertices() {
            // Walk intermediate vertices toward v when the previous dwell
            // ended elsewhere; the dwell loop below appends v itself.
            if let Some(&last) = word.last() {
                if last != v {
                    let path = crate::graph::shortest_path_with_edge(g, last, v, &all)
                        .ok_or_else(|| {
                            AnalysisError::Precondition(format!("no path {last} -> {v}"))
                        })?;
                    for &step in &path[1..path.len() - 1] {
                        word.push(step);
                        x = hybrid_flow(sys, &SymbolicSignal::constant(step, h), x, h)?;
                    }
                }
            }
            let own = SymbolicSignal::constant(v, h);
            let target = omega_limit_estimate(
                sys,
                &ProductPoint {
                    x,
                    signal: own.clone(),
                },
                DEFAULT_BURN_DWELLS * h,
                DEFAULT_HORIZON_DWELLS * h,
                DEFAULT_CLUSTER_RADIUS,
            )?;
            let dist_to_target = |x: f64| {
                target
                    .min_distance_to(x, sys.space())
                    .unwrap_or(f64::INFINITY)
            };
            let mut dwell_steps = 0usize;
            word.push(v);
            dwell_steps += 1;
            x = hybrid_flow(sys, &own, x, h)?;
            while dist_to_target(x) > eps {
                if dwell_steps >= MAX_DWELL_STEPS {
                    return Err(AnalysisError::DwellDidNotConverge {
                        vertex: v,
                        max_steps: MAX_DWELL_STEPS,
                    });
                }
                word.push(v);
                dwell_steps += 1;
                x = hybrid_flow(sys, &own, x, h)?;
            }
            log.push(VisitRecord {
                round,
                vertex: v,
                eps,
                dwell_steps,
                achieved_distance: dist_to_target(x),
                limit_points: target.points.clone(),
            });
        }
    }
    let signal = SymbolicSignal::admissible(g, word, h, 0.0, 0, Extension::ConstantEnds)?;
    Ok((signal, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::{FieldShape, VectorFieldSpec};

    #[test]
    fn region_validation_and_distance() {
        assert!(Region::from_intervals(vec![]).is_err());
        assert!(Region::from_intervals(vec![(1.0, 0.0)]).is_err());
        assert!(Region::from_intervals(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        let r = Region::from_intervals(vec![(0.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_eq!(r.distance_to(0.5), 0.0);
        assert_eq!(r.distance_to(1.5), 0.5);
        assert_eq!(r.distance_to(2.25), 0.25);
        assert!(r.contains(1.004, 5e-3));
        assert_eq!(r.min(), 0.0);
        assert_eq!(r.max(), 2.0);
    }

    #[test]
    fn region_intersection_and_containment() {
        let a = Region::interval(0.0, 1.0).unwrap();
        let b = Region::interval(1.0, 2.0).unwrap();
        let c = Region::interval(1.5, 1.8).unwrap();
        assert!(a.intersects(&b));
        assert!(!a.intersects(&c));
        assert!(c.contained_in(&b));
        assert!(!b.contained_in(&c));
    }

    #[test]
    fn delta_family_membership_and_intersection() {
        let g = DirectedGraph::complete_with_self_loops(2);
        let all = DeltaFamily::AllAdmissible;
        let c0 = DeltaFamily::ConstantAt { vertex: 0 };
        let c1 = DeltaFamily::ConstantAt { vertex: 1 };
        let lift = DeltaFamily::LiftOfClass { members: vec![0] };
        assert!(all.intersects(&c0, &g));
        assert!(!c0.intersects(&c1, &g));
        assert!(c0.intersects(&lift, &g));
        assert!(!c1.intersects(&lift, &g));
        let sig = SymbolicSignal::constant(0, 1.0);
        assert!(c0.contains_signal(&sig));
        assert!(!c1.contains_signal(&sig));
        assert!(lift.contains_signal(&sig));
    }

    #[test]
    fn constant_family_requires_self_loop() {
        let g = DirectedGraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        let c0 = DeltaFamily::ConstantAt { vertex: 0 };
        assert!(c0.validate(&g).is_err());
        let lift = DeltaFamily::LiftOfClass { members: vec![0, 1] };
        assert!(lift.validate(&g).is_ok());
        let single = DeltaFamily::LiftOfClass { members: vec![0] };
        assert!(single.validate(&g).is_err());
    }

    #[test]
    fn forward_limit_family_of_constant_ends_signal() {
        let sig = SymbolicSignal::new(vec![0, 1], 1.0, 0.0, 0, Extension::ConstantEnds).unwrap();
        let c0 = DeltaFamily::ConstantAt { vertex: 0 };
        let c1 = DeltaFamily::ConstantAt { vertex: 1 };
        assert!(!c0.contains_forward_limit(&sig));
        assert!(c1.contains_forward_limit(&sig));
        assert!(c0.contains_backward_limit(&sig));
        assert!(!c1.contains_backward_limit(&sig));
    }

    fn single_vertex_system(coeffs: Vec<f64>) -> HybridSystem {
        let g = DirectedGraph::new(1, vec![(0, 0)]).unwrap();
        let f = VectorFieldSpec::new("f", FieldShape::Polynomial { coeffs });
        HybridSystem::new(g, vec![f], StateSpace::Interval { lo: -1.0, hi: 1.0 }, 1.0).unwrap()
    }

    #[test]
    fn single_field_decomposition_passes() {
        // dx/dt = (1 - x^2)(-1/2 - x): repellers at -1 and 1, attractor -1/2.
        let sys = single_vertex_system(vec![-0.5, -1.0, 0.5, 1.0]);
        let cands = vec![
            MorseCandidate::new(
                "left-end",
                Region::point(-1.0).unwrap(),
                DeltaFamily::AllAdmissible,
            ),
            MorseCandidate::new(
                "attractor",
                Region::point(-0.5).unwrap(),
                DeltaFamily::AllAdmissible,
            ),
            MorseCandidate::new(
                "right-end",
                Region::point(1.0).unwrap(),
                DeltaFamily::AllAdmissible,
            ),
        ];
        let plan = SamplingPlan::default_for(1.0);
        let report = verify_morse_decomposition(&sys, &cands, &plan).unwrap();
        for c in &report.conditions {
            assert!(c.passed, "{}: {}", c.condition, c.details);
        }
        assert!(report.passed);
        assert!(report.has_order_edge(0, 1), "edges: {:?}", report.order_edges);
        assert!(report.has_order_edge(2, 1));
        assert!(!report.has_order_edge(1, 0));
    }

    #[test]
    fn missing_attractor_fails_containment() {
        let sys = single_vertex_system(vec![-0.5, -1.0, 0.5, 1.0]);
        let cands = vec![
            MorseCandidate::new(
                "left-end",
                Region::point(-1.0).unwrap(),
                DeltaFamily::AllAdmissible,
            ),
            MorseCandidate::new(
                "right-end",
                Region::point(1.0).unwrap(),
                DeltaFamily::AllAdmissible,
            ),
        ];
        let plan = SamplingPlan::default_for(1.0);
        let report = verify_morse_decomposition(&sys, &cands, &plan).unwrap();
        assert!(!report.passed);
        assert!(!report.condition("omega-containment").unwrap().passed);
    }

    #[test]
    fn overlapping_candidates_fail_disjointness() {
        let sys = single_vertex_system(vec![-0.5, -1.0, 0.5, 1.0]);
        let cands = vec![
            MorseCandidate::new(
                "a",
                Region::interval(-0.6, -0.4).unwrap(),
                DeltaFamily::AllAdmissible,
            ),
            MorseCandidate::new(
                "b",
                Region::interval(-0.5, -0.3).unwrap(),
                DeltaFamily::AllAdmissible,
            ),
        ];
        let plan = SamplingPlan::default_for(1.0);
        let report = verify_morse_decomposition(&sys, &cands, &plan).unwrap();
        assert!(!report.condition("pairwise-disjoint").unwrap().passed);
    }

    #[test]
    fn whole_space_candidate_passes_vacuously() {
        let sys = single_vertex_system(vec![-0.5, -1.0, 0.5, 1.0]);
        let cands = vec![MorseCandidate::new(
            "everything",
            Region::interval(-1.0, 1.0).unwrap(),
            DeltaFamily::AllAdmissible,
        )];
        let plan = SamplingPlan::default_for(1.0);
        let report = verify_morse_decomposition(&sys, &cands, &plan).unwrap();
        assert!(report.passed);
        assert!(report.order_edges.is_empty());
    }

    #[test]
    fn attracting_region_on_contractive_field() {
        // dx/dt = -x: [-0.1, 0.1] attracts from [-1, 1].
        let sys = single_vertex_system(vec![0.0, -1.0]);
        let a = Region::interval(-0.1, 0.1).unwrap();
        let n = Region::interval(-1.0, 1.0).unwrap();
        let plan = SamplingPlan::default_for(1.0);
        let report = attracting_region_check(&sys, &a, &n, &plan).unwrap();
        assert!(report.attracting, "failures: {:?}", report.failures);
        // ln(1.0 / 0.1) time units to contract, rounded up to sampled h.
        assert!(report.entry_time >= 2.0 && report.entry_time <= 4.0);
        let degenerate = attracting_region_check(&sys, &n, &n, &plan).unwrap();
        assert!(degenerate.attracting);
        assert_eq!(degenerate.entry_time, 0.0);
    }

    #[test]
    fn attracting_region_requires_containment() {
        let sys = single_vertex_system(vec![0.0, -1.0]);
        let a = Region::interval(-0.5, 0.5).unwrap();
        let n = Region::interval(-0.1, 0.1).unwrap();
        let plan = SamplingPlan::default_for(1.0);
        assert!(matches!(
            attracting_region_check(&sys, &a, &n, &plan),
            Err(AnalysisError::RegionNotContained)
        ));
    }

    #[test]
    fn order_closure_is_transitive_and_reflexive() {
        let report = MorseReport {
            conditions: vec![],
            order_edges: vec![
                OrderEdge {
                    from: 0,
                    to: 1,
                    witness_x: 0.0,
                    witness_signal: String::new(),
                },
                OrderEdge {
                    from: 1,
                    to: 2,
                    witness_x: 0.0,
                    witness_signal: String::new(),
                },
            ],
            passed: true,
        };
        let closure = report.order_closure(3);
        assert!(closure.contains(&(0, 2)));
        assert!(closure.contains(&(1, 1)));
        assert!(!closure.contains(&(2, 0)));
    }
}
