//! Piecewise-constant switching signals and the weighted disagreement metric.
//!
//! A signal takes vertex values on half-open dwell intervals
//! `[tau + k*h, tau + (k+1)*h)` of a fixed length `h`, with offset
//! `tau in [0, h)`. A finite `word` plus an extension rule determines the
//! value on every interval: `PeriodicWord` repeats the word in both
//! directions, `ConstantEnds` freezes the first and last entries. `anchor`
//! is the word index (any integer; mapped through the extension) whose dwell
//! interval contains time 0.
//!
//! The metric between two signals with a common dwell length is
//!
//! ```text
//! d(x, y) = sum over i of 4^-|i| * f(x, y, i),
//! f(x, y, i) = (1/h) * measure{ t in [i*h, (i+1)*h) : x(t) != y(t) },
//! ```
//!
//! truncated to `|i| <= N`. Each `f` term is computed exactly from the
//! breakpoint structure (both signals are constant between breakpoints, and a
//! unit interval contains at most one breakpoint of each), so no quadrature
//! is involved. The full sum is bounded by 5/3 and the truncation error by
//! `(8/3) * 4^-N`.

use serde::{Deserialize, Serialize};

use crate::error::SignalError;
use crate::graph::{shortest_path_with_edge, CommClass, DirectedGraph};

/// Default truncation window for the metric; tail bound is below 1e-11.
pub const DEFAULT_METRIC_WINDOW: usize = 20;

/// How a finite word extends to a bi-infinite dwell sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extension {
    /// Repeat the word periodically in both directions.
    #[serde(rename = "periodic")]
    PeriodicWord,
    /// Freeze the first entry for all earlier intervals and the last entry
    /// for all later ones.
    #[serde(rename = "constant-ends")]
    ConstantEnds,
}

/// A switching signal: finite word, dwell length, offset, anchor, extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicSignal {
    word: Vec<usize>,
    h: f64,
    tau: f64,
    anchor: i64,
    extension: Extension,
}

/// Truncated metric value together with its truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub truncation_error_bound: f64,
}

impl SymbolicSignal {
    /// Builds a signal without admissibility checks against any graph.
    pub fn new(
        word: Vec<usize>,
        h: f64,
        tau: f64,
        anchor: i64,
        extension: Extension,
    ) -> Result<Self, SignalError> {
        if word.is_empty() {
            return Err(SignalError::EmptyWord);
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(SignalError::BadDwell(h));
        }
        if !(tau.is_finite() && (0.0..h).contains(&tau)) {
            return Err(SignalError::TauOutOfRange { tau, h });
        }
        let mut sig = Self {
            word,
            h,
            tau,
            anchor,
            extension,
        };
        sig.normalize_anchor();
        Ok(sig)
    }

    /// Builds a signal and verifies admissibility for `g`.
    pub fn admissible(
        g: &DirectedGraph,
        word: Vec<usize>,
        h: f64,
        tau: f64,
        anchor: i64,
        extension: Extension,
    ) -> Result<Self, SignalError> {
        let sig = Self::new(word, h, tau, anchor, extension)?;
        sig.check_admissible(g)?;
        Ok(sig)
    }

    /// The signal constantly equal to `vertex` (admissible only where the
    /// vertex has a self-loop).
    pub fn constant(vertex: usize, h: f64) -> Self {
        Self::new(vec![vertex], h, 0.0, 0, Extension::PeriodicWord)
            .expect("constant signal is well formed")
    }

    /// Checks that every dwell step of the extended sequence follows an edge
    /// of `g`: consecutive word entries, the periodic wrap, or the implicit
    /// self-loops at frozen ends.
    pub fn check_admissible(&self, g: &DirectedGraph) -> Result<(), SignalError> {
        for &v in &self.word {
            if v >= g.n_vertices() {
                return Err(SignalError::VertexOutOfRange(v, g.n_vertices()));
            }
        }
        for pair in self.word.windows(2) {
            if !g.has_edge(pair[0], pair[1]) {
                return Err(SignalError::InadmissibleStep(pair[0], pair[1]));
            }
        }
        let first = self.word[0];
        let last = *self.word.last().expect("nonempty word");
        match self.extension {
            Extension::PeriodicWord => {
                if !g.has_edge(last, first) {
                    return Err(SignalError::InadmissibleWrap(last, first));
                }
            }
            Extension::ConstantEnds => {
                if !g.has_edge(first, first) {
                    return Err(SignalError::MissingSelfLoop(first));
                }
                if !g.has_edge(last, last) {
                    return Err(SignalError::MissingSelfLoop(last));
                }
            }
        }
        Ok(())
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn anchor(&self) -> i64 {
        self.anchor
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    /// Keeps periodic anchors inside `0..word.len()`; pointwise a no-op.
    fn normalize_anchor(&mut self) {
        if self.extension == Extension::PeriodicWord {
            let n = self.word.len() as i64;
            self.anchor = self.anchor.rem_euclid(n);
        }
    }

    /// Index of the dwell interval `[tau + k*h, tau + (k+1)*h)` containing `t`.
    fn grid_index(&self, t: f64) -> i64 {
        ((t - self.tau) / self.h).floor() as i64
    }

    /// Grid index of the interval containing time 0.
    fn base_grid_index(&self) -> i64 {
        if self.tau == 0.0 {
            0
        } else {
            -1
        }
    }

    /// Raw (unextended) word index covering time `t`.
    fn raw_index_at(&self, t: f64) -> i64 {
        self.anchor + (self.grid_index(t) - self.base_grid_index())
    }

    /// Value of the extended dwell sequence at raw word index `i`.
    pub fn symbol_at_raw(&self, i: i64) -> usize {
        let n = self.word.len() as i64;
        let j = match self.extension {
            Extension::PeriodicWord => i.rem_euclid(n),
            Extension::ConstantEnds => i.clamp(0, n - 1),
        };
        self.word[j as usize]
    }

    /// Vertex active at time `t`.
    pub fn evaluate(&self, t: f64) -> usize {
        self.symbol_at_raw(self.raw_index_at(t))
    }

    /// Time shift: `shift(x, t)(s) = x(s + t)` pointwise.
    pub fn shift(&self, t: f64) -> SymbolicSignal {
        if t == 0.0 {
            return self.clone();
        }
        let raw = self.tau - t;
        let mut q = (raw / self.h).floor();
        let mut tau = raw - q * self.h;
        while tau < 0.0 {
            tau += self.h;
            q -= 1.0;
        }
        while tau >= self.h {
            tau -= self.h;
            q += 1.0;
        }
        let q = q as i64;
        let base_new = if tau == 0.0 { 0 } else { -1 };
        let mut out = Self {
            word: self.word.clone(),
            h: self.h,
            tau,
            anchor: self.anchor + base_new - self.base_grid_index() - q,
            extension: self.extension,
        };
        out.normalize_anchor();
        out
    }

    /// Shift by exactly `k` whole dwell intervals. Unlike `shift(k * h)` this
    /// involves no floating-point offset arithmetic and is exact.
    pub fn shift_by_dwell(&self, k: i64) -> SymbolicSignal {
        let mut out = self.clone();
        out.anchor += k;
        out.normalize_anchor();
        out
    }

    /// True when every value the signal ever takes lies in the class.
    pub fn lies_in_class(&self, class: &CommClass) -> bool {
        self.word.iter().all(|&v| class.contains(v))
    }

    /// Start time of the dwell interval with grid index `k`.
    pub(crate) fn breakpoint(&self, k: i64) -> f64 {
        self.tau + k as f64 * self.h
    }

    /// Grid index and vertex for each dwell interval intersecting `[a, b)`,
    /// exposed for integrators that walk the dwell structure.
    pub(crate) fn vertex_at_grid(&self, k: i64) -> usize {
        self.symbol_at_raw(self.anchor + (k - self.base_grid_index()))
    }

    pub(crate) fn grid_index_of(&self, t: f64) -> i64 {
        self.grid_index(t)
    }
}

/// Membership in the lift of a class: the signal is admissible for `g` and
/// confined to `class`.
pub fn lift_membership(
    g: &DirectedGraph,
    sig: &SymbolicSignal,
    class: &CommClass,
) -> Result<bool, SignalError> {
    sig.check_admissible(g)?;
    Ok(sig.lies_in_class(class))
}

/// Exact truncated metric between two signals with a common dwell length.
pub fn distance(
    x: &SymbolicSignal,
    y: &SymbolicSignal,
    window: usize,
) -> Result<MetricResult, SignalError> {
    if x.h != y.h {
        return Err(SignalError::MismatchedDwell(x.h, y.h));
    }
    if window == 0 {
        return Err(SignalError::WindowTooSmall);
    }
    let h = x.h;
    let n = window as i64;
    let mut value = 0.0;
    for i in -n..=n {
        let base = i as f64 * h;
        // Breakpoints strictly inside [base, base + h): one per signal when
        // its offset is nonzero.
        let mut cuts = [0.0f64; 2];
        let mut n_cuts = 0;
        for tau in [x.tau, y.tau] {
            if tau > 0.0 && !cuts[..n_cuts].contains(&tau) {
                cuts[n_cuts] = tau;
                n_cuts += 1;
            }
        }
        cuts[..n_cuts].sort_by(|a, b| a.partial_cmp(b).expect("finite offsets"));
        let mut disagree = 0.0;
        let mut lo = 0.0;
        for cut in cuts[..n_cuts].iter().copied().chain(std::iter::once(h)) {
            if cut > lo {
                let mid = base + 0.5 * (lo + cut);
                if x.evaluate(mid) != y.evaluate(mid) {
                    disagree += cut - lo;
                }
                lo = cut;
            }
        }
        value += (disagree / h) * 0.25f64.powi(i.unsigned_abs() as i32);
    }
    Ok(MetricResult {
        value,
        truncation_error_bound: truncation_error_bound(window),
    })
}

/// Tail bound `(8/3) * 4^-N` for the truncated metric.
pub fn truncation_error_bound(window: usize) -> f64 {
    (8.0 / 3.0) * 0.25f64.powi(window as i32)
}

/// Upper bound 5/3 for the full metric (attained by signals disagreeing
/// everywhere).
pub fn metric_diameter() -> f64 {
    5.0 / 3.0
}

/// A periodic admissible signal over `class` whose word contains every
/// admissible word over the class of length at most `max_len` as a
/// contiguous subword (allowing periodic wrap-around).
pub fn transitive_witness(
    g: &DirectedGraph,
    class: &CommClass,
    max_len: usize,
    h: f64,
) -> Result<SymbolicSignal, SignalError> {
    if class.members.is_empty() {
        return Err(SignalError::EmptyClass);
    }
    if max_len == 0 {
        return Err(SignalError::EmptyWord);
    }
    let targets = admissible_words_over(g, &class.members, max_len);
    // Longest first so shorter words are usually already present.
    let mut ordered = targets;
    ordered.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let mut word: Vec<usize> = vec![ordered[0][0]];
    for target in &ordered {
        // Plain containment only: the word is still growing, so wraparound
        // matches would not survive in the finished cycle.
        if word.windows(target.len()).any(|w| w == &target[..]) {
            continue;
        }
        let last = *word.last().expect("nonempty");
        if last != target[0] {
            let path = shortest_path_with_edge(g, last, target[0], &class.members)
                .ok_or_else(|| SignalError::ClassNotConnected(vec![last, target[0]]))?;
            word.extend_from_slice(&path[1..]);
        }
        word.extend_from_slice(&target[1..]);
    }
    let last = *word.last().expect("nonempty");
    let first = word[0];
    if !g.has_edge(last, first) {
        let path = shortest_path_with_edge(g, last, first, &class.members)
            .ok_or_else(|| SignalError::ClassNotConnected(vec![last, first]))?;
        word.extend_from_slice(&path[1..path.len() - 1]);
    }
    // Canonical form: the same periodic signal with the shortest word.
    let n = word.len();
    for p in 1..n {
        if n % p == 0 && (p..n).all(|i| word[i] == word[i % p]) {
            word.truncate(p);
            break;
        }
    }
    SymbolicSignal::admissible(g, word, h, 0.0, 0, Extension::PeriodicWord)
}

/// All admissible walks over `members` with 1..=max_len vertices, ordered by
/// length then lexicographically.
pub(crate) fn admissible_words_over(
    g: &DirectedGraph,
    members: &[usize],
    max_len: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = members.iter().map(|&v| vec![v]).collect();
    // Depth-first over prefixes; resort at the end for by-length order.
    while let Some(prefix) = stack.pop() {
        if prefix.len() < max_len {
            let last = *prefix.last().expect("nonempty");
            for w in g.successors(last).into_iter().rev() {
                if members.binary_search(&w).is_ok() {
                    let mut next = prefix.clone();
                    next.push(w);
                    stack.push(next);
                }
            }
        }
        out.push(prefix);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Deterministic catalog of admissible signals over `members`: every
/// admissible word of 1..=`max_len` vertices, under both extension rules
/// where valid (periodic needs the wrap edge, constant-ends needs self-loops
/// at both ends). All signals have `tau = 0`, anchor 0. For one-symbol words
/// the two extensions coincide pointwise, so only the periodic form is kept.
pub fn signal_catalog(
    g: &DirectedGraph,
    members: &[usize],
    max_len: usize,
    h: f64,
) -> Vec<SymbolicSignal> {
    let mut out = Vec::new();
    for word in admissible_words_over(g, members, max_len) {
        let first = word[0];
        let last = *word.last().expect("nonempty");
        if g.has_edge(last, first) {
            out.push(
                SymbolicSignal::new(word.clone(), h, 0.0, 0, Extension::PeriodicWord)
                    .expect("catalog word is well formed"),
            );
        }
        if word.len() > 1 && g.has_edge(first, first) && g.has_edge(last, last) {
            out.push(
                SymbolicSignal::new(word, h, 0.0, 0, Extension::ConstantEnds)
                    .expect("catalog word is well formed"),
            );
        }
    }
    out
}

/// Does `needle` occur in the periodic repetition of `word`?
pub fn contains_subword_periodic(word: &[usize], needle: &[usize]) -> bool {
    if needle.is_empty() {
        return true;
    }
    let reps = needle.len() / word.len() + 2;
    let text: Vec<usize> = word.iter().copied().cycle().take(word.len() * reps).collect();
    text.windows(needle.len()).any(|w| w == needle)
}

/// Output of the sensitive-dependence construction: a partner signal that
/// agrees with the input on a window wide enough to sit `eps`-close, yet
/// disagrees on one full dwell interval `divergence_step` intervals later,
/// forcing distance >= 1 after that shift.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivePair {
    pub partner: SymbolicSignal,
    /// Number of whole dwell intervals until the disagreeing interval.
    pub divergence_step: i64,
    /// Real divergence time: `divergence_step * h + tau`.
    pub divergence_time: f64,
}

/// Builds a partner signal within `eps` of `x` that separates to distance at
/// least 1 after `divergence_step` dwell shifts. Requires the whole graph to
/// form a single communicating class with a branching vertex (out-degree 2
/// or more), and `x` admissible.
pub fn sensitive_pair(
    g: &DirectedGraph,
    x: &SymbolicSignal,
    eps: f64,
) -> Result<SensitivePair, SignalError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(SignalError::BadThreshold(eps));
    }
    x.check_admissible(g)?;
    let classes = crate::graph::communicating_classes(g).map_err(|_| SignalError::NotSingleClass)?;
    let all: Vec<usize> = (0..g.n_vertices()).collect();
    if classes.len() != 1 || classes[0].members != all {
        return Err(SignalError::NotSingleClass);
    }
    let branch = (0..g.n_vertices())
        .find(|&v| g.out_degree(v) >= 2)
        .ok_or(SignalError::NoBranchVertex)?;

    // Smallest window with both-sided tail below eps.
    let mut window = 1usize;
    while truncation_error_bound(window) >= eps {
        window += 1;
    }
    let agree_radius = window as i64 + 1;
    let first_free = agree_radius + 1;

    // Symbol of x on the dwell interval `j` steps after the one containing
    // time 0.
    let x_at = |j: i64| x.symbol_at_raw(x.anchor() + j);

    // Copy x on dwell offsets [-agree_radius, first_free - 1].
    let mut symbols: Vec<usize> = (-agree_radius..first_free).map(x_at).collect();

    // Earliest offset >= first_free where x visits the branching vertex; the
    // search span covers a full period / the frozen tail of x.
    let search_span = x.word().len() as i64 + 2;
    let visit = (first_free..first_free + search_span).find(|&j| x_at(j) == branch);

    let divergence_step;
    match visit {
        Some(t1) => {
            // Follow x up to the visit, then take a different outgoing edge.
            symbols.extend((first_free..=t1).map(x_at));
            let gamma2 = x_at(t1 + 1);
            let gamma3 = g
                .successors(branch)
                .into_iter()
                .find(|&w| w != gamma2)
                .ok_or(SignalError::NoBranchVertex)?;
            symbols.push(gamma3);
            divergence_step = t1 + 1;
        }
        None => {
            // x avoids the branching vertex from first_free on; steer toward
            // it, diverging on the dwell interval where it is reached.
            symbols.push(x_at(first_free));
            let start = x_at(first_free);
            let path = shortest_path_with_edge(g, start, branch, &all)
                .ok_or(SignalError::NotSingleClass)?;
            symbols.extend_from_slice(&path[1..]);
            divergence_step = first_free + (path.len() as i64 - 1);
        }
    }

    // Close the loop back to the leading symbol so the word is periodic.
    let last = *symbols.last().expect("nonempty");
    let first = symbols[0];
    if !g.has_edge(last, first) {
        let path =
            shortest_path_with_edge(g, last, first, &all).ok_or(SignalError::NotSingleClass)?;
        symbols.extend_from_slice(&path[1..path.len() - 1]);
    }

    let partner = SymbolicSignal::admissible(
        g,
        symbols,
        x.h(),
        x.tau(),
        agree_radius,
        Extension::PeriodicWord,
    )?;
    Ok(SensitivePair {
        partner,
        divergence_step,
        divergence_time: divergence_step as f64 * x.h() + x.tau(),
    })
}
