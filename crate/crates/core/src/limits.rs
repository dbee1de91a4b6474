//! Numerical forward and backward limit set estimation.
//!
//! The limit set of a product point is approximated by integrating its
//! trajectory over `[0, horizon]` (or `[-horizon, 0]`), discarding samples
//! before `burn`, and clustering the remaining state samples. The cluster
//! rule is greedy over sorted values: a sample joins the current cluster
//! while its distance to the running cluster mean is at most the cluster
//! radius. Representatives (cluster means) therefore end up pairwise more
//! than one radius apart. On the circle the first and last clusters are
//! merged across the wrap seam when required.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::hybrid::{trajectory, HybridSystem, ProductPoint, StateSpace};

/// Default burn-in, in dwell units, before samples count toward a limit set.
pub const DEFAULT_BURN_DWELLS: f64 = 200.0;
/// Default trajectory horizon in dwell units.
pub const DEFAULT_HORIZON_DWELLS: f64 = 400.0;
/// Default cluster radius for limit set representatives.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-3;

/// Clustered estimate of a forward or backward limit set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSetEstimate {
    /// Cluster representatives, ascending, pairwise more than
    /// `cluster_radius` apart.
    pub points: Vec<f64>,
    pub cluster_radius: f64,
    pub burn_time: f64,
    pub horizon: f64,
    /// Number of trajectory samples that were clustered.
    pub n_samples: usize,
}

impl LimitSetEstimate {
    /// Smallest distance from `x` to a representative, `None` when empty.
    pub fn min_distance_to(&self, x: f64, space: StateSpace) -> Option<f64> {
        self.points
            .iter()
            .map(|&p| space.state_distance(p, x))
            .min_by(|a, b| a.partial_cmp(b).expect("distances are finite"))
    }

    /// True when every representative is within `tol` of the closed interval
    /// `[lo, hi]`.
    pub fn within_interval(&self, lo: f64, hi: f64, tol: f64) -> bool {
        self.points
            .iter()
            .all(|&p| p >= lo - tol && p <= hi + tol)
    }
}

/// Forward limit set estimate for the product point `p`.
pub fn omega_limit_estimate(
    sys: &HybridSystem,
    p: &ProductPoint,
    burn: f64,
    horizon: f64,
    cluster_radius: f64,
) -> Result<LimitSetEstimate, AnalysisError> {
    limit_estimate(sys, p, burn, horizon, cluster_radius, false)
}

/// Backward limit set estimate for the product point `p`.
pub fn alpha_limit_estimate(
    sys: &HybridSystem,
    p: &ProductPoint,
    burn: f64,
    horizon: f64,
    cluster_radius: f64,
) -> Result<LimitSetEstimate, AnalysisError> {
    limit_estimate(sys, p, burn, horizon, cluster_radius, true)
}

fn limit_estimate(
    sys: &HybridSystem,
    p: &ProductPoint,
    burn: f64,
    horizon: f64,
    cluster_radius: f64,
    backward: bool,
) -> Result<LimitSetEstimate, AnalysisError> {
    if !(burn.is_finite() && horizon.is_finite() && 0.0 <= burn && burn < horizon) {
        return Err(AnalysisError::BadWindow { burn, horizon });
    }
    if !(cluster_radius.is_finite() && cluster_radius > 0.0) {
        return Err(AnalysisError::BadClusterRadius(cluster_radius));
    }
    let sample_dt = sys.h() / 4.0;
    let t_end = if backward { -horizon } else { horizon };
    let samples = trajectory(sys, &p.signal, p.x, 0.0, t_end, sample_dt)?;
    if let Some(bad) = samples.iter().find(|s| !s.x.is_finite()) {
        return Err(AnalysisError::DivergedTrajectory { t: bad.t });
    }
    let kept: Vec<f64> = samples
        .iter()
        .filter(|s| s.t.abs() >= burn)
        .map(|s| s.x)
        .collect();
    let points = cluster_representatives(&kept, cluster_radius, sys.space());
    Ok(LimitSetEstimate {
        points,
        cluster_radius,
        burn_time: burn,
        horizon,
        n_samples: kept.len(),
    })
}

/// Cluster accumulator: sum and count for the mean, plus the value range so
/// a cluster of identical samples reports that exact value.
#[derive(Clone, Copy)]
struct Cluster {
    sum: f64,
    count: usize,
    lo: f64,
    hi: f64,
}

impl Cluster {
    fn seed(v: f64) -> Self {
        Cluster {
            sum: v,
            count: 1,
            lo: v,
            hi: v,
        }
    }

    fn push(&mut self, v: f64) {
        self.sum += v;
        self.count += 1;
        self.lo = self.lo.min(v);
        self.hi = self.hi.max(v);
    }

    fn absorb(&mut self, other: Cluster) {
        self.sum += other.sum;
        self.count += other.count;
        self.lo = self.lo.min(other.lo);
        self.hi = self.hi.max(other.hi);
    }

    fn mean(&self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            self.sum / self.count as f64
        }
    }

    fn shifted_down_one_turn(self) -> Cluster {
        let tau = std::f64::consts::TAU;
        Cluster {
            sum: self.sum - tau * self.count as f64,
            count: self.count,
            lo: self.lo - tau,
            hi: self.hi - tau,
        }
    }
}

/// Greedy mean-linkage clustering of state samples. Representatives are
/// cluster means, returned ascending; any two representatives are more than
/// `r` apart (in the circle metric for circle spaces).
pub(crate) fn cluster_representatives(values: &[f64], r: f64, space: StateSpace) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = values.iter().map(|&v| space.canonicalize(v)).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite states"));

    let mut groups: Vec<Cluster> = Vec::new();
    let mut cur = Cluster::seed(sorted[0]);
    for &v in &sorted[1..] {
        if v - cur.mean() > r {
            groups.push(cur);
            cur = Cluster::seed(v);
        } else {
            cur.push(v);
        }
    }
    groups.push(cur);

    let circle = matches!(space, StateSpace::Circle);
    if circle && groups.len() >= 2 {
        merge_across_seam(&mut groups, r);
    }

    // Safety pass: merging by running mean almost always suffices, but make
    // the separation invariant unconditional.
    loop {
        let reps: Vec<f64> = groups.iter().map(Cluster::mean).collect();
        let mut merged = false;
        for i in 0..reps.len().saturating_sub(1) {
            if (reps[i + 1] - reps[i]).abs() <= r {
                let second = groups.remove(i + 1);
                groups[i].absorb(second);
                merged = true;
                break;
            }
        }
        if !merged && circle && groups.len() >= 2 {
            let first = groups[0].mean();
            let last = groups[groups.len() - 1].mean();
            if space.state_distance(first, last) <= r {
                merge_across_seam(&mut groups, f64::INFINITY);
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }

    let mut reps: Vec<f64> = groups
        .iter()
        .map(|c| space.canonicalize(c.mean()))
        .collect();
    reps.sort_by(|a, b| a.partial_cmp(b).expect("finite states"));
    reps
}

/// Merges the last cluster into the first across the circle seam when their
/// circular gap is at most `r`, shifting the last cluster down by one turn so
/// the mean is computed on a contiguous arc.
fn merge_across_seam(groups: &mut Vec<Cluster>, r: f64) {
    let last_idx = groups.len() - 1;
    let first_mean = groups[0].mean();
    let last_mean = groups[last_idx].mean();
    if (first_mean + std::f64::consts::TAU) - last_mean <= r {
        let last = groups.remove(last_idx).shifted_down_one_turn();
        groups[0].absorb(last);
    }
}
