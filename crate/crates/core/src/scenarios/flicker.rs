//! Two cubic fields on `[-1, 1]` whose forced alternation traps orbits in a
//! gap between the single-field attractors.
//!
//! The left field pulls interior states toward `-1/2`, the right field
//! toward `+1/2`, and the switching graph has no self loops, so every
//! admissible signal alternates fields each dwell. For a long enough dwell,
//! each field drags any state from the other attractor across `0`; the
//! switched orbit then stays strictly between `-1/2` and `+1/2` forever,
//! a limit behavior neither constant field shows on its own.

use rayon::prelude::*;

use crate::error::AnalysisError;
use crate::export::{fmt_sig, svg_trajectories};
use crate::graph::DirectedGraph;
use crate::hybrid::{
    hybrid_flow, trajectory, FieldShape, HybridSystem, ProductPoint, StateSpace, VectorFieldSpec,
};
use crate::limits::{
    omega_limit_estimate, DEFAULT_BURN_DWELLS, DEFAULT_CLUSTER_RADIUS, DEFAULT_HORIZON_DWELLS,
};
use crate::signal::{Extension, SymbolicSignal};

use super::{interior_linspace, linspace, Artifact, Claim, ScenarioReport};

/// Candidate dwell times, tried in order by `find_h_flicker`.
pub const H_LADDER: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Horizon for trapping runs, in dwell units.
const RUN_DWELLS: f64 = 500.0;

/// Cubic `(x^2 - 1)(x + 1/2)`: rest points `-1`, `-1/2`, `+1`, interior
/// states flow toward `-1/2`.
pub fn field_left() -> VectorFieldSpec {
    VectorFieldSpec::new(
        "toward-minus-half",
        FieldShape::Polynomial {
            coeffs: vec![-0.5, -1.0, 0.5, 1.0],
        },
    )
}

/// Mirror cubic `(x^2 - 1)(x - 1/2)`: interior states flow toward `+1/2`.
pub fn field_right() -> VectorFieldSpec {
    VectorFieldSpec::new(
        "toward-plus-half",
        FieldShape::Polynomial {
            coeffs: vec![0.5, -1.0, -0.5, 1.0],
        },
    )
}

/// Two-vertex switching system whose only edges are `0 -> 1` and `1 -> 0`,
/// so admissible signals alternate the two fields every dwell.
pub fn cross_system(h: f64) -> Result<HybridSystem, AnalysisError> {
    let graph = DirectedGraph::new(2, [(0, 1), (1, 0)])?;
    let sys = HybridSystem::new(
        graph,
        vec![field_left(), field_right()],
        StateSpace::Interval { lo: -1.0, hi: 1.0 },
        h,
    )?;
    Ok(sys)
}

/// One-vertex system running a single field forever.
fn single_field_system(field: VectorFieldSpec, h: f64) -> Result<HybridSystem, AnalysisError> {
    let graph = DirectedGraph::new(1, [(0, 0)])?;
    let sys = HybridSystem::new(
        graph,
        vec![field],
        StateSpace::Interval { lo: -1.0, hi: 1.0 },
        h,
    )?;
    Ok(sys)
}

/// Dwell time selected for the alternating example, with the one-dwell
/// crossing measurements that justify it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlickerDwell {
    pub h: f64,
    /// Trapping margin: how far one dwell of the right field falls short of
    /// `+1/2` when started at `0`.
    pub eps: f64,
    /// One dwell of the left field started at `+1/2`.
    pub left_at_half: f64,
    /// One dwell of the right field started at `0`.
    pub right_at_zero: f64,
}

/// Smallest ladder dwell for which one dwell of the left field drags `+1/2`
/// across `0`, together with the measured margins.
pub fn find_h_flicker() -> Result<FlickerDwell, AnalysisError> {
    for &h in &H_LADDER {
        let left = single_field_system(field_left(), h)?;
        let right = single_field_system(field_right(), h)?;
        let const0 = SymbolicSignal::constant(0, h);
        let left_at_half = hybrid_flow(&left, &const0, 0.5, h)?;
        if left_at_half >= 0.0 {
            continue;
        }
        let right_at_zero = hybrid_flow(&right, &const0, 0.0, h)?;
        let eps = 0.5 - right_at_zero;
        if eps > 0.0 {
            return Ok(FlickerDwell {
                h,
                eps,
                left_at_half,
                right_at_zero,
            });
        }
    }
    Err(AnalysisError::Precondition(
        "no ladder dwell drags the opposite attractor across zero".into(),
    ))
}

/// One trapping run: start state, signal offset, and what the orbit did.
struct RunOutcome {
    x0: f64,
    phase: usize,
    tau: f64,
    entry_time: Option<f64>,
    stayed_after_entry: bool,
    /// Minimum of `1/2 - |x|` over the second half of the run.
    tail_margin: f64,
}

fn alternating_signal(phase: usize, tau: f64, h: f64) -> Result<SymbolicSignal, AnalysisError> {
    let word = if phase == 0 { vec![0, 1] } else { vec![1, 0] };
    let sig = SymbolicSignal::new(word, h, tau, 0, Extension::PeriodicWord)?;
    Ok(sig)
}

fn trapping_run(
    sys: &HybridSystem,
    x0: f64,
    phase: usize,
    tau: f64,
) -> Result<RunOutcome, AnalysisError> {
    let h = sys.h();
    let sig = alternating_signal(phase, tau, h)?;
    let horizon = RUN_DWELLS * h;
    let samples = trajectory(sys, &sig, x0, 0.0, horizon + 0.5 * h, h / 4.0)?;
    let samples: Vec<_> = samples.into_iter().filter(|s| s.t <= horizon).collect();

    let entry = samples.iter().position(|s| s.x.abs() < 0.5);
    let entry_time = entry.map(|i| samples[i].t);
    let stayed_after_entry = match entry {
        Some(i) => samples[i..].iter().all(|s| s.x.abs() < 0.5),
        None => false,
    };
    let tail_margin = samples
        .iter()
        .filter(|s| s.t >= 0.5 * horizon)
        .map(|s| 0.5 - s.x.abs())
        .fold(f64::INFINITY, f64::min);
    Ok(RunOutcome {
        x0,
        phase,
        tau,
        entry_time,
        stayed_after_entry,
        tail_margin,
    })
}

/// Union of forward limit estimates of one single-field system over a closed
/// grid of start states, as cluster representatives.
fn single_field_limit_union(
    field: VectorFieldSpec,
    h: f64,
    grid: &[f64],
) -> Result<Vec<f64>, AnalysisError> {
    let sys = single_field_system(field, h)?;
    let burn = DEFAULT_BURN_DWELLS * h;
    let horizon = DEFAULT_HORIZON_DWELLS * h;
    let estimates: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&x0| {
            let p = ProductPoint {
                x: x0,
                signal: SymbolicSignal::constant(0, h),
            };
            omega_limit_estimate(&sys, &p, burn, horizon, DEFAULT_CLUSTER_RADIUS)
                .map(|est| est.points)
        })
        .collect::<Result<_, _>>()?;
    let all: Vec<f64> = estimates.into_iter().flatten().collect();
    Ok(crate::limits::cluster_representatives(
        &all,
        DEFAULT_CLUSTER_RADIUS,
        sys.space(),
    ))
}

fn hausdorff_to(points: &[f64], targets: &[f64]) -> f64 {
    let one_way = |from: &[f64], to: &[f64]| {
        from.iter()
            .map(|&p| {
                to.iter()
                    .map(|&q| (p - q).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max)
    };
    one_way(points, targets).max(one_way(targets, points))
}

/// Run the forced-alternation example end to end.
pub fn example_flicker() -> Result<(ScenarioReport, Vec<Artifact>), AnalysisError> {
    let mut report = ScenarioReport::new("flicker");
    let dwell = find_h_flicker()?;
    let h = dwell.h;
    let sys = cross_system(h)?;

    report.set_parameter("h", h);
    report.set_parameter("eps", dwell.eps);
    report.set_parameter("left_at_half", dwell.left_at_half);
    report.set_parameter("right_at_zero", dwell.right_at_zero);
    report.set_parameter("run_dwells", RUN_DWELLS);
    report.set_parameter("n_start_states", 41.0);
    report.set_parameter("n_signal_offsets", 8.0);

    report.push_claim(Claim::new(
        "dwell-selection",
        dwell.left_at_half < 0.0 && dwell.eps > 0.0,
        Some(dwell.eps),
        format!(
            "h = {}: one left dwell maps +1/2 to {}, one right dwell maps 0 to {}",
            fmt_sig(h),
            fmt_sig(dwell.left_at_half),
            fmt_sig(dwell.right_at_zero)
        ),
    ));

    let x0s = interior_linspace(-1.0, 1.0, 41);
    let taus = [0.0, h / 4.0, h / 2.0, 3.0 * h / 4.0];
    let mut runs: Vec<(f64, usize, f64)> = Vec::new();
    for &x0 in &x0s {
        for phase in 0..2 {
            for &tau in &taus {
                runs.push((x0, phase, tau));
            }
        }
    }
    let outcomes: Vec<RunOutcome> = runs
        .par_iter()
        .map(|&(x0, phase, tau)| trapping_run(&sys, x0, phase, tau))
        .collect::<Result<_, _>>()?;

    let all_entered = outcomes.iter().all(|o| o.entry_time.is_some());
    let worst_entry = outcomes
        .iter()
        .filter_map(|o| o.entry_time)
        .fold(0.0_f64, f64::max);
    report.push_claim(Claim::new(
        "orbits-enter-the-gap",
        all_entered,
        None,
        format!(
            "{} of {} runs reached |x| < 1/2; latest entry at t = {}",
            outcomes.iter().filter(|o| o.entry_time.is_some()).count(),
            outcomes.len(),
            fmt_sig(worst_entry)
        ),
    ));

    let all_stayed = outcomes.iter().all(|o| o.stayed_after_entry);
    report.push_claim(Claim::new(
        "orbits-never-leave-the-gap",
        all_stayed,
        None,
        format!(
            "{} of {} runs stayed strictly inside the gap after entry",
            outcomes.iter().filter(|o| o.stayed_after_entry).count(),
            outcomes.len()
        ),
    ));

    let min_tail = outcomes
        .iter()
        .map(|o| o.tail_margin)
        .fold(f64::INFINITY, f64::min);
    report.push_claim(Claim::new(
        "tail-clears-the-gap-walls",
        min_tail > 0.0,
        Some(min_tail),
        format!(
            "second-half distance to the walls never fell below {}; one-dwell crossing margin eps = {}",
            fmt_sig(min_tail),
            fmt_sig(dwell.eps)
        ),
    ));

    let omega_grid = interior_linspace(-1.0, 1.0, 9);
    let burn = DEFAULT_BURN_DWELLS * h;
    let lim_horizon = DEFAULT_HORIZON_DWELLS * h;
    let omega_points: Vec<Vec<f64>> = omega_grid
        .par_iter()
        .flat_map(|&x0| (0..2usize).into_par_iter().map(move |phase| (x0, phase)))
        .map(|(x0, phase)| {
            let p = ProductPoint {
                x: x0,
                signal: alternating_signal(phase, 0.0, h)?,
            };
            let est = omega_limit_estimate(&sys, &p, burn, lim_horizon, DEFAULT_CLUSTER_RADIUS)?;
            Ok(est.points)
        })
        .collect::<Result<_, AnalysisError>>()?;
    let omega_margin = omega_points
        .iter()
        .flatten()
        .map(|&p| 0.5 - p.abs())
        .fold(f64::INFINITY, f64::min);
    report.push_claim(Claim::new(
        "switched-limits-sit-inside-the-gap",
        omega_margin > 0.0,
        Some(omega_margin),
        format!(
            "forward limit estimates from {} interior starts and both phases keep distance {} from the walls",
            omega_grid.len(),
            fmt_sig(omega_margin)
        ),
    ));

    let closed_grid = linspace(-1.0, 1.0, 41);
    let left_union = single_field_limit_union(field_left(), h, &closed_grid)?;
    let left_targets = [-1.0, -0.5, 1.0];
    let left_gap = hausdorff_to(&left_union, &left_targets);
    report.push_claim(Claim::new(
        "left-field-rest-points",
        left_gap <= 1e-3,
        Some(left_gap),
        format!(
            "constant left field limit union {:?} matches [-1, -1/2, 1] within {}",
            left_union.iter().map(|&p| fmt_sig(p)).collect::<Vec<_>>(),
            fmt_sig(left_gap)
        ),
    ));

    let right_union = single_field_limit_union(field_right(), h, &closed_grid)?;
    let right_targets = [-1.0, 0.5, 1.0];
    let right_gap = hausdorff_to(&right_union, &right_targets);
    report.push_claim(Claim::new(
        "right-field-rest-points",
        right_gap <= 1e-3,
        Some(right_gap),
        format!(
            "constant right field limit union {:?} matches [-1, 1/2, 1] within {}",
            right_union.iter().map(|&p| fmt_sig(p)).collect::<Vec<_>>(),
            fmt_sig(right_gap)
        ),
    ));

    let boundary_sig = alternating_signal(0, 0.0, h)?;
    let boundary = trajectory(&sys, &boundary_sig, -1.0, 0.0, RUN_DWELLS * h + 0.5 * h, h / 4.0)?;
    let boundary_fixed = boundary.iter().all(|s| s.x == -1.0);
    report.push_claim(Claim::new(
        "boundary-point-stays-fixed",
        boundary_fixed,
        None,
        format!(
            "orbit started exactly at -1 reproduced -1 at all {} samples",
            boundary.len()
        ),
    ));

    let mut summary = String::from("x0,phase,tau,entry_time,tail_margin\n");
    for o in &outcomes {
        let entry = o
            .entry_time
            .map(|t| fmt_sig(t))
            .unwrap_or_else(|| "never".into());
        summary.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig(o.x0),
            o.phase,
            fmt_sig(o.tau),
            entry,
            fmt_sig(o.tail_margin)
        ));
    }

    let rep_indices = [3usize, 20, 37];
    let mut series = Vec::new();
    let mut traj_csv = String::from("run,t,x,vertex\n");
    for &i in &rep_indices {
        let x0 = x0s[i];
        let sig = alternating_signal(0, 0.0, h)?;
        let samples = trajectory(&sys, &sig, x0, 0.0, 60.0 * h + 0.5 * h, h / 8.0)?;
        for s in &samples {
            traj_csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig(x0),
                fmt_sig(s.t),
                fmt_sig(s.x),
                s.vertex
            ));
        }
        series.push((format!("x0 = {}", fmt_sig(x0)), samples));
    }
    let svg = svg_trajectories(
        "forced alternation traps orbits between the single-field attractors",
        &series,
        &[-0.5, 0.5],
    );

    let artifacts = vec![
        Artifact::new("flicker_summary.csv", summary),
        Artifact::new("flicker_trajectories.csv", traj_csv),
        Artifact::new("flicker.svg", svg),
    ];
    report.artifacts = artifacts.iter().map(|a| a.name.clone()).collect();
    Ok((report, artifacts))
}
