//! Quartic fields on `[-1, 1]` that are nonnegative inside the interval and
//! stall at a double zero, giving a four-piece Morse decomposition whose
//! middle pieces exist only for one constant signal each.
//!
//! Field 0 is `(1 - x^2)(x + 1/2)^2`, field 1 is `(1 - x^2)(x - 1/2)^2`:
//! both push interior states rightward, field 0 stalls at `-1/2`, field 1 at
//! `+1/2`. Over the complete switching graph the four candidate pieces are
//! the two boundary points paired with all signals and the two stall points
//! paired with the single constant signal that keeps them stationary. The
//! example verifies the seven decomposition conditions, exhibits a witness
//! orbit for every expected connecting pair, and shows the verdict flips
//! when one stall piece is dropped.

use crate::error::AnalysisError;
use crate::export::{fmt_sig, svg_trajectories};
use crate::graph::DirectedGraph;
use crate::hybrid::{
    hybrid_flow, trajectory, FieldShape, HybridSystem, ProductPoint, StateSpace, VectorFieldSpec,
};
use crate::limits::{alpha_limit_estimate, omega_limit_estimate};
use crate::morse::{
    verify_morse_decomposition, DeltaFamily, MorseCandidate, Region, SamplingPlan,
};
use crate::signal::{Extension, SymbolicSignal};

use super::{Artifact, Claim, ScenarioReport};

/// Quartic `(1 - x^2)(x + 1/2)^2`: simple zeros at the boundary, double
/// zero at `-1/2`, positive elsewhere inside the interval.
pub fn field_stall_low() -> VectorFieldSpec {
    VectorFieldSpec::new(
        "stall-at-minus-half",
        FieldShape::Polynomial {
            coeffs: vec![0.25, 1.0, 0.75, -1.0, -1.0],
        },
    )
}

/// Mirror quartic `(1 - x^2)(x - 1/2)^2` with its double zero at `+1/2`.
pub fn field_stall_high() -> VectorFieldSpec {
    VectorFieldSpec::new(
        "stall-at-plus-half",
        FieldShape::Polynomial {
            coeffs: vec![0.25, -1.0, 0.75, 1.0, -1.0],
        },
    )
}

/// Complete two-vertex switching system on `[-1, 1]`.
pub fn morse_system(h: f64) -> Result<HybridSystem, AnalysisError> {
    let graph = DirectedGraph::complete_with_self_loops(2);
    let sys = HybridSystem::new(
        graph,
        vec![field_stall_low(), field_stall_high()],
        StateSpace::Interval { lo: -1.0, hi: 1.0 },
        h,
    )?;
    Ok(sys)
}

/// The four candidate pieces: boundary points with every signal, stall
/// points with the one constant signal that holds them.
pub fn morse_candidates() -> Result<Vec<MorseCandidate>, AnalysisError> {
    Ok(vec![
        MorseCandidate::new(
            "left-boundary",
            Region::point(-1.0)?,
            DeltaFamily::AllAdmissible,
        ),
        MorseCandidate::new(
            "lower-stall",
            Region::point(-0.5)?,
            DeltaFamily::ConstantAt { vertex: 0 },
        ),
        MorseCandidate::new(
            "upper-stall",
            Region::point(0.5)?,
            DeltaFamily::ConstantAt { vertex: 1 },
        ),
        MorseCandidate::new(
            "right-boundary",
            Region::point(1.0)?,
            DeltaFamily::AllAdmissible,
        ),
    ])
}

/// Expected connecting pairs `(from, to)` with a witness product point
/// whose backward limit lands in piece `from` and forward limit in `to`.
pub fn connecting_witnesses(
    h: f64,
) -> Result<Vec<(usize, usize, ProductPoint)>, AnalysisError> {
    let const0 = SymbolicSignal::constant(0, h);
    let const1 = SymbolicSignal::constant(1, h);
    let alternating = SymbolicSignal::new(vec![0, 1], h, 0.0, 0, Extension::PeriodicWord)?;
    let step_up = SymbolicSignal::new(vec![0, 1], h, 0.0, 0, Extension::ConstantEnds)?;
    Ok(vec![
        (
            0,
            1,
            ProductPoint {
                x: -0.7,
                signal: const0.clone(),
            },
        ),
        (
            0,
            3,
            ProductPoint {
                x: 0.0,
                signal: alternating,
            },
        ),
        (
            1,
            2,
            ProductPoint {
                x: 0.0,
                signal: step_up,
            },
        ),
        (
            1,
            3,
            ProductPoint {
                x: 0.7,
                signal: const0,
            },
        ),
        (
            2,
            3,
            ProductPoint {
                x: 0.7,
                signal: const1,
            },
        ),
    ])
}

/// Reflexive transitive closure of `edges` on `{0, .., n-1}`.
fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        reach[i][i] = true;
    }
    for &(a, b) in edges {
        reach[a][b] = true;
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

fn describe_signal(sig: &SymbolicSignal) -> String {
    let word: String = sig.word().iter().map(|v| v.to_string()).collect();
    let ext = match sig.extension() {
        Extension::PeriodicWord => "periodic",
        Extension::ConstantEnds => "constant-ends",
    };
    format!("word={word} ext={ext} tau={}", fmt_sig(sig.tau()))
}

/// Run the stalling-quartic decomposition example end to end.
pub fn example_morse() -> Result<(ScenarioReport, Vec<Artifact>), AnalysisError> {
    let mut report = ScenarioReport::new("morse");
    let h = 1.0;
    let sys = morse_system(h)?;
    let candidates = morse_candidates()?;
    let witnesses = connecting_witnesses(h)?;
    let mut plan = SamplingPlan::default_for(h);
    plan.extra_witnesses = witnesses.iter().map(|(_, _, p)| p.clone()).collect();

    report.set_parameter("h", h);
    report.set_parameter("match_tol", plan.match_tol);
    report.set_parameter("burn", plan.burn);
    report.set_parameter("horizon", plan.horizon);

    let f0 = field_stall_low();
    let f1 = field_stall_high();
    let zeros_exact = [-1.0, -0.5, 1.0].iter().all(|&x| f0.eval(x) == 0.0)
        && [-1.0, 0.5, 1.0].iter().all(|&x| f1.eval(x) == 0.0);
    let interior_positive = (1..200)
        .map(|i| -1.0 + i as f64 / 100.0)
        .all(|x| (f0.eval(x) >= 0.0) && (f1.eval(x) >= 0.0));
    report.push_claim(Claim::new(
        "rest-point-structure-exact",
        zeros_exact && interior_positive,
        None,
        "both fields vanish exactly at the boundary and their stall point and are nonnegative inside",
    ));

    let const0 = SymbolicSignal::constant(0, h);
    let approach = hybrid_flow(&sys, &const0, -0.7, 2000.0 * h)?;
    let approach_gap = (approach + 0.5).abs();
    report.push_claim(Claim::new(
        "stall-attracts-from-the-left",
        approach < -0.5 && approach_gap <= 1e-3,
        Some(approach_gap),
        format!(
            "holding field 0 from -0.7 for 2000 dwells reaches {} (algebraic approach to -1/2 from below)",
            fmt_sig(approach)
        ),
    ));

    let morse_report = verify_morse_decomposition(&sys, &candidates, &plan)?;
    let failed: Vec<&str> = morse_report
        .conditions
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.condition.as_str())
        .collect();
    report.push_claim(Claim::new(
        "decomposition-conditions-hold",
        morse_report.passed,
        None,
        if failed.is_empty() {
            format!(
                "all {} conditions passed",
                morse_report.conditions.len()
            )
        } else {
            format!("failed conditions: {}", failed.join(", "))
        },
    ));

    let expected_edges = [(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)];
    let found: Vec<(usize, usize)> = morse_report
        .order_edges
        .iter()
        .map(|e| (e.from, e.to))
        .collect();
    let mut found_closure = closure(candidates.len(), &found);
    let mut expected_closure = closure(candidates.len(), &expected_edges);
    found_closure.sort_unstable();
    expected_closure.sort_unstable();
    report.push_claim(Claim::new(
        "order-structure-matches",
        found_closure == expected_closure,
        None,
        format!(
            "observed connection order generates the expected reachability; direct edges found: {:?}",
            found
        ),
    ));

    let mut witness_rows = Vec::new();
    let mut worst_gap = 0.0_f64;
    let mut all_connected = true;
    for (from, to, p) in &witnesses {
        let alpha = alpha_limit_estimate(&sys, p, plan.burn, plan.horizon, plan.cluster_radius)?;
        let omega = omega_limit_estimate(&sys, p, plan.burn, plan.horizon, plan.cluster_radius)?;
        let alpha_gap = alpha
            .points
            .iter()
            .map(|&q| candidates[*from].m_part.distance_to(q))
            .fold(0.0_f64, f64::max);
        let omega_gap = omega
            .points
            .iter()
            .map(|&q| candidates[*to].m_part.distance_to(q))
            .fold(0.0_f64, f64::max);
        let families_ok = candidates[*from].delta_part.contains_backward_limit(&p.signal)
            && candidates[*to].delta_part.contains_forward_limit(&p.signal);
        let ok = alpha_gap <= plan.match_tol && omega_gap <= plan.match_tol && families_ok;
        all_connected = all_connected && ok;
        worst_gap = worst_gap.max(alpha_gap).max(omega_gap);
        witness_rows.push((*from, *to, p.clone(), alpha_gap, omega_gap, ok));
    }
    report.push_claim(Claim::new(
        "connecting-orbits-catalogued",
        all_connected,
        Some(worst_gap),
        format!(
            "{} of {} expected connections witnessed; worst limit-set gap {}",
            witness_rows.iter().filter(|r| r.5).count(),
            witness_rows.len(),
            fmt_sig(worst_gap)
        ),
    ));

    let reduced: Vec<MorseCandidate> = candidates
        .iter()
        .filter(|c| c.name != "lower-stall")
        .cloned()
        .collect();
    let reduced_report = verify_morse_decomposition(&sys, &reduced, &plan)?;
    let omega_cond_failed = reduced_report
        .condition("omega-containment")
        .map(|c| !c.passed)
        .unwrap_or(false);
    let detail = reduced_report
        .condition("omega-containment")
        .map(|c| c.details.clone())
        .unwrap_or_default();
    report.push_claim(Claim::new(
        "dropping-a-stall-breaks-containment",
        !reduced_report.passed && omega_cond_failed,
        None,
        format!(
            "without the lower stall piece the forward containment condition fails: {detail}"
        ),
    ));

    let all_signals = DeltaFamily::AllAdmissible.sample_signals(sys.graph(), plan.word_len, h);
    let outside = all_signals
        .iter()
        .filter(|s| !candidates[1].delta_part.contains_signal(s))
        .count();
    report.push_claim(Claim::new(
        "stall-family-is-proper",
        outside > 0,
        None,
        format!(
            "{} of {} sampled admissible signals lie outside the lower stall piece's signal family",
            outside,
            all_signals.len()
        ),
    ));

    let mut csv = String::from("from,to,x0,signal,alpha_gap,omega_gap,connected\n");
    for (from, to, p, ag, og, ok) in &witness_rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            from,
            to,
            fmt_sig(p.x),
            describe_signal(&p.signal),
            fmt_sig(*ag),
            fmt_sig(*og),
            ok
        ));
    }

    let mut series = Vec::new();
    for (from, to, p, _, _, _) in &witness_rows {
        let samples = trajectory(&sys, &p.signal, p.x, -40.0 * h, 40.0 * h + 0.25 * h, h / 4.0)?;
        series.push((format!("{} to {}", candidates[*from].name, candidates[*to].name), samples));
    }
    let svg = svg_trajectories(
        "witness orbits connecting the four decomposition pieces",
        &series,
        &[-1.0, -0.5, 0.5, 1.0],
    );

    let artifacts = vec![
        Artifact::new("morse_witnesses.csv", csv),
        Artifact::new("morse_orbits.svg", svg),
    ];
    report.artifacts = artifacts.iter().map(|a| a.name.clone()).collect();
    Ok((report, artifacts))
}
