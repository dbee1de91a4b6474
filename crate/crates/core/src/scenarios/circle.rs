//! Two rotation fields on the circle, each with one attracting and one
//! repelling rest point, arranged so the four rest points interleave.
//!
//! On two of the four arcs cut out by the rest points both fields rotate the
//! same way; the switching graph is complete with self loops. For a dwell
//! long enough that each field crosses a mixed arc in one dwell, every
//! switched orbit keeps returning near the rest points, so forward limit
//! sets estimated from random starts and random switching words always meet
//! the four-point rest set.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::AnalysisError;
use crate::export::{fmt_sig, svg_trajectories};
use crate::graph::DirectedGraph;
use crate::hybrid::{
    hybrid_flow, trajectory, FieldShape, HybridSystem, ProductPoint, StateSpace, VectorFieldSpec,
};
use crate::limits::{omega_limit_estimate, DEFAULT_BURN_DWELLS, DEFAULT_CLUSTER_RADIUS};
use crate::signal::{Extension, SymbolicSignal};

use super::{Artifact, Claim, ScenarioReport};

/// Candidate dwell times, tried in order by `find_h_circle`.
pub const H_LADDER: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Number of random draws checked against the rest set.
pub const N_DRAWS: usize = 500;

/// Horizon for the draw estimates, in dwell units. Circulating orbits only
/// pass near the rest points once per lap, so the sampled closest approach
/// keeps shrinking with the number of laps; twice the library default gives
/// the intersection claim a comfortable margin.
const DRAW_HORIZON_DWELLS: f64 = 800.0;

/// The four nominal rest points: attractor, repeller, attractor, repeller.
pub const REST_POINTS: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

/// Harmonic fields `cos(pi/4) - cos(x - m)` with `m = pi/4` and `m = 5 pi/4`.
/// Field 0 attracts to angle `0` and repels from `pi/2`; field 1 attracts to
/// `pi` and repels from `3 pi/2`.
pub fn circle_fields() -> Vec<VectorFieldSpec> {
    let offset = FRAC_PI_4.cos();
    vec![
        VectorFieldSpec::new(
            "anchor-at-zero",
            FieldShape::Harmonic {
                offset,
                amplitude: -1.0,
                phase: FRAC_PI_4,
            },
        ),
        VectorFieldSpec::new(
            "anchor-at-pi",
            FieldShape::Harmonic {
                offset,
                amplitude: -1.0,
                phase: 5.0 * FRAC_PI_4,
            },
        ),
    ]
}

/// Complete two-vertex switching system over the circle.
pub fn circle_system(h: f64) -> Result<HybridSystem, AnalysisError> {
    let graph = DirectedGraph::complete_with_self_loops(2);
    let sys = HybridSystem::new(graph, circle_fields(), StateSpace::Circle, h)?;
    Ok(sys)
}

/// Verified rest-point layout of a two-field circle system.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionStructure {
    /// `attractors[k]` is field `k`'s attracting rest point in `[0, tau)`.
    pub attractors: [f64; 2],
    /// `repellers[k]` is field `k`'s repelling rest point.
    pub repellers: [f64; 2],
    /// Arcs `(lo, hi)` with `lo < hi <= lo + tau` on which both fields keep
    /// one strict common sign. Exactly two.
    pub common_arcs: Vec<(f64, f64)>,
    /// True when the common rotation is counterclockwise (both positive).
    pub ccw: bool,
}

fn arc_contains(lo: f64, hi: f64, x: f64) -> bool {
    let w = (x - lo).rem_euclid(TAU);
    w > 0.0 && w < hi - lo
}

fn circle_gap(a: f64, b: f64) -> f64 {
    StateSpace::Circle.state_distance(a, b)
}

/// Locate each field's zeros by sign changes on a fine offset grid, classify
/// them, and confirm the interleaved layout with exactly two arcs of common
/// strict sign.
pub fn validate_region_structure(
    fields: &[VectorFieldSpec],
) -> Result<RegionStructure, AnalysisError> {
    if fields.len() != 2 {
        return Err(AnalysisError::BadRegion(format!(
            "expected exactly 2 fields, got {}",
            fields.len()
        )));
    }
    const M: usize = 2048;
    let grid: Vec<f64> = (0..=M).map(|i| TAU * (i as f64 + 0.5) / M as f64).collect();

    let mut attractors = [0.0_f64; 2];
    let mut repellers = [0.0_f64; 2];
    for (k, field) in fields.iter().enumerate() {
        let mut zeros: Vec<(f64, bool)> = Vec::new();
        for w in grid.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (flo, fhi) = (field.eval(lo), field.eval(hi));
            if flo == 0.0 || fhi == 0.0 {
                return Err(AnalysisError::BadRegion(format!(
                    "field {k} vanishes exactly on the probe grid"
                )));
            }
            if flo.signum() == fhi.signum() {
                continue;
            }
            let descending = flo > 0.0;
            let (mut vlo, _) = (flo, fhi);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fmid = field.eval(mid);
                if fmid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fmid.signum() == vlo.signum() {
                    lo = mid;
                    vlo = fmid;
                } else {
                    hi = mid;
                }
            }
            let zero = (0.5 * (lo + hi)).rem_euclid(TAU);
            zeros.push((zero, descending));
        }
        // A positive-to-negative crossing, read counterclockwise, attracts.
        let attr: Vec<f64> = zeros.iter().filter(|z| z.1).map(|z| z.0).collect();
        let rep: Vec<f64> = zeros.iter().filter(|z| !z.1).map(|z| z.0).collect();
        if attr.len() != 1 || rep.len() != 1 {
            return Err(AnalysisError::BadRegion(format!(
                "field {k} has {} attracting and {} repelling zeros, expected one of each",
                attr.len(),
                rep.len()
            )));
        }
        attractors[k] = attr[0];
        repellers[k] = rep[0];
    }

    // Marked points sorted counterclockwise must alternate attract/repel.
    let mut marked: Vec<(f64, bool)> = vec![
        (attractors[0], true),
        (attractors[1], true),
        (repellers[0], false),
        (repellers[1], false),
    ];
    marked.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite angles"));
    for i in 0..4 {
        if marked[i].1 == marked[(i + 1) % 4].1 {
            return Err(AnalysisError::BadRegion(
                "attracting and repelling rest points do not interleave".into(),
            ));
        }
    }

    let mut common_arcs = Vec::new();
    let mut common_sign = 0i32;
    for i in 0..4 {
        let lo = marked[i].0;
        let hi = if i == 3 {
            marked[0].0 + TAU
        } else {
            marked[i + 1].0
        };
        let mut signs = [0i32; 2];
        for (k, field) in fields.iter().enumerate() {
            let mut s = 0i32;
            for j in 1..=7 {
                let x = lo + (hi - lo) * j as f64 / 8.0;
                let v = field.eval(x);
                let vs = if v > 0.0 { 1 } else { -1 };
                if s == 0 {
                    s = vs;
                } else if s != vs {
                    return Err(AnalysisError::BadRegion(format!(
                        "field {k} changes sign inside an arc between rest points"
                    )));
                }
            }
            signs[k] = s;
        }
        if signs[0] == signs[1] {
            if common_sign == 0 {
                common_sign = signs[0];
            } else if common_sign != signs[0] {
                return Err(AnalysisError::BadRegion(
                    "the two common-sign arcs rotate in opposite directions".into(),
                ));
            }
            common_arcs.push((lo, hi));
        }
    }
    if common_arcs.len() != 2 {
        return Err(AnalysisError::BadRegion(format!(
            "expected exactly 2 arcs of common sign, found {}",
            common_arcs.len()
        )));
    }
    Ok(RegionStructure {
        attractors,
        repellers,
        common_arcs,
        ccw: common_sign > 0,
    })
}

/// Dwell selected for the circle example, with the one-dwell landing points
/// used to select it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleDwell {
    pub h: f64,
    /// One dwell of field 1 started at field 0's attractor.
    pub cross_from_zero: f64,
    /// One dwell of field 0 started at field 1's attractor.
    pub cross_from_pi: f64,
}

fn single_field_circle(field: VectorFieldSpec, h: f64) -> Result<HybridSystem, AnalysisError> {
    let graph = DirectedGraph::new(1, [(0, 0)])?;
    let sys = HybridSystem::new(graph, vec![field], StateSpace::Circle, h)?;
    Ok(sys)
}

/// The common-sign arc entered counterclockwise from the rest point `from`.
fn arc_after(structure: &RegionStructure, from: f64) -> Option<(f64, f64)> {
    structure
        .common_arcs
        .iter()
        .copied()
        .find(|&(lo, _)| {
            let gap = (lo - from).rem_euclid(TAU);
            gap > 0.0 && gap < PI
        })
}

/// Smallest ladder dwell for which each field, started at the other field's
/// attractor, lands strictly inside the next common-sign arc in one dwell.
pub fn find_h_circle(structure: &RegionStructure) -> Result<CircleDwell, AnalysisError> {
    let fields = circle_fields();
    let arc_from_zero = arc_after(structure, structure.attractors[0]).ok_or_else(|| {
        AnalysisError::BadRegion("no common-sign arc follows field 0's attractor".into())
    })?;
    let arc_from_pi = arc_after(structure, structure.attractors[1]).ok_or_else(|| {
        AnalysisError::BadRegion("no common-sign arc follows field 1's attractor".into())
    })?;
    for &h in &H_LADDER {
        let sys1 = single_field_circle(fields[1].clone(), h)?;
        let sys0 = single_field_circle(fields[0].clone(), h)?;
        let const_sig = SymbolicSignal::constant(0, h);
        let cross_from_zero = hybrid_flow(&sys1, &const_sig, structure.attractors[0], h)?;
        let cross_from_pi = hybrid_flow(&sys0, &const_sig, structure.attractors[1], h)?;
        if arc_contains(arc_from_zero.0, arc_from_zero.1, cross_from_zero)
            && arc_contains(arc_from_pi.0, arc_from_pi.1, cross_from_pi)
        {
            return Ok(CircleDwell {
                h,
                cross_from_zero,
                cross_from_pi,
            });
        }
    }
    Err(AnalysisError::Precondition(
        "no ladder dwell crosses the mixed arcs in one dwell".into(),
    ))
}

/// One random draw: start angle plus a random admissible signal.
struct Draw {
    x0: f64,
    word: Vec<usize>,
    extension: Extension,
    tau: f64,
}

fn random_draws(seed: u64, h: f64, n: usize) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x0 = rng.random_range(0.0..TAU);
            let len = rng.random_range(1..=4usize);
            let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..2usize)).collect();
            let extension = if rng.random_bool(0.5) {
                Extension::PeriodicWord
            } else {
                Extension::ConstantEnds
            };
            let tau = rng.random_range(0.0..h);
            Draw {
                x0,
                word,
                extension,
                tau,
            }
        })
        .collect()
}

/// Run the interleaved-circle example end to end.
pub fn example_circle(seed: u64) -> Result<(ScenarioReport, Vec<Artifact>), AnalysisError> {
    let mut report = ScenarioReport::new("circle");
    report.seed = Some(seed);

    let fields = circle_fields();
    let structure = validate_region_structure(&fields)?;
    let located = [
        structure.attractors[0],
        structure.repellers[0],
        structure.attractors[1],
        structure.repellers[1],
    ];
    let layout_dev = located
        .iter()
        .zip(REST_POINTS.iter())
        .map(|(&got, &want)| circle_gap(got, want))
        .fold(0.0_f64, f64::max);
    report.push_claim(Claim::new(
        "rest-point-layout",
        layout_dev <= 1e-9 && structure.ccw,
        Some(layout_dev),
        format!(
            "located rest points {:?} match the nominal layout within {}; common rotation is counterclockwise on arcs {:?}",
            located.iter().map(|&p| fmt_sig(p)).collect::<Vec<_>>(),
            fmt_sig(layout_dev),
            structure
                .common_arcs
                .iter()
                .map(|&(lo, hi)| format!("({}, {})", fmt_sig(lo), fmt_sig(hi)))
                .collect::<Vec<_>>()
        ),
    ));

    let dwell = find_h_circle(&structure)?;
    let h = dwell.h;
    report.set_parameter("h", h);
    report.set_parameter("n_draws", N_DRAWS as f64);
    report.set_parameter("cross_from_zero", dwell.cross_from_zero);
    report.set_parameter("cross_from_pi", dwell.cross_from_pi);
    let arc_margin = [
        (arc_after(&structure, structure.attractors[0]), dwell.cross_from_zero),
        (arc_after(&structure, structure.attractors[1]), dwell.cross_from_pi),
    ]
    .iter()
    .filter_map(|(arc, landed)| {
        arc.map(|(lo, hi)| {
            let w = (landed - lo).rem_euclid(TAU);
            w.min(hi - lo - w)
        })
    })
    .fold(f64::INFINITY, f64::min);
    report.push_claim(Claim::new(
        "dwell-crosses-mixed-arcs",
        arc_margin > 0.0,
        Some(arc_margin),
        format!(
            "h = {}: one dwell of field 1 maps angle 0 to {}, one dwell of field 0 maps pi to {}; both land at least {} inside the target arc",
            fmt_sig(h),
            fmt_sig(dwell.cross_from_zero),
            fmt_sig(dwell.cross_from_pi),
            fmt_sig(arc_margin)
        ),
    ));

    let sys = circle_system(h)?;

    let mut rotation_min_step = f64::INFINITY;
    for &(lo, hi) in &structure.common_arcs {
        for vertex in 0..2usize {
            let sub = single_field_circle(fields[vertex].clone(), h)?;
            let sig = SymbolicSignal::constant(0, h);
            let mid = (0.5 * (lo + hi)).rem_euclid(TAU);
            let samples = trajectory(&sub, &sig, mid, 0.0, h, h / 32.0)?;
            for w in samples.windows(2) {
                if arc_contains(lo, hi, w[0].x) && arc_contains(lo, hi, w[1].x) {
                    let mut step = w[1].x - w[0].x;
                    if step > PI {
                        step -= TAU;
                    }
                    if step < -PI {
                        step += TAU;
                    }
                    let signed = if structure.ccw { step } else { -step };
                    rotation_min_step = rotation_min_step.min(signed);
                }
            }
        }
    }
    report.push_claim(Claim::new(
        "common-arc-rotation",
        rotation_min_step > 0.0,
        Some(rotation_min_step),
        format!(
            "inside both common-sign arcs every sampled step of either field advances counterclockwise by at least {}",
            fmt_sig(rotation_min_step)
        ),
    ));

    let burn = DEFAULT_BURN_DWELLS * h;
    let horizon = DRAW_HORIZON_DWELLS * h;
    report.set_parameter("draw_burn_dwells", DEFAULT_BURN_DWELLS);
    report.set_parameter("draw_horizon_dwells", DRAW_HORIZON_DWELLS);
    let draws = random_draws(seed, h, N_DRAWS);
    let distances: Vec<f64> = draws
        .par_iter()
        .map(|d| {
            let signal = SymbolicSignal::new(d.word.clone(), h, d.tau, 0, d.extension)?;
            let p = ProductPoint { x: d.x0, signal };
            let est = omega_limit_estimate(&sys, &p, burn, horizon, DEFAULT_CLUSTER_RADIUS)?;
            let min_gap = est
                .points
                .iter()
                .map(|&q| {
                    REST_POINTS
                        .iter()
                        .map(|&r| circle_gap(q, r))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::INFINITY, f64::min);
            Ok(min_gap)
        })
        .collect::<Result<_, AnalysisError>>()?;
    let worst = distances.iter().copied().fold(0.0_f64, f64::max);
    let n_hit = distances.iter().filter(|&&d| d <= 1e-2).count();
    report.push_claim(Claim::new(
        "random-limit-sets-touch-rest-points",
        worst <= 1e-2,
        Some(worst),
        format!(
            "{n_hit} of {N_DRAWS} seeded draws produced a forward limit estimate meeting the rest set within 1e-2; worst gap {}",
            fmt_sig(worst)
        ),
    ));

    let rest_sys = single_field_circle(fields[0].clone(), h)?;
    let rest_p = ProductPoint {
        x: structure.attractors[1],
        signal: SymbolicSignal::constant(0, h),
    };
    let rest_est = omega_limit_estimate(&rest_sys, &rest_p, burn, horizon, DEFAULT_CLUSTER_RADIUS)?;
    let rest_gap = rest_est
        .points
        .iter()
        .map(|&q| circle_gap(q, structure.attractors[0]))
        .fold(f64::INFINITY, f64::min);
    report.push_claim(Claim::new(
        "constant-field-funnels-to-its-anchor",
        rest_gap <= 1e-3,
        Some(rest_gap),
        format!(
            "holding field 0 from angle pi lands the forward limit estimate within {} of angle 0",
            fmt_sig(rest_gap)
        ),
    ));

    let mut csv = String::from("draw,x0,word,extension,tau,min_distance\n");
    for (i, (d, &gap)) in draws.iter().zip(distances.iter()).enumerate() {
        let word: String = d.word.iter().map(|v| v.to_string()).collect();
        let ext = match d.extension {
            Extension::PeriodicWord => "periodic",
            Extension::ConstantEnds => "constant-ends",
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i,
            fmt_sig(d.x0),
            word,
            ext,
            fmt_sig(d.tau),
            fmt_sig(gap)
        ));
    }

    let mut series = Vec::new();
    for (i, d) in draws.iter().take(3).enumerate() {
        let signal = SymbolicSignal::new(d.word.clone(), h, d.tau, 0, d.extension)?;
        let samples = trajectory(&sys, &signal, d.x0, 0.0, 40.0 * h + 0.5 * h, h / 8.0)?;
        series.push((format!("draw {i}"), samples));
    }
    let svg = svg_trajectories(
        "random switching on the interleaved circle keeps meeting the rest set",
        &series,
        &REST_POINTS,
    );

    let artifacts = vec![
        Artifact::new("circle_draws.csv", csv),
        Artifact::new("circle.svg", svg),
    ];
    report.artifacts = artifacts.iter().map(|a| a.name.clone()).collect();
    Ok((report, artifacts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_is_validated_and_interleaved() {
        let s = validate_region_structure(&circle_fields()).unwrap();
        assert!(circle_gap(s.attractors[0], 0.0) < 1e-9);
        assert!(circle_gap(s.repellers[0], FRAC_PI_2) < 1e-9);
        assert!(circle_gap(s.attractors[1], PI) < 1e-9);
        assert!(circle_gap(s.repellers[1], 3.0 * FRAC_PI_2) < 1e-9);
        assert!(s.ccw);
        assert_eq!(s.common_arcs.len(), 2);
        let (lo, hi) = s.common_arcs[0];
        assert!(lo < hi && hi <= lo + TAU);
    }

    #[test]
    fn misaligned_fields_fail_validation() {
        // Same anchor for both fields: rest points coincide instead of
        // interleaving.
        let offset = FRAC_PI_4.cos();
        let twice = vec![
            VectorFieldSpec::new(
                "a",
                FieldShape::Harmonic {
                    offset,
                    amplitude: -1.0,
                    phase: FRAC_PI_4,
                },
            ),
            VectorFieldSpec::new(
                "b",
                FieldShape::Harmonic {
                    offset,
                    amplitude: -1.0,
                    phase: FRAC_PI_4,
                },
            ),
        ];
        assert!(validate_region_structure(&twice).is_err());
    }

    #[test]
    fn ladder_dwell_crosses_both_arcs() {
        let s = validate_region_structure(&circle_fields()).unwrap();
        let dwell = find_h_circle(&s).unwrap();
        // The mixed-arc crossing time is sqrt(2) ln 2, just under 1.
        assert_eq!(dwell.h, 1.0);
        assert!(dwell.cross_from_zero > FRAC_PI_2 && dwell.cross_from_zero < PI);
        assert!(dwell.cross_from_pi > 3.0 * FRAC_PI_2 && dwell.cross_from_pi < TAU);
    }

    #[test]
    fn draws_are_deterministic_per_seed() {
        let a = random_draws(7, 2.0, 5);
        let b = random_draws(7, 2.0, 5);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.x0, y.x0);
            assert_eq!(x.word, y.word);
            assert_eq!(x.tau, y.tau);
        }
        let c = random_draws(8, 2.0, 5);
        assert!(a.iter().zip(c.iter()).any(|(x, y)| x.x0 != y.x0));
    }
}
