//! Acceptance gate: ten numbered criteria covering graph analysis, the
//! signal metric, flow laws, the chaos certificate, the three bundled
//! scenarios, chain-set oracles, the perturbation sweep, and byte-level
//! reproducibility of the binary.
//!
//! Runs without the default test harness so every criterion prints exactly
//! one verdict line. Pass criterion numbers as arguments to run a subset.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use morseflow::scenarios::{circle, flicker, morse as morse_example, Claim, ScenarioReport};
use morseflow::{
    alpha_limit_estimate, build_chain_graph, chain_sets, communicating_classes, distance,
    invariant_class_exists, metric_diameter, omega_limit_estimate, perturbation_sweep,
    product_flow, sensitive_pair, transitive_witness, validate_n_graph,
    verify_morse_decomposition, ChainParams, DirectedGraph, Extension, HybridSystem,
    ProductPoint, SamplingPlan, StateSpace, SweepSpec, SymbolicSignal, CONDITION_NAMES,
};
use morseflow_testkit::chain_oracle::run_chain_oracle;
use morseflow_testkit::gen::{random_dyadic_time, random_signal};
use morseflow_testkit::graph_oracle::{
    all_n_graphs, canonical_classes, classes_by_reachability, random_n_graph,
};

const METRIC_WINDOW: usize = 20;

fn main() {
    let requested: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria: [(usize, fn()); 10] = [
        (1, criterion_1_graph_oracle),
        (2, criterion_2_metric_suite),
        (3, criterion_3_flow_laws),
        (4, criterion_4_chaos_certificate),
        (5, criterion_5_flicker_reproduction),
        (6, criterion_6_morse_reproduction),
        (7, criterion_7_circle_reproduction),
        (8, criterion_8_chain_oracle),
        (9, criterion_9_perturbation_sweep),
        (10, criterion_10_reproducibility),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0usize;
    for (n, body) in criteria {
        if !requested.is_empty() && !requested.contains(&n) {
            continue;
        }
        match catch_unwind(AssertUnwindSafe(body)) {
            Ok(()) => println!("[acceptance] criterion {n}: PASS"),
            Err(payload) => {
                println!("[acceptance] criterion {n}: FAIL");
                let message = payload
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| payload.downcast_ref::<&str>().copied())
                    .unwrap_or("panic payload is not a string");
                println!("    {message}");
                failures += 1;
            }
        }
    }
    let _ = std::panic::take_hook();
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn claim<'r>(report: &'r ScenarioReport, name: &str) -> &'r Claim {
    report
        .claims
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("scenario report has no claim named {name}"))
}

// Criterion 1: communicating classes match brute-force reachability on all
// 4-vertex admissible graphs and 500 random graphs up to 8 vertices, and
// every such graph has an invariant class.
fn criterion_1_graph_oracle() {
    let check = |g: &DirectedGraph| {
        let ours = communicating_classes(g).expect("input is an N-graph");
        assert_eq!(
            canonical_classes(&ours),
            classes_by_reachability(g),
            "class mismatch on {g:?}"
        );
        let invariant = invariant_class_exists(g).expect("at least one invariant class");
        assert!(ours.contains(&invariant));
    };

    let graphs = all_n_graphs(4);
    assert!(graphs.len() > 10_000, "exhaustive family unexpectedly small");
    for g in &graphs {
        check(g);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    for i in 0..500 {
        let extra_p = [0.05, 0.15, 0.35][i % 3];
        let g = random_n_graph(&mut rng, 8, extra_p);
        assert!(validate_n_graph(&g).is_n_graph());
        check(&g);
    }
}

/// Exact agreement of two signals over the metric window, decided by
/// evaluating both on every maximal piece where both are constant.
fn windows_agree(x: &SymbolicSignal, y: &SymbolicSignal, window: usize) -> bool {
    let h = x.h();
    let n = window as i64;
    for i in -n..=n {
        let start = i as f64 * h;
        let end = start + h;
        let mut cuts = vec![start, end];
        for tau in [x.tau(), y.tau()] {
            if tau > 0.0 {
                cuts.push(start + tau);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cuts"));
        cuts.dedup();
        for pair in cuts.windows(2) {
            let mid = 0.5 * (pair[0] + pair[1]);
            if x.evaluate(mid) != y.evaluate(mid) {
                return false;
            }
        }
    }
    true
}

// Criterion 2: metric axioms at window 20 on 1,000 random pairs plus the
// two closed-form distances.
fn criterion_2_metric_suite() {
    let g = DirectedGraph::complete_with_self_loops(2);
    let h = 0.25;
    let triangle_slack = 2.0 * (8.0 / 3.0) * 4f64.powi(-(METRIC_WINDOW as i32));
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);

    for case in 0..1000 {
        let x = random_signal(&mut rng, &g, h, 8);
        let y = if case % 8 == 0 {
            x.clone()
        } else {
            random_signal(&mut rng, &g, h, 8)
        };
        let z = random_signal(&mut rng, &g, h, 8);

        let xy = distance(&x, &y, METRIC_WINDOW).expect("equal dwell");
        let yx = distance(&y, &x, METRIC_WINDOW).expect("equal dwell");
        assert_eq!(
            xy.value.to_bits(),
            yx.value.to_bits(),
            "symmetry must be bitwise"
        );

        let self_distance = distance(&x, &x, METRIC_WINDOW).expect("equal dwell");
        assert_eq!(self_distance.value, 0.0, "self distance must be exactly 0");

        assert_eq!(
            xy.value == 0.0,
            windows_agree(&x, &y, METRIC_WINDOW),
            "zero distance must coincide with window agreement"
        );

        let xz = distance(&x, &z, METRIC_WINDOW).expect("equal dwell");
        let yz = distance(&y, &z, METRIC_WINDOW).expect("equal dwell");
        assert!(
            xz.value <= xy.value + yz.value + triangle_slack,
            "triangle violated: {} > {} + {} + {triangle_slack:e}",
            xz.value,
            xy.value,
            yz.value
        );
    }

    // Signals that disagree exactly on the dwell interval containing 0.
    let mut base = vec![0usize; 41];
    base[3] = 1;
    base[25] = 1;
    let mut bumped = base.clone();
    bumped[20] = 1;
    let x = SymbolicSignal::new(base, h, 0.0, 20, Extension::ConstantEnds).expect("valid");
    let y = SymbolicSignal::new(bumped, h, 0.0, 20, Extension::ConstantEnds).expect("valid");
    assert_eq!(
        distance(&x, &y, METRIC_WINDOW).expect("equal dwell").value,
        1.0,
        "single-interval difference must score exactly 1"
    );

    let a = SymbolicSignal::constant(0, h);
    let b = SymbolicSignal::constant(1, h);
    let everywhere = distance(&a, &b, METRIC_WINDOW).expect("equal dwell").value;
    assert!(
        (everywhere - metric_diameter()).abs() < 1e-10,
        "all-different distance {everywhere} is not within 1e-10 of 5/3"
    );
}

/// Random signal whose offset lies on the lattice `h/64 * Z`, so that
/// offset arithmetic against dyadic shift times is exact.
fn random_lattice_signal(rng: &mut ChaCha8Rng, h: f64) -> SymbolicSignal {
    let len = rng.random_range(1..=8usize);
    let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..2usize)).collect();
    let tau = if rng.random_bool(0.5) {
        0.0
    } else {
        rng.random_range(0..64i64) as f64 * h / 64.0
    };
    let anchor = rng.random_range(-3..=3);
    let extension = if rng.random_bool(0.5) {
        Extension::PeriodicWord
    } else {
        Extension::ConstantEnds
    };
    SymbolicSignal::new(word, h, tau, anchor, extension).expect("valid signal")
}

// Criterion 3: shift composition exact on a dyadic lattice, hybrid flow
// composition within 1e-9 relative on both interval systems, and the
// window-step Lipschitz bound for the shift flow.
fn criterion_3_flow_laws() {
    let g = DirectedGraph::complete_with_self_loops(2);
    let h = 0.25;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);

    for _ in 0..1000 {
        let x = random_lattice_signal(&mut rng, h);
        let s = random_dyadic_time(&mut rng, h, 64, 8);
        let t = random_dyadic_time(&mut rng, h, 64, 8);
        let staged = x.shift(t).shift(s);
        let direct = x.shift(s + t);
        assert_eq!(staged, direct, "shift composition must be exact");
        assert_eq!(
            distance(&staged, &direct, METRIC_WINDOW)
                .expect("equal dwell")
                .value,
            0.0
        );
    }

    let dwell = flicker::find_h_flicker().expect("ladder contains a flicker dwell");
    let systems: [HybridSystem; 2] = [
        flicker::cross_system(dwell.h).expect("valid system"),
        morse_example::morse_system(1.0).expect("valid system"),
    ];
    for sys in &systems {
        let sys_h = sys.h();
        for _ in 0..250 {
            // Alternating words are the admissible family shared by both
            // example graphs and keep orbits away from parked states whose
            // backward flow amplifies truncation error.
            let first = rng.random_range(0..2usize);
            let tau = rng.random_range(0.0..1.0) * sys_h;
            let anchor = rng.random_range(-2..=2);
            let sig = SymbolicSignal::new(
                vec![first, 1 - first],
                sys_h,
                if tau >= sys_h { 0.0 } else { tau },
                anchor,
                Extension::PeriodicWord,
            )
            .expect("valid signal");
            let x0 = rng.random_range(-0.9..=0.9);
            let s = rng.random_range(-4.0..4.0) * sys_h;
            let t = rng.random_range(-4.0..4.0) * sys_h;
            let p = ProductPoint {
                x: x0,
                signal: sig,
            };
            let direct = product_flow(sys, &p, s + t).expect("flow succeeds");
            let mid = product_flow(sys, &p, t).expect("flow succeeds");
            let staged = product_flow(sys, &mid, s).expect("flow succeeds");
            let tol = 1e-9 * direct.x.abs().max(1.0);
            assert!(
                (direct.x - staged.x).abs() <= tol,
                "flow composition defect {} exceeds 1e-9 relative",
                (direct.x - staged.x).abs()
            );
        }
    }

    for _ in 0..200 {
        let x = random_signal(&mut rng, &g, h, 8);
        let y = random_signal(&mut rng, &g, h, 8);
        let t = random_dyadic_time(&mut rng, h, 64, 5);
        let before = distance(&x, &y, METRIC_WINDOW).expect("equal dwell").value;
        let after = distance(&x.shift(t), &y.shift(t), METRIC_WINDOW)
            .expect("equal dwell")
            .value;
        let steps = (t / h).abs().ceil() as i32;
        assert!(
            after <= 4f64.powi(steps) * before + 1e-9,
            "shift Lipschitz bound violated: {after} > 4^{steps} * {before} + 1e-9"
        );
    }
}

// Criterion 4: on the complete 2-vertex graph with self-loops the
// transitivity witness covers every word of length <= 4 and the sensitivity
// construction separates a nearby signal to distance >= 1.
fn criterion_4_chaos_certificate() {
    let g = DirectedGraph::complete_with_self_loops(2);
    let class = invariant_class_exists(&g).expect("single invariant class");
    let witness = transitive_witness(&g, &class, 4, 1.0).expect("witness exists");
    let word = witness.word();
    let doubled: Vec<usize> = word.iter().chain(word.iter()).copied().collect();
    for len in 1..=4usize {
        for mask in 0..(1u32 << len) {
            let target: Vec<usize> = (0..len).map(|i| ((mask >> i) & 1) as usize).collect();
            assert!(
                doubled.windows(len).any(|win| win == target),
                "witness cycle misses the word {target:?}"
            );
        }
    }

    let x = SymbolicSignal::new(vec![0, 1], 1.0, 0.0, 0, Extension::PeriodicWord)
        .expect("valid signal");
    let pair = sensitive_pair(&g, &x, 0.05).expect("sensitive partner exists");
    let before = distance(&x, &pair.partner, METRIC_WINDOW)
        .expect("equal dwell")
        .value;
    assert!(before < 0.05, "partner starts {before} away, not under 0.05");
    let t = pair.divergence_step as f64 * x.h();
    let after = distance(&x.shift(t), &pair.partner.shift(t), METRIC_WINDOW)
        .expect("equal dwell")
        .value;
    assert!(after >= 1.0, "shifted distance {after} stays below 1");
}

// Criterion 5: the two-field interval scenario traps 41 starts x 8 offsets
// inside the gap for 500 dwells with a positive wall margin, and the
// constant-field limit unions match the rest points within 1e-3.
fn criterion_5_flicker_reproduction() {
    let (report, _artifacts) = flicker::example_flicker().expect("scenario runs");
    assert_eq!(report.parameters["n_start_states"], 41.0);
    assert_eq!(report.parameters["n_signal_offsets"], 8.0);
    assert_eq!(report.parameters["run_dwells"], 500.0);
    for name in [
        "dwell-selection",
        "orbits-enter-the-gap",
        "orbits-never-leave-the-gap",
        "tail-clears-the-gap-walls",
        "left-field-rest-points",
        "right-field-rest-points",
    ] {
        assert!(claim(&report, name).passed, "claim {name} failed");
    }
    let margin = claim(&report, "tail-clears-the-gap-walls")
        .margin
        .expect("margin recorded");
    assert!(margin > 0.0, "tail margin {margin} is not strictly positive");
    for name in ["left-field-rest-points", "right-field-rest-points"] {
        let gap = claim(&report, name).margin.expect("gap recorded");
        assert!(gap <= 1e-3, "{name} gap {gap} exceeds 1e-3");
    }
}

// Criterion 6: the four-piece decomposition verifies all seven conditions,
// every catalogued connection is witnessed, and removing the second piece
// breaks forward limit containment with a named witness.
fn criterion_6_morse_reproduction() {
    let h = 1.0;
    let sys = morse_example::morse_system(h).expect("valid system");
    let candidates = morse_example::morse_candidates().expect("valid candidates");
    let witnesses = morse_example::connecting_witnesses(h).expect("witness catalog");
    let mut plan = SamplingPlan::default_for(h);
    plan.extra_witnesses = witnesses.iter().map(|(_, _, p)| p.clone()).collect();

    let report = verify_morse_decomposition(&sys, &candidates, &plan).expect("verification runs");
    assert!(report.passed, "decomposition did not verify");
    assert_eq!(report.conditions.len(), CONDITION_NAMES.len());
    for c in &report.conditions {
        assert!(c.passed, "condition {} failed: {}", c.condition, c.details);
    }

    for (from, to, point) in &witnesses {
        assert!(
            report.has_order_edge(*from, *to),
            "no order edge for catalogued connection {from} -> {to}"
        );
        let backward = alpha_limit_estimate(&sys, point, plan.burn, plan.horizon, plan.cluster_radius)
            .expect("limit estimate");
        assert!(
            backward
                .points
                .iter()
                .all(|&x| candidates[*from].m_part.contains(x, plan.match_tol)),
            "backward limit of the {from} -> {to} witness misses piece {from}"
        );
        let forward = omega_limit_estimate(&sys, point, plan.burn, plan.horizon, plan.cluster_radius)
            .expect("limit estimate");
        assert!(
            forward
                .points
                .iter()
                .all(|&x| candidates[*to].m_part.contains(x, plan.match_tol)),
            "forward limit of the {from} -> {to} witness misses piece {to}"
        );
    }

    let mut reduced = candidates.clone();
    reduced.remove(1);
    let broken = verify_morse_decomposition(&sys, &reduced, &plan).expect("verification runs");
    assert!(!broken.passed, "dropping the second piece must break verification");
    let containment = broken
        .condition("omega-containment")
        .expect("condition present");
    assert!(
        !containment.passed,
        "forward containment should fail without the second piece"
    );
    assert!(
        containment.details.contains("x0="),
        "failure must name a concrete witness, got: {}",
        containment.details
    );
}

// Criterion 7: the circle fields pass the region-structure validator and
// 500 seeded draws put every forward limit estimate within 1e-2 of the four
// rest points.
fn criterion_7_circle_reproduction() {
    circle::validate_region_structure(&circle::circle_fields())
        .expect("region structure validates");
    assert_eq!(circle::N_DRAWS, 500);

    let (report, _artifacts) = circle::example_circle(20260823).expect("scenario runs");
    assert_eq!(report.seed, Some(20260823));
    for name in [
        "rest-point-layout",
        "dwell-crosses-mixed-arcs",
        "common-arc-rotation",
        "random-limit-sets-touch-rest-points",
        "constant-field-funnels-to-its-anchor",
    ] {
        assert!(claim(&report, name).passed, "claim {name} failed");
    }
    let worst_gap = claim(&report, "random-limit-sets-touch-rest-points")
        .margin
        .expect("gap recorded");
    assert!(
        worst_gap <= 1e-2,
        "worst draw gap {worst_gap} exceeds 1e-2"
    );
}

/// Library hop graph and components versus the bounded-chain oracle on one
/// instance; panics on any disagreement.
fn oracle_instance(sys: &HybridSystem, grid_n: usize, eps: f64, t_max_dwells: f64, word_len: usize) {
    let h = sys.h();
    let params = ChainParams {
        grid_n,
        eps,
        t_min: h,
        t_max: t_max_dwells * h,
        word_len,
    };
    let cg = build_chain_graph(sys, &params).expect("parameters are valid");
    let sets = chain_sets(sys, &cg).expect("component extraction succeeds");

    let oracle = run_chain_oracle(sys, grid_n, eps, params.t_min, params.t_max, word_len, 6, 1e-12);
    assert_eq!(cg.grid(), &oracle.grid[..], "grids must agree bitwise");
    assert!(
        oracle.boundary_margin > 1e-7,
        "hop decisions ride on rounding (margin {:.3e})",
        oracle.boundary_margin
    );
    let ours: Vec<(usize, usize)> = cg.edges().iter().map(|e| (e.from, e.to)).collect();
    let theirs: Vec<(usize, usize)> = oracle.edges.iter().copied().collect();
    assert_eq!(ours, theirs, "hop edge sets must agree exactly");
    let our_comps: Vec<Vec<usize>> = sets.components.iter().map(|c| c.nodes.clone()).collect();
    assert_eq!(our_comps, oracle.components, "recurrent components must agree");
}

// Criterion 8: chain sets equal the bounded-chain oracle on four desk-scale
// instances, and a growing jump radius only merges components.
fn criterion_8_chain_oracle() {
    let dwell = flicker::find_h_flicker().expect("flicker dwell");
    let cross = flicker::cross_system(dwell.h).expect("valid system");
    oracle_instance(&cross, 21, 0.15, 5.0, 2);
    oracle_instance(&cross, 15, 0.22, 4.0, 3);

    let stalling = morse_example::morse_system(1.0).expect("valid system");
    oracle_instance(&stalling, 15, 0.2, 5.0, 2);

    let rotating = circle::circle_system(1.0).expect("valid system");
    oracle_instance(&rotating, 24, 0.3, 4.0, 2);

    let h = cross.h();
    let mut previous: Option<Vec<Vec<usize>>> = None;
    for eps in [0.06, 0.1, 0.15, 0.22, 0.3] {
        let params = ChainParams {
            grid_n: 21,
            eps,
            t_min: h,
            t_max: 5.0 * h,
            word_len: 2,
        };
        let cg = build_chain_graph(&cross, &params).expect("parameters are valid");
        let sets = chain_sets(&cross, &cg).expect("components");
        let comps: Vec<Vec<usize>> = sets.components.iter().map(|c| c.nodes.clone()).collect();
        assert!(!comps.is_empty(), "eps {eps}: no recurrent component");
        if let Some(finer) = &previous {
            for fine in finer {
                let holders = comps
                    .iter()
                    .filter(|coarse| fine.iter().all(|n| coarse.contains(n)))
                    .count();
                assert_eq!(
                    holders, 1,
                    "eps ladder must only merge components: {fine:?} not nested"
                );
            }
        }
        previous = Some(comps);
    }
}

// Criterion 9: pulling the bistable cubic toward three targets keeps three
// matched chain components whose distance to the unperturbed components
// shrinks monotonically and respects the reported linear bound.
fn criterion_9_perturbation_sweep() {
    let started = Instant::now();
    let spec = SweepSpec {
        base: vec![0.0, 1.0, 0.0, -1.0],
        targets: vec![-0.5, 0.0, 0.5],
        rho_ladder: vec![0.2, 0.1, 0.05, 0.0],
        space: StateSpace::Interval { lo: -1.0, hi: 1.0 },
        h: 1.0,
        params: ChainParams {
            grid_n: 201,
            eps: 0.05,
            t_min: 2.0,
            t_max: 5.0,
            word_len: 1,
        },
    };
    let report = perturbation_sweep(&spec).expect("sweep runs");

    assert_eq!(report.levels.len(), 4);
    let baseline_level = &report.levels[report.baseline];
    assert_eq!(baseline_level.rho, 0.0);
    assert_eq!(
        baseline_level.result.components.len(),
        3,
        "unperturbed run must have exactly three components"
    );

    for level in &report.levels {
        let matched: Vec<usize> = level.matched.iter().filter_map(|m| *m).collect();
        assert_eq!(
            matched.len(),
            3,
            "rho {}: expected three matched components, got {matched:?}",
            level.rho
        );
        let distinct: BTreeSet<usize> = matched.iter().copied().collect();
        assert_eq!(
            distinct,
            BTreeSet::from([0, 1, 2]),
            "rho {}: matched components must cover all three baselines",
            level.rho
        );
    }

    assert!(report.bound_constant.is_finite() && report.bound_constant >= 0.0);
    for b in 0..3 {
        let series = report.series_for(b);
        assert_eq!(series.len(), 4, "baseline {b} unmatched at some level");
        for pair in series.windows(2) {
            assert!(
                pair[0].1 > pair[1].1 || (pair[0].1 == 0.0 && pair[1].1 == 0.0),
                "baseline {b}: distance does not decrease along the ladder: {series:?}"
            );
        }
        let last = series.last().expect("nonempty series");
        assert_eq!(last.1, 0.0, "baseline {b} must match itself exactly");
        for &(rho, d) in &series {
            assert!(
                d <= 2.0 * (report.spacing + rho * report.bound_constant) + 1e-12,
                "baseline {b} at rho {rho}: {d} exceeds the linear bound"
            );
        }
    }

    assert!(
        started.elapsed().as_secs() < 600,
        "sweep exceeded the ten-minute budget"
    );
}

fn run_binary(threads: &str, args: &[&str], out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_morseflow"))
        .args(["--threads", threads])
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    assert!(
        status.status.success(),
        "binary failed: {}",
        String::from_utf8_lossy(&status.stderr)
    );
}

fn artifact_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("read dir")
        .map(|entry| {
            let entry = entry.expect("dir entry");
            let name = entry.file_name().into_string().expect("utf8 name");
            let bytes = std::fs::read(entry.path()).expect("read artifact");
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

// Criterion 10: the binary writes byte-identical artifacts with 1, 2, and 8
// worker threads on a seeded scenario and on a chain analysis.
fn criterion_10_reproducibility() {
    let fixture = format!(
        "{}/tests/fixtures/system_cross.toml",
        env!("CARGO_MANIFEST_DIR")
    );
    let cases: [Vec<&str>; 2] = [
        vec!["scenario", "circle", "--seed", "20260823"],
        vec![
            "chains", &fixture, "--eps", "0.15", "--T", "5", "--grid", "21",
        ],
    ];
    for args in &cases {
        let mut snapshots = Vec::new();
        for threads in ["1", "2", "8"] {
            let dir = TempDir::new().expect("temp dir");
            run_binary(threads, args, dir.path());
            let files = artifact_bytes(dir.path());
            assert!(
                files.iter().any(|(name, _)| name.ends_with(".json"))
                    && files.iter().any(|(name, _)| name.ends_with(".csv")),
                "expected JSON and CSV artifacts"
            );
            snapshots.push((threads, files));
        }
        for window in snapshots.windows(2) {
            let (threads_a, a) = &window[0];
            let (threads_b, b) = &window[1];
            assert_eq!(
                a, b,
                "artifacts differ between --threads {threads_a} and --threads {threads_b}"
            );
        }
    }
}
