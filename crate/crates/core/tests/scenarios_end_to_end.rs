//! Full runs of the three packaged scenarios. Each must produce a report
//! with every claim passing and nonempty artifacts.

use morseflow::scenarios::{circle, flicker, morse, ScenarioReport};

fn dump(report: &ScenarioReport) {
    for c in &report.claims {
        println!(
            "  [{}] {} margin={:?}: {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.margin,
            c.details
        );
    }
}

#[test]
fn flicker_scenario_passes() {
    let (report, artifacts) = flicker::example_flicker().expect("scenario runs");
    dump(&report);
    assert!(report.passed, "some flicker claim failed");
    assert_eq!(report.scenario, "flicker");
    assert_eq!(report.seed, None);
    assert_eq!(artifacts.len(), 3);
    assert!(artifacts.iter().all(|a| !a.content.is_empty()));
    assert_eq!(
        report.artifacts,
        artifacts.iter().map(|a| a.name.clone()).collect::<Vec<_>>()
    );
}

#[test]
fn circle_scenario_passes() {
    let (report, artifacts) = circle::example_circle(20260823).expect("scenario runs");
    dump(&report);
    assert!(report.passed, "some circle claim failed");
    assert_eq!(report.seed, Some(20260823));
    assert_eq!(artifacts.len(), 2);
    let draws = &artifacts[0];
    assert_eq!(draws.name, "circle_draws.csv");
    // Header plus one row per draw.
    assert_eq!(draws.content.lines().count(), 501);
}

#[test]
fn circle_scenario_depends_on_seed() {
    let (a, _) = circle::example_circle(1).expect("scenario runs");
    let (b, _) = circle::example_circle(1).expect("scenario runs");
    assert_eq!(a, b);
}

#[test]
fn morse_scenario_passes() {
    let (report, artifacts) = morse::example_morse().expect("scenario runs");
    dump(&report);
    assert!(report.passed, "some morse claim failed");
    assert_eq!(artifacts.len(), 2);
    let names: Vec<&str> = report.claims.iter().map(|c| c.name.as_str()).collect();
    assert!(names.contains(&"decomposition-conditions-hold"));
    assert!(names.contains(&"dropping-a-stall-breaks-containment"));
}
