//! Acceptance suite: every criterion runs end to end at its registered
//! tolerances and parameters, printing one pass/fail line per criterion.
//! Criteria run sequentially in one test so the reported runtimes are not
//! distorted by parallel load.

use gtomo_cli::{run_scenario, Overrides, ScenarioResult};

struct Criterion {
    index: usize,
    scenario: &'static str,
    /// Upper bound on the runtime, when the criterion states one.
    max_seconds: Option<f64>,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        index: 1,
        scenario: "prop-3-x-planar-pair",
        max_seconds: Some(5.0),
    },
    Criterion {
        index: 2,
        scenario: "prop-3-1",
        max_seconds: None,
    },
    Criterion {
        index: 3,
        scenario: "prop-3-2-projections",
        max_seconds: None,
    },
    Criterion {
        index: 4,
        scenario: "prop-3-3-ball",
        max_seconds: None,
    },
    Criterion {
        index: 5,
        scenario: "prop-3-6",
        max_seconds: None,
    },
    Criterion {
        index: 6,
        scenario: "thm-4-1-ell2",
        max_seconds: Some(60.0),
    },
    Criterion {
        index: 7,
        scenario: "thm-4-1-harmonic",
        max_seconds: None,
    },
    Criterion {
        index: 8,
        scenario: "thm-4-2-projections",
        max_seconds: None,
    },
    Criterion {
        index: 9,
        scenario: "thm-4-3-4-4-ellipsoid",
        max_seconds: None,
    },
    Criterion {
        index: 10,
        scenario: "thm-5-1-moments",
        max_seconds: None,
    },
    Criterion {
        index: 11,
        scenario: "thm-5-2-dichotomy",
        max_seconds: None,
    },
    Criterion {
        index: 12,
        scenario: "thm-6-1-ksections",
        max_seconds: Some(60.0),
    },
    Criterion {
        index: 13,
        scenario: "harmonic-health",
        max_seconds: None,
    },
];

fn report(criterion: &Criterion, result: &ScenarioResult) -> bool {
    let within_time = criterion
        .max_seconds
        .is_none_or(|m| result.runtime_seconds < m);
    let pass = result.passed() && within_time;
    println!(
        "criterion {:02} [{}]: {} ({:.2}s)",
        criterion.index,
        criterion.scenario,
        if pass { "PASS" } else { "FAIL" },
        result.runtime_seconds
    );
    for check in &result.checks {
        if !check.pass {
            println!(
                "    {} = {:.6e} (threshold {:.3e})",
                check.name, check.value, check.threshold
            );
        }
    }
    if !within_time {
        println!(
            "    runtime {:.2}s exceeded the {:.0}s budget",
            result.runtime_seconds,
            criterion.max_seconds.unwrap()
        );
    }
    pass
}

#[test]
fn acceptance_criteria() {
    let overrides = Overrides::default();
    let mut failures = Vec::new();
    for criterion in CRITERIA {
        match run_scenario(criterion.scenario, &overrides, None) {
            Ok(result) => {
                if !report(criterion, &result) {
                    failures.push(format!(
                        "criterion {:02} [{}]",
                        criterion.index, criterion.scenario
                    ));
                }
            }
            Err(e) => {
                println!(
                    "criterion {:02} [{}]: ERROR {e}",
                    criterion.index, criterion.scenario
                );
                failures.push(format!(
                    "criterion {:02} [{}]: error",
                    criterion.index, criterion.scenario
                ));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "failed acceptance criteria: {}",
        failures.join(", ")
    );
}
