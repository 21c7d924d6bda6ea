use proptest::prelude::*;
use warplab::config::ManifoldSpec;
use warplab::{emit_config, parse_config, scenarios, Error};
use warplab_core::coupling::ScheduleId;

const MINIMAL: &str = r#"
[manifold]
name = "flat"

[potential]
name = "gaussian"
delta = 2.0
"#;

fn validation(text: &str) -> (String, String) {
    match parse_config(text) {
        Err(Error::Validation { key, constraint }) => (key, constraint),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn builtins_round_trip() {
    for name in scenarios::names() {
        let s = scenarios::load(name).unwrap();
        let text = emit_config(&s);
        assert_eq!(parse_config(&text).unwrap(), s, "{name}");
        // emission is canonical
        assert_eq!(emit_config(&parse_config(&text).unwrap()), text);
    }
}

#[test]
fn minimal_config_takes_defaults() {
    let s = parse_config(MINIMAL).unwrap();
    assert_eq!(s.manifold, ManifoldSpec::Flat { dimension: 2 });
    assert_eq!(s.conditions.delta, 2.0);
    assert_eq!(s.delta0, 1.0);
    assert_eq!(s.coupling.schedule, ScheduleId::Thm11);
    assert_eq!(s.coupling.calibration.tuples().len(), 27);
    assert_eq!(s.coupling.held_out.tuples().len(), 8);
    assert!(s.fit_plan.is_disjoint());
    assert!(s.contractivity.growth.is_none());
    assert!(s.suites.expected_fail.is_empty());
}

#[test]
fn nonpositive_parameter_names_the_key() {
    let text = r#"
[manifold]
name = "paper_surface"
k = -1.0

[potential]
name = "zero"
"#;
    let (key, constraint) = validation(text);
    assert_eq!(key, "manifold.k");
    assert_eq!(constraint, "k must be > 0");
    let msg = parse_config(text).unwrap_err().to_string();
    assert!(msg.contains("k must be > 0"), "{msg}");
}

#[test]
fn unknown_key_is_rejected_with_its_line() {
    let text = "[manifold]\nname = \"flat\"\n\n[potential]\nname = \"gaussian\"\ndelta2 = 1.0\n";
    match parse_config(text) {
        Err(Error::Parse { line, message }) => {
            assert_eq!(line, 6);
            assert!(message.contains("delta2"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn syntax_error_carries_its_line() {
    let text = "[manifold]\nname = \"flat\"\n[potential\nname = \"zero\"\n";
    match parse_config(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_section_is_rejected() {
    let text = format!("{MINIMAL}\n[extras]\nfoo = 1\n");
    assert!(matches!(parse_config(&text), Err(Error::Parse { .. })));
}

#[test]
fn keys_foreign_to_the_choice_are_rejected() {
    let (key, constraint) = validation(&MINIMAL.replace("name = \"flat\"", "name = \"flat\"\nk = 1.0"));
    assert_eq!(key, "manifold.k");
    assert!(constraint.contains("does not apply"));
    let (key, _) = validation(&MINIMAL.replace("delta = 2.0", "delta = 2.0\nlambda = 1.0"));
    assert_eq!(key, "potential.lambda");
}

#[test]
fn overlapping_fit_sets_are_rejected() {
    let text = format!("{MINIMAL}\n[simulation]\nfit_calibration = {{ r = [1.0], t = [1.0] }}\nfit_held_out = {{ r = [1.0], t = [1.0] }}\n");
    assert_eq!(validation(&text).0, "simulation.fit_held_out");
    let text = format!(
        "{MINIMAL}\n[coupling]\ncalibration = {{ x = [1.0], y = [2.0], t = [1.0] }}\nheld_out = {{ x = [1.0], y = [2.0], t = [1.0] }}\n"
    );
    assert_eq!(validation(&text).0, "coupling.held_out");
}

#[test]
fn other_validation_errors() {
    let (key, c) = validation(&format!("{MINIMAL}\n[simulation]\nstep = -1.0\n"));
    assert_eq!(key, "simulation.step");
    assert!(c.contains("> 0"), "{c}");
    assert_eq!(
        validation(&format!("{MINIMAL}\n[coupling]\nschedule = \"thm42\"\n")).0,
        "coupling.schedule"
    );
    assert_eq!(
        validation(&format!("{MINIMAL}\n[conditions]\ntheta = 0.9\n")).0,
        "conditions.theta"
    );
    assert_eq!(
        validation(&format!("{MINIMAL}\n[contractivity]\nphi = \"log\"\n")).0,
        "contractivity.phi"
    );
    assert_eq!(
        validation(&MINIMAL.replace("\"flat\"", "\"flat\"\ndimension = 1")).0,
        "manifold.dimension"
    );
}

#[test]
fn expected_failure_markers_match_prefixes() {
    let s = scenarios::load("paper_example").unwrap();
    assert!(s.suites.expects_failure("measure.moment"));
    assert!(s.suites.expects_failure("contractivity.super"));
    assert!(!s.suites.expects_failure("measure.mass"));
    let text = format!("{MINIMAL}\n[suites]\nexpected_fail = [\"drift\"]\n");
    let s = parse_config(&text).unwrap();
    assert!(s.suites.expects_failure("drift.c1"));
    assert!(!s.suites.expects_failure("driftless"));
}

proptest! {
    #[test]
    fn emitted_configs_parse_back(
        delta in 0.1f64..10.0,
        sigma in 0.0f64..3.0,
        paths in 1usize..100_000,
        seed in 0u64..=i64::MAX as u64,
        step in 1e-5f64..1e-1,
        dim in 2usize..6,
    ) {
        let floor = sigma * ((dim - 1) as f64).sqrt();
        let text = format!(
            "[manifold]\nname = \"hyperbolic\"\ndimension = {dim}\n[potential]\nname = \"gaussian\"\ndelta = {delta}\n\
             [conditions]\nsigma = {sigma}\ndelta = {}\n[simulation]\npaths = {paths}\nseed = {seed}\nstep = {step}\n",
            floor + delta
        );
        let s = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&emit_config(&s)).unwrap(), s);
    }
}
