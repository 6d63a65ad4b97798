mod common;

use iotforge::thingml::{check, generate, write_units, ConstructKind};

use common::{load, CLEAN};

#[test]
fn every_clean_fixture_generates_checkable_units() {
    for name in CLEAN {
        for unit in generate(&load(name)).unwrap() {
            check(&unit.text).unwrap_or_else(|e| panic!("{name}/{}:{e}", unit.file_name));
            assert!(unit.text.starts_with("// Generated from system "), "{name}/{}", unit.file_name);
        }
    }
}

#[test]
fn guards_and_sends_render_in_transitions_and_handlers() {
    let units = generate(&load("safety")).unwrap();
    let gas = &units.iter().find(|u| u.file_name == "GasSensor.thingml").unwrap().text;
    assert!(gas.contains("transition -> Alarm guard (gasLevel >= 300)"), "{gas}");
    assert!(gas.contains("p1!gasReading(gasLevel)"), "{gas}");
    assert!(gas.contains("statechart GasSensorSM init Idle {"), "{gas}");
}

#[test]
fn configuration_instantiates_the_plant() {
    let units = generate(&load("safety")).unwrap();
    let cfg = check(&units.last().unwrap().text).unwrap().configurations.remove(0);
    assert_eq!(cfg.name, "SafetyMonitor");
    assert!(cfg.instances.iter().any(|(name, ty)| name == "plant_n1_s2" && ty == "GasSensor"));
    assert!(cfg.connectors.iter().all(|c| c.client != c.server));
}

#[test]
fn provenance_points_back_into_the_model() {
    let model = load("safety");
    for unit in generate(&model).unwrap() {
        for p in unit.provenance_of(ConstructKind::Thing) {
            assert!(model.component(&p.source).is_some(), "{p:?}");
        }
        for p in unit.provenance_of(ConstructKind::Message) {
            assert!(model.payload(&p.source).is_some(), "{p:?}");
        }
    }
}

#[test]
fn written_files_match_units() {
    let dir = tempfile::tempdir().unwrap();
    let units = generate(&load("seed")).unwrap();
    let paths = write_units(dir.path(), &units).unwrap();
    for (unit, path) in units.iter().zip(paths) {
        assert_eq!(std::fs::read_to_string(path).unwrap(), unit.text);
    }
}

#[test]
fn checker_rejects_text_outside_the_subset() {
    for bad in [
        "thing T { property x : Integer = }",
        "thing T { statechart S init Missing { state A { } } }",
        "thing T { statechart S init A { state A { transition -> B } } }",
        "thing state { }",
        "configuration C { instance a : }",
    ] {
        assert!(check(bad).is_err(), "{bad}");
    }
}
