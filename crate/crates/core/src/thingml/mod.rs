//! ThingML generation.
//!
//! A validated model becomes a set of ThingML source units: a datatype
//! prelude, a message fragment with one message per payload, one thing per
//! element or board, and a configuration instantiating every entity. Each
//! unit records where its constructs came from in the model, and
//! [`check`] parses emitted text against the supported ThingML subset.

mod check;
mod emit;
mod names;

use std::fs;
use std::io;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use check::{
    check, CheckError, ConfigOutline, Connector, FragmentOutline, Outline, PortOutline, StateOutline,
    StatechartOutline, ThingOutline,
};
pub use names::{lower_camel, Namespace, RESERVED};

use crate::diag::{has_errors, Diagnostic};
use crate::instance::{build_instance_model, InstanceError};
use crate::model::Model;
use crate::validate::validate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructKind {
    Object,
    Fragment,
    Message,
    Thing,
    Property,
    /// A property the generator adds to carry a payload-typed argument.
    Carrier,
    Port,
    Function,
    Statechart,
    State,
    Transition,
    Guard,
    Event,
    Action,
    Configuration,
    Instance,
    Connector,
}

/// Links one emitted construct to the model element it implements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: ConstructKind,
    /// Qualified emitted name, e.g. `TempHumSensor.TempHumSensorSM.Idle`.
    /// Events and actions list every site their statements appear at.
    pub emitted: String,
    /// Model path, e.g. `TempHumSensor.Idle` or `Node.transitions[2]`.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThingmlUnit {
    pub file_name: String,
    pub text: String,
    pub provenance: Vec<Provenance>,
}

impl ThingmlUnit {
    pub fn provenance_of(&self, kind: ConstructKind) -> impl Iterator<Item = &Provenance> {
        self.provenance.iter().filter(move |p| p.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("model has validation errors")]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Generates every unit of a model in a fixed order: datatypes, messages,
/// things in declaration order, configuration. Output is a pure function of
/// the model.
pub fn generate(model: &Model) -> Result<Vec<ThingmlUnit>, GenerateError> {
    let diags = validate(model);
    if has_errors(&diags) {
        return Err(GenerateError::Invalid(diags));
    }
    let instances = build_instance_model(model)?;
    Ok(emit::Generator::new(model).units(&instances))
}

/// Directory the units of `model` are written to under `out`.
pub fn output_dir(out: &Path, model: &Model) -> PathBuf {
    out.join(&model.name)
}

/// Writes units into `dir`, creating it as needed. Each file is written to
/// a temporary sibling and renamed into place.
pub fn write_units(dir: &Path, units: &[ThingmlUnit]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(units.len());
    for unit in units {
        let target = dir.join(&unit.file_name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(unit.text.as_bytes())?;
        tmp.persist(&target).map_err(|e| e.error)?;
        written.push(target);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_str;

    fn units(src: &str) -> Vec<ThingmlUnit> {
        let m = parse_str(src).unwrap_or_else(|d| panic!("{d:#?}"));
        let units = generate(&m).unwrap_or_else(|e| panic!("{e:?}"));
        for u in &units {
            check(&u.text).unwrap_or_else(|e| panic!("{}:{e}\n{}", u.file_name, u.text));
        }
        units
    }

    fn unit<'u>(units: &'u [ThingmlUnit], file: &str) -> &'u str {
        &units.iter().find(|u| u.file_name == file).unwrap().text
    }

    #[test]
    fn empty_component_is_an_empty_thing() {
        let u = units("system S { element X { } }");
        assert!(unit(&u, "X.thingml").ends_with("\nthing X includes SMsgs { }\n"));
        assert_eq!(u.len(), 4);
    }

    #[test]
    fn payload_becomes_a_message() {
        let u = units("system S { payload TempHumReading { temp: float, hum: float } }");
        assert!(unit(&u, "messages.thingml").contains("    message tempHumReading(temp : Double, hum : Double);\n"));
    }

    #[test]
    fn property_with_initial_value() {
        let u = units("system S { element X { property lastTemp: float = 0.0 } }");
        assert!(unit(&u, "X.thingml").contains("    property lastTemp : Double = 0.0\n"));
    }

    #[test]
    fn operations_become_stub_functions() {
        let u = units(
            "system S { payload R { v: int } interface I { op read() -> R }
             element X { provides port p: I } }",
        );
        let text = unit(&u, "X.thingml");
        assert!(text.contains("function read() : R do\n        // TODO: implement read\n    end"), "{text}");
    }

    #[test]
    fn self_transition_without_trigger_is_bare() {
        let u = units(
            "system S { element X { property n: int = 0 statemachine {
               initial state Idle { entry e exit e }
               transition Idle -> Idle
               event e generic does a
               action a set n = 1 } } }",
        );
        assert!(unit(&u, "X.thingml").contains("            transition -> Idle\n"));
    }

    #[test]
    fn colliding_names_are_mangled() {
        let u = units(
            "system S { payload State { v: int } payload state { w: int }
             element X { property end: int = 0 property x: int = 1 statemachine {
               initial state X { entry e exit e }
               transition X -> X [end > x]
               event e generic does a
               action a set end = end + 1 } } }",
        );
        let msgs = unit(&u, "messages.thingml");
        // Object types `State` and `state_2` are named first.
        assert!(msgs.contains("message state_3(v : Integer);"), "{msgs}");
        assert!(msgs.contains("message state_4(w : Integer);"), "{msgs}");
        let text = unit(&u, "X.thingml");
        assert!(text.contains("property end_2 : Integer = 0"), "{text}");
        assert!(text.contains("state X_2 {"), "{text}");
        assert!(text.contains("guard (end_2 > x)"), "{text}");
        assert!(text.contains("end_2 = end_2 + 1"), "{text}");
    }

    #[test]
    fn payload_arguments_without_a_property_get_a_carrier() {
        let u = units(
            "system S { payload In { v: int } payload Out { inner: In, n: int }
             interface I { op f() }
             element X { provides port p: I statemachine {
               initial state A { entry e exit e }
               event e outgoing via p does s
               action s send Out } } }",
        );
        let text = unit(&u, "X.thingml");
        assert!(text.contains("property inner : In\n"), "{text}");
        assert!(text.contains("p!out(inner, 0)"), "{text}");
        let x = u.iter().find(|u| u.file_name == "X.thingml").unwrap();
        assert_eq!(x.provenance_of(ConstructKind::Carrier).count(), 1);
    }

    #[test]
    fn invalid_models_are_refused() {
        let m = parse_str("system S { element X { part y: Missing } }").unwrap();
        assert!(matches!(generate(&m), Err(GenerateError::Invalid(_))));
    }

    #[test]
    fn output_is_deterministic() {
        let src = "system S { payload P { a: int } interface I { op f(x: int) }
                   element A { provides port p: I } board B { requires port q: I part a: A connect a.p -> q }
                   entity e { part b: B } }";
        let first = units(src);
        for _ in 0..5 {
            assert_eq!(units(src), first);
        }
        assert!(unit(&first, "configuration.thingml").contains("connector e_b.q => e_b_a.p"));
    }
}
