use std::collections::{BTreeMap, HashMap};

use super::names::{lower_camel, Namespace};
use super::{ConstructKind, Provenance, ThingmlUnit};
use crate::instance::{InstanceModel, InstancePort};
use crate::model::*;

pub const DATATYPES_FILE: &str = "datatypes.thingml";
pub const MESSAGES_FILE: &str = "messages.thingml";
pub const CONFIGURATION_FILE: &str = "configuration.thingml";

const PRIMITIVES: [(&str, u8, &str); 4] =
    [("Integer", 4, "Integer"), ("Double", 8, "Real"), ("Boolean", 1, "Boolean"), ("String", 2, "String")];

/// Indented line buffer.
#[derive(Default)]
struct Out {
    text: String,
    depth: usize,
}

impl Out {
    fn line(&mut self, s: impl AsRef<str>) {
        let s = s.as_ref();
        if !s.is_empty() {
            for _ in 0..self.depth {
                self.text.push_str("    ");
            }
            self.text.push_str(s);
        }
        self.text.push('\n');
    }

    fn open(&mut self, s: impl AsRef<str>) {
        self.line(s);
        self.depth += 1;
    }

    fn close(&mut self, s: impl AsRef<str>) {
        self.depth -= 1;
        self.line(s);
    }

    /// `head do ... end`, collapsed to one line when there are no statements.
    fn block(&mut self, head: &str, statements: &[String]) {
        if statements.is_empty() {
            self.line(format!("{head} do end"));
        } else {
            self.open(format!("{head} do"));
            for s in statements {
                self.line(s);
            }
            self.close("end");
        }
    }
}

struct Carrier {
    attribute: String,
    ty: SemType,
    name: String,
    source: String,
}

/// Emitted identifiers of one thing.
struct ThingNames<'m> {
    thing: String,
    properties: HashMap<&'m str, String>,
    ports: HashMap<&'m str, String>,
    functions: Vec<(String, &'m Operation)>,
    statechart: String,
    states: HashMap<&'m str, String>,
    carriers: Vec<Carrier>,
    /// Every name above, for picking local binders.
    scope: Namespace,
}

impl ThingNames<'_> {
    fn property(&self, name: &str) -> String {
        self.properties.get(name).cloned().unwrap_or_else(|| name.to_string())
    }

    fn port(&self, name: &str) -> String {
        self.ports.get(name).cloned().unwrap_or_else(|| name.to_string())
    }

    fn state(&self, name: &str) -> String {
        self.states.get(name).cloned().unwrap_or_else(|| name.to_string())
    }
}

pub struct Generator<'m> {
    model: &'m Model,
    /// Type-level names plus message names; every thing scope starts here.
    global: Namespace,
    objects: HashMap<&'m str, String>,
    messages: HashMap<&'m str, String>,
    fragment: String,
    things: HashMap<&'m str, String>,
    configuration: String,
}

impl<'m> Generator<'m> {
    pub fn new(model: &'m Model) -> Self {
        let mut global = Namespace::default();
        for (name, _, _) in PRIMITIVES {
            global.reserve(name);
        }
        for stem in ["datatypes", "messages", "configuration"] {
            global.reserve(stem);
        }
        let objects = model.payloads.iter().map(|p| (p.name.as_str(), global.claim(&p.name))).collect();
        let fragment = global.claim(&format!("{}Msgs", model.name));
        let things = thing_components(model).map(|c| (c.name.as_str(), global.claim(&c.name))).collect();
        let configuration = global.claim(&model.name);
        let messages = model.payloads.iter().map(|p| (p.name.as_str(), global.claim(&lower_camel(&p.name)))).collect();
        Generator { model, global, objects, messages, fragment, things, configuration }
    }

    pub fn units(&self, instances: &InstanceModel) -> Vec<ThingmlUnit> {
        let mut units = vec![self.datatypes_unit(), self.messages_unit()];
        units.extend(thing_components(self.model).map(|c| self.thing_unit(c)));
        units.push(self.configuration_unit(instances));
        units
    }

    fn header(&self, out: &mut Out) {
        out.line(format!("// Generated from system {}. Do not edit.", self.model.name));
        out.line("");
    }

    fn type_name(&self, ty: &SemType) -> String {
        match ty {
            SemType::Int => "Integer".into(),
            SemType::Float => "Double".into(),
            SemType::Bool => "Boolean".into(),
            SemType::String => "String".into(),
            SemType::Payload(p) => self.objects.get(p.as_str()).cloned().unwrap_or_else(|| p.clone()),
        }
    }

    fn message(&self, payload: &str) -> String {
        self.messages.get(payload).cloned().unwrap_or_else(|| lower_camel(payload))
    }

    fn datatypes_unit(&self) -> ThingmlUnit {
        let mut out = Out::default();
        let mut provenance = Vec::new();
        self.header(&mut out);
        for (name, size, checker) in PRIMITIVES {
            out.line(format!("datatype {name}<{size}>"));
            out.line(format!("    @type_checker \"{checker}\";"));
        }
        for p in &self.model.payloads {
            let name = &self.objects[p.name.as_str()];
            out.line("");
            out.line(format!("object {name}"));
            out.line("    @type_checker \"Object\";");
            provenance.push(prov(ConstructKind::Object, name, &p.name));
        }
        ThingmlUnit { file_name: DATATYPES_FILE.into(), text: out.text, provenance }
    }

    fn messages_unit(&self) -> ThingmlUnit {
        let mut out = Out::default();
        let mut provenance = vec![prov(ConstructKind::Fragment, &self.fragment, &self.model.name)];
        self.header(&mut out);
        out.line(format!("import \"{DATATYPES_FILE}\""));
        out.line("");
        if self.model.payloads.is_empty() {
            out.line(format!("thing fragment {} {{ }}", self.fragment));
        } else {
            out.open(format!("thing fragment {} {{", self.fragment));
            for p in &self.model.payloads {
                let name = self.message(&p.name);
                let params: Vec<String> = message_params(p)
                    .into_iter()
                    .zip(&p.attributes)
                    .map(|(n, a)| format!("{n} : {}", self.type_name(&a.ty)))
                    .collect();
                out.line(format!("message {name}({});", params.join(", ")));
                provenance.push(prov(ConstructKind::Message, &name, &p.name));
            }
            out.close("}");
        }
        ThingmlUnit { file_name: MESSAGES_FILE.into(), text: out.text, provenance }
    }

    fn thing_names(&self, c: &'m Component) -> ThingNames<'m> {
        let mut ns = self.global.clone();
        let thing = self.things[c.name.as_str()].clone();
        let properties = c.properties.iter().map(|p| (p.name.as_str(), ns.claim(&p.name))).collect();
        let ports = c.ports.iter().map(|p| (p.name.as_str(), ns.claim(&p.name))).collect();
        let functions = c.provided_operations(self.model).into_iter().map(|op| (ns.claim(&op.name), op)).collect();
        let statechart = ns.claim(&format!("{}SM", c.name));
        let mut states = HashMap::new();
        let mut carriers: Vec<Carrier> = Vec::new();
        if let Some(sm) = &c.statemachine {
            for s in &sm.states {
                states.insert(s.name.as_str(), ns.claim(&s.name));
            }
            // Payload-typed arguments with no property of the same name to draw from.
            for action in &sm.actions {
                let ActionKind::Send { payload } = &action.kind else { continue };
                let Some(payload) = self.model.payload(payload) else { continue };
                for attr in &payload.attributes {
                    if !matches!(attr.ty, SemType::Payload(_))
                        || matching_property(c, attr).is_some()
                        || carriers.iter().any(|k| k.attribute == attr.name && k.ty == attr.ty)
                    {
                        continue;
                    }
                    carriers.push(Carrier {
                        attribute: attr.name.clone(),
                        ty: attr.ty.clone(),
                        name: ns.claim(&attr.name),
                        source: format!("{}.{}", payload.name, attr.name),
                    });
                }
            }
        }
        ThingNames { thing, properties, ports, functions, statechart, states, carriers, scope: ns }
    }

    fn port_direction(c: &Component, port: &Port) -> &'static str {
        match port.direction {
            PortDirection::Provided => "provided",
            PortDirection::Required => "required",
            PortDirection::Bidirectional if c.kind == ComponentKind::Board => "required",
            PortDirection::Bidirectional => "provided",
        }
    }

    /// Messages sent and received through `port`, in event declaration order.
    fn port_messages(&self, c: &Component, port: &Port) -> (Vec<String>, Vec<String>) {
        let (mut sends, mut receives) = (Vec::new(), Vec::new());
        let Some(sm) = &c.statemachine else { return (sends, receives) };
        for ev in sm.events.iter().filter(|e| e.port.as_deref() == Some(port.name.as_str())) {
            let Some(action) = sm.action(&ev.action) else { continue };
            let (list, payload) = match (&ev.kind, &action.kind) {
                (EventKind::Outgoing, ActionKind::Send { payload }) => (&mut sends, payload),
                (EventKind::Incoming, ActionKind::Receive { payload }) => (&mut receives, payload),
                _ => continue,
            };
            let msg = self.message(payload);
            if !list.contains(&msg) {
                list.push(msg);
            }
        }
        (sends, receives)
    }

    fn send_arguments(&self, c: &Component, names: &ThingNames, payload: &Payload) -> Vec<String> {
        payload
            .attributes
            .iter()
            .map(|attr| {
                if let Some(p) = matching_property(c, attr) {
                    return names.property(&p.name);
                }
                match &attr.ty {
                    SemType::Int => "0".into(),
                    SemType::Float => "0.0".into(),
                    SemType::Bool => "false".into(),
                    SemType::String => "\"\"".into(),
                    SemType::Payload(_) => names
                        .carriers
                        .iter()
                        .find(|k| k.attribute == attr.name && k.ty == attr.ty)
                        .map(|k| k.name.clone())
                        .unwrap_or_else(|| attr.name.clone()),
                }
            })
            .collect()
    }

    /// Statements performing an event's action.
    fn event_statements(&self, c: &Component, names: &ThingNames, sm: &StateMachine, event: &Event) -> Vec<String> {
        let Some(action) = sm.action(&event.action) else { return Vec::new() };
        let rename = |n: &str| names.property(n);
        match (&action.kind, &event.port) {
            (ActionKind::Send { payload }, Some(port)) => {
                let args = self.model.payload(payload).map(|p| self.send_arguments(c, names, p)).unwrap_or_default();
                vec![format!("{}!{}({})", names.port(port), self.message(payload), args.join(", "))]
            }
            (ActionKind::Receive { payload }, Some(port)) => {
                vec![format!("// awaits {}?{}", names.port(port), self.message(payload))]
            }
            (ActionKind::Assign { property, value }, _) => {
                vec![format!("{} = {}", names.property(property), value.render(&rename))]
            }
            (_, None) => Vec::new(),
        }
    }

    fn thing_unit(&self, c: &'m Component) -> ThingmlUnit {
        let names = self.thing_names(c);
        let thing = &names.thing;
        let mut provenance = vec![prov(ConstructKind::Thing, thing, &c.name)];
        let mut sections: Vec<Out> = Vec::new();
        let member = |n: &str| format!("{thing}.{n}");
        let source = |n: &str| format!("{}.{n}", c.name);

        let mut props = Out::default();
        for p in &c.properties {
            let name = names.property(&p.name);
            let init = p.init.as_ref().map(|l| format!(" = {l}")).unwrap_or_default();
            props.line(format!("property {name} : {}{init}", self.type_name(&p.ty)));
            provenance.push(prov(ConstructKind::Property, &member(&name), &source(&p.name)));
        }
        for k in &names.carriers {
            props.line(format!("property {} : {}", k.name, self.type_name(&k.ty)));
            provenance.push(prov(ConstructKind::Carrier, &member(&k.name), &k.source));
        }
        sections.push(props);

        let mut ports = Out::default();
        for p in &c.ports {
            let name = names.port(&p.name);
            let dir = Self::port_direction(c, p);
            let (sends, receives) = self.port_messages(c, p);
            if sends.is_empty() && receives.is_empty() {
                ports.line(format!("{dir} port {name} {{ }}"));
            } else {
                ports.open(format!("{dir} port {name} {{"));
                if !sends.is_empty() {
                    ports.line(format!("sends {}", sends.join(", ")));
                }
                if !receives.is_empty() {
                    ports.line(format!("receives {}", receives.join(", ")));
                }
                ports.close("}");
            }
            provenance.push(prov(ConstructKind::Port, &member(&name), &source(&p.name)));
        }
        sections.push(ports);

        let mut functions = Out::default();
        for (name, op) in &names.functions {
            let mut params_ns = Namespace::default();
            let params: Vec<String> =
                op.params.iter().map(|f| format!("{} : {}", params_ns.claim(&f.name), self.type_name(&f.ty))).collect();
            let ret = op.return_type.as_ref().map(|t| format!(" : {}", self.type_name(t))).unwrap_or_default();
            functions.open(format!("function {name}({}){ret} do", params.join(", ")));
            functions.line(format!("// TODO: implement {}", op.name));
            functions.close("end");
            provenance.push(prov(ConstructKind::Function, &member(name), &source(&op.name)));
        }
        sections.push(functions);

        if let Some(sm) = &c.statemachine {
            sections.push(self.statechart(c, sm, &names, &mut provenance));
        }

        let mut out = Out::default();
        self.header(&mut out);
        out.line(format!("import \"{DATATYPES_FILE}\""));
        out.line(format!("import \"{MESSAGES_FILE}\""));
        out.line("");
        let sections: Vec<Out> = sections.into_iter().filter(|s| !s.text.is_empty()).collect();
        if sections.is_empty() {
            out.line(format!("thing {thing} includes {} {{ }}", self.fragment));
        } else {
            out.line(format!("thing {thing} includes {} {{", self.fragment));
            for (i, s) in sections.iter().enumerate() {
                if i > 0 {
                    out.line("");
                }
                for l in s.text.lines() {
                    if l.is_empty() {
                        out.line("");
                    } else {
                        out.line(format!("    {l}"));
                    }
                }
            }
            out.line("}");
        }
        ThingmlUnit { file_name: format!("{thing}.thingml"), text: out.text, provenance }
    }

    fn statechart(
        &self,
        c: &Component,
        sm: &StateMachine,
        names: &ThingNames,
        provenance: &mut Vec<Provenance>,
    ) -> Out {
        let chart = format!("{}.{}", names.thing, names.statechart);
        let mut out = Out::default();
        let mut sites: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        let init = sm.initial().map(|s| names.state(&s.name)).unwrap_or_default();
        provenance.push(prov(ConstructKind::Statechart, &chart, &c.name));
        out.open(format!("statechart {} init {init} {{", names.statechart));
        for state in &sm.states {
            let sname = names.state(&state.name);
            let here = format!("{chart}.{sname}");
            provenance.push(prov(ConstructKind::State, &here, &format!("{}.{}", c.name, state.name)));
            out.open(format!("state {sname} {{"));
            for (hook, ev) in [("entry", &state.on_entry), ("exit", &state.on_exit)] {
                let Some(ev) = ev.as_deref().and_then(|e| sm.event(e)) else { continue };
                out.block(&format!("on {hook}"), &self.event_statements(c, names, sm, ev));
                sites.entry(&ev.name).or_default().push(format!("{here}.{hook}"));
            }
            for (k, ev) in state.internal_events.iter().filter_map(|e| sm.event(e)).enumerate() {
                out.block("internal action", &self.event_statements(c, names, sm, ev));
                sites.entry(&ev.name).or_default().push(format!("{here}.internal[{k}]"));
            }
            for (i, t) in sm.transitions.iter().enumerate().filter(|(_, t)| t.source == state.name) {
                let target = names.state(&t.target);
                let emitted = format!("{here} -> {target}");
                let tsource = format!("{}.transitions[{i}]", c.name);
                let mut head = format!("transition -> {target}");
                let mut body = Vec::new();
                if let Some(ev) = t.trigger.as_deref().and_then(|e| sm.event(e)) {
                    let action = sm.action(&ev.action);
                    match (ev.kind, action.map(|a| &a.kind), &ev.port) {
                        (EventKind::Incoming, Some(ActionKind::Receive { payload }), Some(port)) => {
                            let bind = names.scope.clone().claim("msg");
                            head.push_str(&format!(" event {bind} : {}?{}", names.port(port), self.message(payload)));
                            if let Some(p) = self.model.payload(payload) {
                                for (param, attr) in message_params(p).into_iter().zip(&p.attributes) {
                                    if let Some(prop) = matching_property(c, attr) {
                                        body.push(format!("{} = {bind}.{param}", names.property(&prop.name)));
                                    }
                                }
                            }
                        }
                        _ => body = self.event_statements(c, names, sm, ev),
                    }
                    sites.entry(&ev.name).or_default().push(emitted.clone());
                }
                if let Some(g) = &t.guard {
                    head.push_str(&format!(" guard ({})", g.render(&|n| names.property(n))));
                    provenance.push(prov(
                        ConstructKind::Guard,
                        &format!("{emitted} guard"),
                        &format!("{tsource}.guard"),
                    ));
                }
                if body.is_empty() {
                    out.line(head);
                } else {
                    out.block(&format!("{head} action"), &body);
                }
                provenance.push(prov(ConstructKind::Transition, &emitted, &tsource));
            }
            out.close("}");
        }
        out.close("}");

        for ev in &sm.events {
            let at = sites.get(ev.name.as_str()).map(|s| s.join(", ")).unwrap_or_default();
            provenance.push(prov(ConstructKind::Event, &at, &format!("{}.{}", c.name, ev.name)));
        }
        for action in &sm.actions {
            let at: Vec<&str> = sm
                .events
                .iter()
                .filter(|e| e.action == action.name)
                .filter_map(|e| sites.get(e.name.as_str()))
                .flatten()
                .map(String::as_str)
                .collect();
            provenance.push(prov(ConstructKind::Action, &at.join(", "), &format!("{}.{}", c.name, action.name)));
        }
        out
    }

    fn emitted_required(&self, instances: &InstanceModel, end: &InstancePort) -> bool {
        instances
            .get(&end.instance)
            .and_then(|i| self.model.component(&i.component))
            .and_then(|c| c.port(&end.port).map(|p| Self::port_direction(c, p) == "required"))
            .unwrap_or(false)
    }

    fn configuration_unit(&self, instances: &InstanceModel) -> ThingmlUnit {
        let mut ns = self.global.clone();
        let mut provenance = vec![prov(ConstructKind::Configuration, &self.configuration, &self.model.name)];
        let mut inst_names: HashMap<&str, String> = HashMap::new();
        let thing_names: HashMap<&str, ThingNames> =
            thing_components(self.model).map(|c| (c.name.as_str(), self.thing_names(c))).collect();
        let mut body = Out::default();
        for inst in instances.component_instances() {
            let name = ns.claim(&inst.path.replace('.', "_"));
            let thing = self.things.get(inst.component.as_str()).cloned().unwrap_or_else(|| inst.component.clone());
            body.line(format!("instance {name} : {thing}"));
            provenance.push(prov(ConstructKind::Instance, &name, &inst.path));
            inst_names.insert(&inst.path, name);
        }
        let mut connectors = Out::default();
        for conn in &instances.connections {
            let (mut left, mut right) = (&conn.from, &conn.to);
            if self.emitted_required(instances, right) && !self.emitted_required(instances, left) {
                std::mem::swap(&mut left, &mut right);
            }
            let end = |e: &InstancePort| {
                let inst = inst_names.get(e.instance.as_str()).cloned().unwrap_or_else(|| e.instance.replace('.', "_"));
                let port = instances
                    .get(&e.instance)
                    .and_then(|i| thing_names.get(i.component.as_str()))
                    .map_or_else(|| e.port.clone(), |n| n.port(&e.port));
                format!("{inst}.{port}")
            };
            let text = format!("{} => {}", end(left), end(right));
            connectors.line(format!("connector {text}"));
            provenance.push(prov(ConstructKind::Connector, &text, &format!("{} -> {}", conn.from, conn.to)));
        }

        let mut out = Out::default();
        self.header(&mut out);
        out.line(format!("import \"{DATATYPES_FILE}\""));
        out.line(format!("import \"{MESSAGES_FILE}\""));
        for c in thing_components(self.model) {
            out.line(format!("import \"{}.thingml\"", self.things[c.name.as_str()]));
        }
        out.line("");
        if body.text.is_empty() && connectors.text.is_empty() {
            out.line(format!("configuration {} {{ }}", self.configuration));
        } else {
            out.line(format!("configuration {} {{", self.configuration));
            for l in body.text.lines() {
                out.line(format!("    {l}"));
            }
            if !connectors.text.is_empty() {
                out.line("");
                for l in connectors.text.lines() {
                    out.line(format!("    {l}"));
                }
            }
            out.line("}");
        }
        ThingmlUnit { file_name: CONFIGURATION_FILE.into(), text: out.text, provenance }
    }
}

fn thing_components(model: &Model) -> impl Iterator<Item = &Component> {
    model.components().filter(|c| c.kind != ComponentKind::Entity)
}

fn prov(kind: ConstructKind, emitted: &str, source: &str) -> Provenance {
    Provenance { kind, emitted: emitted.to_string(), source: source.to_string() }
}

/// Emitted parameter names of a payload's message.
fn message_params(p: &Payload) -> Vec<String> {
    let mut ns = Namespace::default();
    p.attributes.iter().map(|a| ns.claim(&a.name)).collect()
}

/// The property a payload attribute is read from or copied into.
fn matching_property<'c>(c: &'c Component, attr: &Field) -> Option<&'c Property> {
    c.property(&attr.name).filter(|p| p.ty == attr.ty)
}
