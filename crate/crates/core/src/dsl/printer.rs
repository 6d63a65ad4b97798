//! Canonical text form of a [`Model`].
//!
//! Declarations are grouped by category (payloads, interfaces, elements,
//! boards, entities, processors, allocations, rt blocks) and keep their
//! order within a category. Indentation is four spaces.

use std::fmt::Write;

use crate::model::*;

const INDENT: &str = "    ";

pub fn serialize_model(model: &Model) -> String {
    let mut out = String::new();
    let mut w = Printer { out: &mut out };
    w.model(model);
    out
}

struct Printer<'a> {
    out: &'a mut String,
}

impl Printer<'_> {
    fn line(&mut self, depth: usize, text: impl AsRef<str>) {
        for _ in 0..depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text.as_ref());
        self.out.push('\n');
    }

    fn model(&mut self, m: &Model) {
        self.line(0, format!("system {} {{", m.name));
        let mut first = true;
        let mut gap = |p: &mut Self| {
            if !first {
                p.out.push('\n');
            }
            first = false;
        };
        for p in &m.payloads {
            gap(self);
            let fields: Vec<String> = p.attributes.iter().map(|a| format!("{}: {}", a.name, a.ty)).collect();
            if fields.is_empty() {
                self.line(1, format!("payload {} {{ }}", p.name));
            } else {
                self.line(1, format!("payload {} {{ {} }}", p.name, fields.join(", ")));
            }
        }
        for i in &m.interfaces {
            gap(self);
            if i.operations.is_empty() {
                self.line(1, format!("interface {} {{ }}", i.name));
                continue;
            }
            self.line(1, format!("interface {} {{", i.name));
            for op in &i.operations {
                let params: Vec<String> = op.params.iter().map(|a| format!("{}: {}", a.name, a.ty)).collect();
                let ret = op.return_type.as_ref().map(|t| format!(" -> {t}")).unwrap_or_default();
                self.line(2, format!("op {}({}){ret}", op.name, params.join(", ")));
            }
            self.line(1, "}");
        }
        for c in m.components() {
            gap(self);
            self.component(c);
        }
        for p in &m.hardware.processors {
            gap(self);
            let cores: String = p.cores.iter().map(|c| format!(" core {}", c.name)).collect();
            self.line(1, format!("processor {} {{{cores} }}", p.name));
        }
        if !m.allocations.is_empty() {
            gap(self);
            for a in &m.allocations {
                self.line(1, format!("allocate {} -> {}", a.instance, a.core));
            }
        }
        for rt in &m.rt_annotations {
            gap(self);
            let pattern = match rt.pattern {
                ArrivalPattern::Periodic(t) => format!("periodic {t}"),
                ArrivalPattern::Sporadic(t) => format!("sporadic {t}"),
            };
            self.line(
                1,
                format!(
                    "rt {} {{ {pattern} wcet {} deadline {} priority {} }}",
                    rt.target, rt.wcet, rt.deadline, rt.priority
                ),
            );
        }
        self.line(0, "}");
    }

    fn component(&mut self, c: &Component) {
        let power = if c.power_source { "power " } else { "" };
        let empty = c.properties.is_empty()
            && c.ports.is_empty()
            && c.parts.is_empty()
            && c.connections.is_empty()
            && c.statemachine.is_none();
        if empty {
            self.line(1, format!("{power}{} {} {{ }}", c.kind, c.name));
            return;
        }
        self.line(1, format!("{power}{} {} {{", c.kind, c.name));
        for p in &c.properties {
            let init = p.init.as_ref().map(|l| format!(" = {l}")).unwrap_or_default();
            self.line(2, format!("property {}: {}{init};", p.name, p.ty));
        }
        for p in &c.ports {
            self.line(2, format!("{} port {}: {};", p.direction.keyword(), p.name, p.interface));
        }
        for p in &c.parts {
            self.line(2, format!("part {}: {};", p.name, p.component));
        }
        for k in &c.connections {
            self.line(2, format!("connect {} -> {};", k.from, k.to));
        }
        if let Some(sm) = &c.statemachine {
            self.statemachine(sm);
        }
        self.line(1, "}");
    }

    fn statemachine(&mut self, sm: &StateMachine) {
        self.line(2, "statemachine {");
        for s in &sm.states {
            let mut text = String::new();
            if s.initial {
                text.push_str("initial ");
            }
            let _ = write!(text, "state {} {{", s.name);
            if let Some(e) = &s.on_entry {
                let _ = write!(text, " entry {e}");
            }
            if let Some(e) = &s.on_exit {
                let _ = write!(text, " exit {e}");
            }
            if !s.internal_events.is_empty() {
                let _ = write!(text, " internal {}", s.internal_events.join(" "));
            }
            text.push_str(" }");
            self.line(3, text);
        }
        for t in &sm.transitions {
            let mut text = format!("transition {} -> {}", t.source, t.target);
            if let Some(ev) = &t.trigger {
                let _ = write!(text, " on {ev}");
            }
            if let Some(g) = &t.guard {
                let _ = write!(text, " [{g}]");
            }
            self.line(3, text);
        }
        for e in &sm.events {
            let via = e.port.as_ref().map(|p| format!(" via {p}")).unwrap_or_default();
            self.line(3, format!("event {} {}{via} does {}", e.name, e.kind.keyword(), e.action));
        }
        for a in &sm.actions {
            let body = match &a.kind {
                ActionKind::Send { payload } => format!("send {payload}"),
                ActionKind::Receive { payload } => format!("receive {payload}"),
                ActionKind::Assign { property, value } => format!("set {property} = {value}"),
            };
            self.line(3, format!("action {} {body}", a.name));
        }
        self.line(2, "}");
    }
}
