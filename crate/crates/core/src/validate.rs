//! Well-formedness rules over a parsed [`Model`].
//!
//! Every rule has a stable code (see [`RULES`]). [`validate`] runs them all
//! and returns every finding in source order. Checks that need the flattened
//! instance tree are skipped when the tree cannot be built; the unresolved
//! part or containment cycle that prevents it is reported instead.

use std::collections::{HashMap, HashSet};

use crate::diag::{codes::*, Diagnostic};
use crate::instance::{instance_tree, member, split_target, InstanceModel, Lookup};
use crate::model::*;

/// A validation rule: stable code and what it checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleId {
    pub code: &'static str,
    pub description: &'static str,
}

pub const RULES: &[RuleId] = &[
    RuleId { code: V_STATE_EVENTS, description: "every state links an entry and an exit event" },
    RuleId {
        code: V_PORT_MATCH,
        description: "connections join a provided-facing and a required-facing port of the same interface",
    },
    RuleId {
        code: V_ACTION_DIRECTION,
        description: "send actions run on outgoing events, receive actions on incoming events",
    },
    RuleId { code: V_EVENT_PORT, description: "incoming and outgoing events name a port; generic events do not" },
    RuleId { code: V_SM_INITIAL, description: "a statemachine has exactly one initial state" },
    RuleId { code: V_GUARD_TYPE, description: "guards are boolean comparisons over declared properties" },
    RuleId { code: V_ALLOC_MISSING, description: "annotated instances have an allocated ancestor" },
    RuleId { code: V_ALLOC_CORE, description: "allocations target a declared core" },
    RuleId { code: V_RT_VALUES, description: "wcet, deadline, period and priority are positive" },
    RuleId { code: V_ENTITY_PARTS, description: "entities contain only boards and power sources" },
    RuleId { code: V_PAYLOAD_CYCLE, description: "payloads do not contain themselves" },
    RuleId { code: V_DUP_NAME, description: "names are unique within their scope" },
    RuleId { code: V_UNRESOLVED, description: "references name declared items" },
    RuleId { code: V_ELEMENT_PARTS, description: "elements and boards contain only elements" },
    RuleId { code: V_ENTITY_PORTS, description: "entities declare no ports" },
    RuleId { code: V_CONTAINMENT_CYCLE, description: "components do not contain themselves" },
    RuleId { code: V_PROP_INIT, description: "property initial values match the property type" },
    RuleId { code: V_ASSIGN_TYPE, description: "assigned values match the property type" },
    RuleId { code: V_HW_EMPTY, description: "every processor has at least one core" },
    RuleId { code: V_UNREACHABLE, description: "states are reachable from the initial state (warning)" },
    RuleId { code: V_RT_WCET_PERIOD, description: "wcet does not exceed the period (warning)" },
];

/// Runs every rule. An empty result means the model is valid.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let mut v = Validator { model, diags: Vec::new() };
    v.top_level_names();
    v.payloads();
    v.interfaces();
    for c in model.components() {
        v.component(c);
    }
    let tree_ok = v.containment();
    v.hardware();
    let tree = if tree_ok { instance_tree(model, false).ok() } else { None };
    v.allocations(tree.as_ref());
    v.rt_annotations(tree.as_ref());
    let mut diags = v.diags;
    diags.sort_by_key(|d| (d.line, d.column));
    diags
}

/// Type of a guard expression over a component's properties. Arithmetic is
/// not part of the guard language. Callers require `bool` at use sites.
pub fn typecheck_guard(guard: &Expr, component: &Component) -> Result<SemType, Diagnostic> {
    type_of(guard, component, false).map_err(|e| Diagnostic::error(V_GUARD_TYPE, e.loc, e.message))
}

struct TypeError {
    unresolved: bool,
    loc: Loc,
    message: String,
}

fn expr_loc(e: &Expr) -> Loc {
    match e {
        Expr::Prop(_, loc) => *loc,
        Expr::Lit(_) => Loc::default(),
        Expr::Unary(_, inner) => expr_loc(inner),
        Expr::Binary(_, l, _) => expr_loc(l),
    }
}

fn type_of(e: &Expr, component: &Component, arithmetic: bool) -> Result<SemType, TypeError> {
    let err = |loc: Loc, message: String| TypeError { unresolved: false, loc, message };
    match e {
        Expr::Lit(l) => Ok(l.sem_type()),
        Expr::Prop(name, loc) => component.property(name).map(|p| p.ty.clone()).ok_or_else(|| TypeError {
            unresolved: true,
            loc: *loc,
            message: format!("{} has no property {name}", component.name),
        }),
        Expr::Unary(UnaryOp::Not, inner) => match type_of(inner, component, arithmetic)? {
            SemType::Bool => Ok(SemType::Bool),
            t => Err(err(expr_loc(inner), format!("`not` needs a bool operand, found {t}"))),
        },
        Expr::Unary(UnaryOp::Neg, inner) => match type_of(inner, component, arithmetic)? {
            t if t.is_numeric() => Ok(t),
            t => Err(err(expr_loc(inner), format!("`-` needs a numeric operand, found {t}"))),
        },
        Expr::Binary(op, lhs, rhs) => {
            let loc = expr_loc(lhs);
            if op.is_arithmetic() && !arithmetic {
                return Err(err(loc, format!("arithmetic `{}` is not allowed in a guard", op.symbol())));
            }
            let l = type_of(lhs, component, arithmetic)?;
            let r = type_of(rhs, component, arithmetic)?;
            let mismatch = || err(loc, format!("operator `{}` cannot combine {l} and {r}", op.symbol()));
            match op {
                BinOp::And | BinOp::Or => {
                    if l == SemType::Bool && r == SemType::Bool {
                        Ok(SemType::Bool)
                    } else {
                        Err(mismatch())
                    }
                }
                BinOp::Eq | BinOp::Ne => {
                    let ok =
                        (l.is_numeric() && r.is_numeric()) || (l == r && matches!(l, SemType::Bool | SemType::String));
                    if ok {
                        Ok(SemType::Bool)
                    } else {
                        Err(mismatch())
                    }
                }
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                    if l.is_numeric() && r.is_numeric() {
                        Ok(SemType::Bool)
                    } else {
                        Err(mismatch())
                    }
                }
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                    if !(l.is_numeric() && r.is_numeric()) {
                        Err(mismatch())
                    } else if l == SemType::Float || r == SemType::Float {
                        Ok(SemType::Float)
                    } else {
                        Ok(SemType::Int)
                    }
                }
            }
        }
    }
}

struct Validator<'m> {
    model: &'m Model,
    diags: Vec<Diagnostic>,
}

impl<'m> Validator<'m> {
    fn error(&mut self, code: &str, loc: Loc, message: String) {
        self.diags.push(Diagnostic::error(code, loc, message));
    }

    fn warning(&mut self, code: &str, loc: Loc, message: String) {
        self.diags.push(Diagnostic::warning(code, loc, message));
    }

    /// Reports every repeat of a name after its first declaration.
    fn unique<'a>(&mut self, what: &str, scope: &str, items: impl IntoIterator<Item = (&'a str, Loc)>) {
        let mut seen = HashSet::new();
        for (name, loc) in items {
            if !seen.insert(name) {
                self.error(V_DUP_NAME, loc, format!("duplicate {what} {name}{scope}"));
            }
        }
    }

    fn check_type(&mut self, ty: &SemType, loc: Loc, context: &str) {
        if let SemType::Payload(name) = ty {
            if self.model.payload(name).is_none() {
                self.error(V_UNRESOLVED, loc, format!("{context} has unknown type {name}"));
            }
        }
    }

    fn top_level_names(&mut self) {
        let m = self.model;
        self.unique("payload", "", m.payloads.iter().map(|p| (p.name.as_str(), p.loc)));
        self.unique("interface", "", m.interfaces.iter().map(|i| (i.name.as_str(), i.loc)));
        self.unique("component", "", m.components().map(|c| (c.name.as_str(), c.loc)));
        self.unique("processor", "", m.hardware.processors.iter().map(|p| (p.name.as_str(), p.loc)));
    }

    fn payloads(&mut self) {
        let m = self.model;
        for p in &m.payloads {
            let scope = format!(" in payload {}", p.name);
            self.unique("attribute", &scope, p.attributes.iter().map(|a| (a.name.as_str(), a.loc)));
            for a in &p.attributes {
                self.check_type(&a.ty, a.loc, &format!("attribute {}.{}", p.name, a.name));
            }
        }
        // Report each containment cycle once, at its first payload.
        let mut reported: HashSet<&str> = HashSet::new();
        for p in &m.payloads {
            if reported.contains(p.name.as_str()) {
                continue;
            }
            if let Some(cycle) = payload_cycle(m, &p.name) {
                reported.extend(cycle.iter().copied());
                self.error(
                    V_PAYLOAD_CYCLE,
                    p.loc,
                    format!("payload {} contains itself: {}", p.name, cycle.join(" -> ")),
                );
            }
        }
    }

    fn interfaces(&mut self) {
        for i in &self.model.interfaces {
            let scope = format!(" in interface {}", i.name);
            self.unique("operation", &scope, i.operations.iter().map(|o| (o.name.as_str(), o.loc)));
            for op in &i.operations {
                let scope = format!(" in operation {}.{}", i.name, op.name);
                self.unique("parameter", &scope, op.params.iter().map(|p| (p.name.as_str(), p.loc)));
                for p in &op.params {
                    self.check_type(&p.ty, p.loc, &format!("parameter {} of {}.{}", p.name, i.name, op.name));
                }
                if let Some(t) = &op.return_type {
                    self.check_type(t, op.loc, &format!("operation {}.{}", i.name, op.name));
                }
            }
        }
    }

    fn component(&mut self, c: &'m Component) {
        let m = self.model;
        let scope = format!(" in {}", c.name);
        self.unique("property", &scope, c.properties.iter().map(|p| (p.name.as_str(), p.loc)));
        self.unique("port", &scope, c.ports.iter().map(|p| (p.name.as_str(), p.loc)));
        self.unique("part", &scope, c.parts.iter().map(|p| (p.name.as_str(), p.loc)));

        for p in &c.properties {
            self.check_type(&p.ty, p.loc, &format!("property {}.{}", c.name, p.name));
            if let Some(init) = &p.init {
                let lit_ty = init.sem_type();
                let ok = !matches!(p.ty, SemType::Payload(_)) && p.ty.accepts(&lit_ty);
                if !ok {
                    self.error(
                        V_PROP_INIT,
                        p.loc,
                        format!("property {}.{} of type {} cannot start as {init}", c.name, p.name, p.ty),
                    );
                }
            }
        }

        for p in &c.ports {
            if c.kind == ComponentKind::Entity {
                self.error(V_ENTITY_PORTS, p.loc, format!("entity {} declares port {}", c.name, p.name));
            }
            if m.interface(&p.interface).is_none() {
                self.error(
                    V_UNRESOLVED,
                    p.loc,
                    format!("port {}.{} uses unknown interface {}", c.name, p.name, p.interface),
                );
            }
        }

        for part in &c.parts {
            let Some(child) = m.component(&part.component) else {
                self.error(
                    V_UNRESOLVED,
                    part.loc,
                    format!("part {}.{} has unknown type {}", c.name, part.name, part.component),
                );
                continue;
            };
            match c.kind {
                ComponentKind::Entity => {
                    let ok = child.kind == ComponentKind::Board
                        || (child.kind == ComponentKind::Element && child.power_source);
                    if !ok {
                        self.error(
                            V_ENTITY_PARTS,
                            part.loc,
                            format!(
                                "entity {} contains part {} of {} {}; only boards and power sources are allowed",
                                c.name, part.name, child.kind, child.name
                            ),
                        );
                    }
                }
                ComponentKind::Element | ComponentKind::Board => {
                    if child.kind != ComponentKind::Element {
                        self.error(
                            V_ELEMENT_PARTS,
                            part.loc,
                            format!(
                                "{} {} contains part {} of {} {}; only elements are allowed",
                                c.kind, c.name, part.name, child.kind, child.name
                            ),
                        );
                    }
                }
            }
        }

        for conn in &c.connections {
            self.connection(c, conn);
        }

        if let Some(sm) = &c.statemachine {
            self.statemachine(c, sm);
        }
    }

    /// Resolves a connection end to its port, reporting what is missing.
    fn endpoint(&mut self, c: &'m Component, end: &PortRef, loc: Loc) -> Option<&'m Port> {
        let m = self.model;
        let owner = match &end.part {
            None => c,
            Some(part) => {
                let Some(part_decl) = c.part(part) else {
                    self.error(V_UNRESOLVED, loc, format!("connection end {end} in {}: no part {part}", c.name));
                    return None;
                };
                // Unknown part types are reported with the part.
                m.component(&part_decl.component)?
            }
        };
        let port = owner.port(&end.port);
        if port.is_none() {
            self.error(
                V_UNRESOLVED,
                loc,
                format!("connection end {end} in {}: {} has no port {}", c.name, owner.name, end.port),
            );
        }
        port
    }

    fn connection(&mut self, c: &'m Component, conn: &Connection) {
        let from = self.endpoint(c, &conn.from, conn.loc);
        let to = self.endpoint(c, &conn.to, conn.loc);
        let (Some(from), Some(to)) = (from, to) else { return };
        let m = self.model;
        if m.interface(&from.interface).is_none() || m.interface(&to.interface).is_none() {
            return;
        }
        if from.interface != to.interface {
            self.error(
                V_PORT_MATCH,
                conn.loc,
                format!(
                    "connection {} -> {} in {} joins interface {} with {}",
                    conn.from, conn.to, c.name, from.interface, to.interface
                ),
            );
            return;
        }
        let compatible = (from.direction.provides() && to.direction.requires())
            || (from.direction.requires() && to.direction.provides());
        if !compatible {
            self.error(
                V_PORT_MATCH,
                conn.loc,
                format!(
                    "connection {} -> {} in {} joins two {} ports",
                    conn.from,
                    conn.to,
                    c.name,
                    if from.direction.provides() { "provided" } else { "required" }
                ),
            );
        }
    }

    fn statemachine(&mut self, c: &'m Component, sm: &'m StateMachine) {
        let scope = format!(" in {}", c.name);
        self.unique("state", &scope, sm.states.iter().map(|s| (s.name.as_str(), s.loc)));
        self.unique("event", &scope, sm.events.iter().map(|e| (e.name.as_str(), e.loc)));
        self.unique("action", &scope, sm.actions.iter().map(|a| (a.name.as_str(), a.loc)));

        let initials = sm.states.iter().filter(|s| s.initial).count();
        if initials != 1 {
            self.error(
                V_SM_INITIAL,
                sm.loc,
                format!("statemachine of {} has {initials} initial states; exactly one is required", c.name),
            );
        }

        for s in &sm.states {
            let missing: Vec<&str> = [("entry", &s.on_entry), ("exit", &s.on_exit)]
                .into_iter()
                .filter(|(_, ev)| ev.is_none())
                .map(|(k, _)| k)
                .collect();
            if !missing.is_empty() {
                self.error(
                    V_STATE_EVENTS,
                    s.loc,
                    format!("state {} of {} has no {} event", s.name, c.name, missing.join(" or ")),
                );
            }
            let refs = s.on_entry.iter().chain(&s.on_exit).chain(&s.internal_events);
            for ev in refs {
                if sm.event(ev).is_none() {
                    self.error(V_UNRESOLVED, s.loc, format!("state {} of {} links unknown event {ev}", s.name, c.name));
                }
            }
        }

        for e in &sm.events {
            match (e.kind, &e.port) {
                (EventKind::Incoming | EventKind::Outgoing, None) => self.error(
                    V_EVENT_PORT,
                    e.loc,
                    format!("{} event {} of {} names no port", e.kind.keyword(), e.name, c.name),
                ),
                (EventKind::Generic, Some(p)) => self.error(
                    V_EVENT_PORT,
                    e.loc,
                    format!("generic event {} of {} is bound to port {p}", e.name, c.name),
                ),
                (_, Some(p)) if c.port(p).is_none() => {
                    self.error(V_UNRESOLVED, e.loc, format!("event {} of {} uses unknown port {p}", e.name, c.name))
                }
                _ => {}
            }
            match sm.action(&e.action) {
                None => self.error(
                    V_UNRESOLVED,
                    e.loc,
                    format!("event {} of {} does unknown action {}", e.name, c.name, e.action),
                ),
                Some(a) => {
                    let wrong = match a.kind {
                        ActionKind::Send { .. } => (e.kind != EventKind::Outgoing).then_some("send"),
                        ActionKind::Receive { .. } => (e.kind != EventKind::Incoming).then_some("receive"),
                        ActionKind::Assign { .. } => None,
                    };
                    if let Some(verb) = wrong {
                        let needed = if verb == "send" { "outgoing" } else { "incoming" };
                        self.error(
                            V_ACTION_DIRECTION,
                            e.loc,
                            format!(
                                "{} event {} of {} does {verb} action {}; {verb} needs an {needed} event",
                                e.kind.keyword(),
                                e.name,
                                c.name,
                                a.name
                            ),
                        );
                    }
                }
            }
        }

        for a in &sm.actions {
            match &a.kind {
                ActionKind::Send { payload } | ActionKind::Receive { payload } => {
                    if self.model.payload(payload).is_none() {
                        self.error(
                            V_UNRESOLVED,
                            a.loc,
                            format!("action {} of {} uses unknown payload {payload}", a.name, c.name),
                        );
                    }
                }
                ActionKind::Assign { property, value } => {
                    let target = c.property(property);
                    if target.is_none() {
                        self.error(
                            V_UNRESOLVED,
                            a.loc,
                            format!("action {} of {} sets unknown property {property}", a.name, c.name),
                        );
                    }
                    match type_of(value, c, true) {
                        Err(e) => self.error(if e.unresolved { V_UNRESOLVED } else { V_ASSIGN_TYPE }, a.loc, e.message),
                        Ok(t) => {
                            if let Some(p) = target {
                                if !p.ty.accepts(&t) || matches!(p.ty, SemType::Payload(_)) {
                                    self.error(
                                        V_ASSIGN_TYPE,
                                        a.loc,
                                        format!("action {} assigns {t} to {} property {property}", a.name, p.ty),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }

        for t in &sm.transitions {
            for s in [&t.source, &t.target] {
                if sm.state(s).is_none() {
                    self.error(V_UNRESOLVED, t.loc, format!("transition in {} names unknown state {s}", c.name));
                }
            }
            if let Some(ev) = &t.trigger {
                if sm.event(ev).is_none() {
                    self.error(V_UNRESOLVED, t.loc, format!("transition in {} names unknown event {ev}", c.name));
                }
            }
            if let Some(g) = &t.guard {
                match typecheck_guard(g, c) {
                    Ok(SemType::Bool) => {}
                    Ok(other) => self.error(
                        V_GUARD_TYPE,
                        t.loc,
                        format!(
                            "guard of transition {} -> {} in {} has type {other}, expected bool",
                            t.source, t.target, c.name
                        ),
                    ),
                    Err(d) => self.diags.push(Diagnostic { line: t.loc.line, column: t.loc.column, ..d }),
                }
            }
        }

        if let Some(init) = sm.initial() {
            let mut reached: HashSet<&str> = HashSet::from([init.name.as_str()]);
            let mut frontier = vec![init.name.as_str()];
            while let Some(s) = frontier.pop() {
                for t in sm.transitions.iter().filter(|t| t.source == s) {
                    if reached.insert(t.target.as_str()) {
                        frontier.push(&t.target);
                    }
                }
            }
            for s in &sm.states {
                if !reached.contains(s.name.as_str()) {
                    self.warning(
                        V_UNREACHABLE,
                        s.loc,
                        format!("state {} of {} is unreachable from {}", s.name, c.name, init.name),
                    );
                }
            }
        }
    }

    /// Reports containment cycles. Returns whether the instance tree can be
    /// built (no cycles, no unresolved part reachable from an entity).
    fn containment(&mut self) -> bool {
        let m = self.model;
        let mut ok = true;
        let mut reported: HashSet<&str> = HashSet::new();
        for c in m.components() {
            if reported.contains(c.name.as_str()) {
                continue;
            }
            if let Some(cycle) = containment_cycle(m, &c.name) {
                ok = false;
                reported.extend(cycle.iter().copied());
                self.error(
                    V_CONTAINMENT_CYCLE,
                    c.loc,
                    format!("component {} contains itself: {}", c.name, cycle.join(" -> ")),
                );
            }
        }
        let unresolved = m.components().any(|c| c.parts.iter().any(|p| m.component(&p.component).is_none()));
        ok && !unresolved
    }

    fn hardware(&mut self) {
        for p in &self.model.hardware.processors {
            if p.cores.is_empty() {
                self.error(V_HW_EMPTY, p.loc, format!("processor {} has no cores", p.name));
            }
            let scope = format!(" in processor {}", p.name);
            self.unique("core", &scope, p.cores.iter().map(|c| (c.name.as_str(), c.loc)));
        }
    }

    fn allocations(&mut self, tree: Option<&InstanceModel>) {
        let m = self.model;
        self.unique("allocation of", "", m.allocations.iter().map(|a| (a.instance.as_str(), a.loc)));
        for a in &m.allocations {
            if !m.hardware.has_core(&a.core) {
                self.error(
                    V_ALLOC_CORE,
                    a.loc,
                    format!("allocation of {} targets unknown core {}", a.instance, a.core),
                );
            }
            if let Some(tree) = tree {
                if tree.get(&a.instance).is_none() {
                    self.error(V_UNRESOLVED, a.loc, format!("allocation target {} is not an instance", a.instance));
                }
            }
        }
    }

    fn rt_annotations(&mut self, tree: Option<&InstanceModel>) {
        let m = self.model;
        self.unique("rt annotation for", "", m.rt_annotations.iter().map(|r| (r.target.as_str(), r.loc)));
        let allocated: HashMap<&str, &Allocation> = m.allocations.iter().map(|a| (a.instance.as_str(), a)).collect();
        for rt in &m.rt_annotations {
            let period = rt.pattern.period();
            let mut bad = Vec::new();
            if rt.wcet == Micros::ZERO {
                bad.push("wcet");
            }
            if rt.deadline == Micros::ZERO {
                bad.push("deadline");
            }
            if period == Micros::ZERO {
                bad.push("period");
            }
            if rt.priority == 0 {
                bad.push("priority");
            }
            if !bad.is_empty() {
                self.error(
                    V_RT_VALUES,
                    rt.loc,
                    format!("rt annotation for {} needs positive {}", rt.target, bad.join(", ")),
                );
            } else if rt.wcet > period {
                self.warning(
                    V_RT_WCET_PERIOD,
                    rt.loc,
                    format!("rt annotation for {}: wcet {} exceeds period {period}", rt.target, rt.wcet),
                );
            }

            let Some(tree) = tree else { continue };
            let resolved = split_target(&rt.target).and_then(|(path, name)| {
                let inst = tree.get(path)?;
                Some((path, name, m.component(&inst.component)?))
            });
            let Some((path, name, component)) = resolved else {
                self.error(V_UNRESOLVED, rt.loc, format!("rt target {} does not name an instance member", rt.target));
                continue;
            };
            // Members of ports with unknown interfaces are already reported.
            let dangling_iface = component.ports.iter().any(|p| m.interface(&p.interface).is_none());
            match member(m, component, name) {
                Lookup::Operation(_) | Lookup::Event(_) | Lookup::Action(_) => {}
                _ if dangling_iface => continue,
                _ => {
                    self.error(
                        V_UNRESOLVED,
                        rt.loc,
                        format!("rt target {}: {} has no operation, event or action {name}", rt.target, component.name),
                    );
                    continue;
                }
            }
            let mut covered = false;
            let mut idx = tree.index_of(path);
            while let Some(i) = idx {
                if allocated.contains_key(tree.instances[i].path.as_str()) {
                    covered = true;
                    break;
                }
                idx = tree.instances[i].parent;
            }
            if !covered {
                self.error(
                    V_ALLOC_MISSING,
                    rt.loc,
                    format!("rt target {} has no allocated instance on its path", rt.target),
                );
            }
        }
    }
}

/// The payload-containment cycle through `start`, if any, as the list of
/// payload names starting and ending with `start`.
fn payload_cycle<'m>(m: &'m Model, start: &'m str) -> Option<Vec<&'m str>> {
    fn children<'m>(m: &'m Model, name: &str) -> Vec<&'m str> {
        m.payload(name)
            .map(|p| {
                p.attributes
                    .iter()
                    .filter_map(|a| match &a.ty {
                        SemType::Payload(n) => Some(n.as_str()),
                        _ => None,
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
    find_cycle(start, &|n| children(m, n))
}

fn containment_cycle<'m>(m: &'m Model, start: &'m str) -> Option<Vec<&'m str>> {
    find_cycle(start, &|n| {
        m.component(n).map(|c| c.parts.iter().map(|p| p.component.as_str()).collect()).unwrap_or_default()
    })
}

/// Depth-first search for a path from `start` back to itself.
fn find_cycle<'m>(start: &'m str, children: &dyn Fn(&str) -> Vec<&'m str>) -> Option<Vec<&'m str>> {
    fn dfs<'m>(
        node: &'m str,
        start: &'m str,
        children: &dyn Fn(&str) -> Vec<&'m str>,
        path: &mut Vec<&'m str>,
        visited: &mut HashSet<&'m str>,
    ) -> bool {
        for child in children(node) {
            if child == start {
                path.push(child);
                return true;
            }
            if visited.insert(child) {
                path.push(child);
                if dfs(child, start, children, path, visited) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let mut path = vec![start];
    let mut visited = HashSet::from([start]);
    dfs(start, start, children, &mut path, &mut visited).then_some(path)
}
