//! Flattening of the component hierarchy into an instance model, and
//! dotted-path lookup.
//!
//! Every entity is a root instance named after the entity. Parts expand
//! recursively into instances whose paths join part names with dots
//! (`plant.n1.s1`). Connections declared inside a component are rewritten
//! to the concrete instances they join.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub path: String,
    pub name: String,
    pub component: String,
    pub kind: ComponentKind,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// `(instance path, port name)`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstancePort {
    pub instance: String,
    pub port: String,
}

impl std::fmt::Display for InstancePort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.instance, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceConnection {
    pub from: InstancePort,
    pub to: InstancePort,
    /// Instance whose component declared the connection.
    pub owner: String,
}

/// The flattened design. Instances are stored in pre-order, following
/// declaration order, so parents always precede their children.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceModel {
    pub instances: Vec<Instance>,
    pub connections: Vec<InstanceConnection>,
    /// Direct allocations, by instance path.
    pub allocations: BTreeMap<String, CoreRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("part {part} of {owner} references unknown component {component}")]
    UnresolvedPart { owner: String, part: String, component: String },
    #[error("component {0} contains itself")]
    CyclicContainment(String),
    #[error("connection endpoint {endpoint} in {owner} does not resolve")]
    UnresolvedEndpoint { owner: String, endpoint: String },
    #[error("allocation target {0} is not an instance")]
    AllocationNotFound(String),
}

impl InstanceModel {
    pub fn get(&self, path: &str) -> Option<&Instance> {
        self.index_of(path).map(|i| &self.instances[i])
    }

    pub fn index_of(&self, path: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.path == path)
    }

    pub fn roots(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| i.parent.is_none())
    }

    /// Board and element instances; everything but entity roots.
    pub fn component_instances(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| i.kind != ComponentKind::Entity)
    }

    /// The core an instance runs on: its own allocation or that of the
    /// nearest allocated ancestor.
    pub fn core_of(&self, path: &str) -> Option<&CoreRef> {
        let mut idx = self.index_of(path)?;
        loop {
            let inst = &self.instances[idx];
            if let Some(core) = self.allocations.get(&inst.path) {
                return Some(core);
            }
            idx = inst.parent?;
        }
    }

    /// Component instances that no allocation covers.
    pub fn unallocated(&self) -> Vec<&Instance> {
        self.component_instances().filter(|i| self.core_of(&i.path).is_none()).collect()
    }
}

/// Expands every entity of a validated model.
pub fn build_instance_model(model: &Model) -> Result<InstanceModel, InstanceError> {
    let mut im = instance_tree(model, true)?;
    for alloc in &model.allocations {
        if im.get(&alloc.instance).is_none() {
            return Err(InstanceError::AllocationNotFound(alloc.instance.clone()));
        }
        im.allocations.entry(alloc.instance.clone()).or_insert_with(|| alloc.core.clone());
    }
    Ok(im)
}

/// Expands parts (and optionally connections) without attaching allocations.
pub(crate) fn instance_tree(model: &Model, connections: bool) -> Result<InstanceModel, InstanceError> {
    let mut im = InstanceModel::default();
    for entity in &model.entities {
        let mut stack = Vec::new();
        expand(model, entity, entity.name.clone(), None, &mut stack, connections, &mut im)?;
    }
    Ok(im)
}

fn expand(
    model: &Model,
    component: &Component,
    path: String,
    parent: Option<usize>,
    stack: &mut Vec<String>,
    connections: bool,
    im: &mut InstanceModel,
) -> Result<usize, InstanceError> {
    if stack.contains(&component.name) {
        return Err(InstanceError::CyclicContainment(component.name.clone()));
    }
    stack.push(component.name.clone());
    let idx = im.instances.len();
    let name = path.rsplit('.').next().unwrap_or(&path).to_string();
    im.instances.push(Instance {
        path: path.clone(),
        name,
        component: component.name.clone(),
        kind: component.kind,
        parent,
        children: Vec::new(),
    });
    if let Some(p) = parent {
        im.instances[p].children.push(idx);
    }
    for part in &component.parts {
        let child = model.component(&part.component).ok_or_else(|| InstanceError::UnresolvedPart {
            owner: component.name.clone(),
            part: part.name.clone(),
            component: part.component.clone(),
        })?;
        expand(model, child, format!("{path}.{}", part.name), Some(idx), stack, connections, im)?;
    }
    let declared = if connections { component.connections.as_slice() } else { &[] };
    for conn in declared {
        let resolve = |end: &PortRef| -> Result<InstancePort, InstanceError> {
            let instance = match &end.part {
                Some(part) if component.part(part).is_some() => format!("{path}.{part}"),
                None => path.clone(),
                Some(_) => {
                    return Err(InstanceError::UnresolvedEndpoint {
                        owner: component.name.clone(),
                        endpoint: end.to_string(),
                    })
                }
            };
            Ok(InstancePort { instance, port: end.port.clone() })
        };
        im.connections.push(InstanceConnection {
            from: resolve(&conn.from)?,
            to: resolve(&conn.to)?,
            owner: path.clone(),
        });
    }
    stack.pop();
    Ok(idx)
}

/// What a dotted path names.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lookup<'m> {
    Root(&'m Model),
    /// An instance reached from an entity root through part names.
    Instance {
        component: &'m Component,
    },
    Component(&'m Component),
    Payload(&'m Payload),
    Attribute(&'m Field),
    Interface(&'m Interface),
    Operation(&'m Operation),
    Port(&'m Port),
    Property(&'m Property),
    State(&'m State),
    Event(&'m Event),
    Action(&'m Action),
    Processor(&'m Processor),
    Core(&'m Core),
    NotFound,
}

impl Lookup<'_> {
    pub fn is_found(&self) -> bool {
        !matches!(self, Lookup::NotFound)
    }
}

/// Resolves a dotted path against the declared model.
///
/// A path starting with an entity name walks part names down the instance
/// tree; the last segment may instead name a member of the reached
/// component (port, property, provided operation, state, event, action).
/// Other paths start at a top-level declaration. The empty path is the
/// model itself.
pub fn lookup<'m>(model: &'m Model, path: &str) -> Lookup<'m> {
    if path.is_empty() {
        return Lookup::Root(model);
    }
    let segments: Vec<&str> = path.split('.').collect();
    let (head, rest) = (segments[0], &segments[1..]);

    if let Some(entity) = model.entities.iter().find(|e| e.name == head) {
        let mut current = entity;
        for (i, seg) in rest.iter().enumerate() {
            match current.part(seg).and_then(|p| model.component(&p.component)) {
                Some(child) => current = child,
                None if i == rest.len() - 1 => return member(model, current, seg),
                None => return Lookup::NotFound,
            }
        }
        return Lookup::Instance { component: current };
    }

    if let Some(c) = model.component(head) {
        return match rest {
            [] => Lookup::Component(c),
            [m] => member(model, c, m),
            _ => Lookup::NotFound,
        };
    }
    if let Some(p) = model.payload(head) {
        return match rest {
            [] => Lookup::Payload(p),
            [a] => p.attributes.iter().find(|f| f.name == *a).map_or(Lookup::NotFound, Lookup::Attribute),
            _ => Lookup::NotFound,
        };
    }
    if let Some(i) = model.interface(head) {
        return match rest {
            [] => Lookup::Interface(i),
            [o] => i.operation(o).map_or(Lookup::NotFound, Lookup::Operation),
            _ => Lookup::NotFound,
        };
    }
    if let Some(p) = model.hardware.processor(head) {
        return match rest {
            [] => Lookup::Processor(p),
            [c] => p.cores.iter().find(|k| k.name == *c).map_or(Lookup::NotFound, Lookup::Core),
            _ => Lookup::NotFound,
        };
    }
    Lookup::NotFound
}

/// A named member of a component. Operations win over events, events over
/// actions.
pub fn member<'m>(model: &'m Model, component: &'m Component, name: &str) -> Lookup<'m> {
    if let Some(op) = component.provided_operations(model).into_iter().find(|o| o.name == name) {
        return Lookup::Operation(op);
    }
    if let Some(p) = component.port(name) {
        return Lookup::Port(p);
    }
    if let Some(p) = component.property(name) {
        return Lookup::Property(p);
    }
    if let Some(sm) = &component.statemachine {
        if let Some(e) = sm.event(name) {
            return Lookup::Event(e);
        }
        if let Some(a) = sm.action(name) {
            return Lookup::Action(a);
        }
        if let Some(s) = sm.state(name) {
            return Lookup::State(s);
        }
    }
    Lookup::NotFound
}

/// Splits an rt target into its instance path and member name.
pub fn split_target(target: &str) -> Option<(&str, &str)> {
    target.rsplit_once('.')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_str;

    const BOARD_WITH_TWO_SENSORS: &str = "system S {
        interface I { op read() }
        element Sensor { provides port p: I; }
        board B {
            requires port a: I;
            requires port b: I;
            part s1: Sensor;
            part s2: Sensor;
            connect a -> s1.p;
            connect b -> s2.p;
        }
        entity plant { part n: B; }
        processor P { core c0 }
        allocate plant.n -> P.c0
    }";

    #[test]
    fn board_with_two_sensors() {
        let m = parse_str(BOARD_WITH_TWO_SENSORS).unwrap();
        let im = build_instance_model(&m).unwrap();
        let paths: Vec<&str> = im.instances.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, ["plant", "plant.n", "plant.n.s1", "plant.n.s2"]);
        assert_eq!(im.component_instances().count(), 3);
        assert_eq!(im.connections.len(), 2);
        assert_eq!(im.connections[0].from, InstancePort { instance: "plant.n".into(), port: "a".into() });
        assert_eq!(im.connections[0].to, InstancePort { instance: "plant.n.s1".into(), port: "p".into() });
        assert_eq!(im.core_of("plant.n.s2"), Some(&CoreRef::new("P", "c0")));
        assert_eq!(im.core_of("plant"), None);
        assert!(im.unallocated().is_empty());
    }

    #[test]
    fn no_entities_is_empty() {
        let m = parse_str("system S { element E { } }").unwrap();
        assert_eq!(build_instance_model(&m).unwrap(), InstanceModel::default());
    }

    #[test]
    fn containment_cycle_is_an_error() {
        let m = parse_str("system S { element A { part b: B; } element B { part a: A; } entity e { part x: A; } }")
            .unwrap();
        assert_eq!(build_instance_model(&m), Err(InstanceError::CyclicContainment("A".into())));
    }

    #[test]
    fn unresolved_part_and_allocation() {
        let m = parse_str("system S { entity e { part x: Nope; } }").unwrap();
        assert!(matches!(build_instance_model(&m), Err(InstanceError::UnresolvedPart { .. })));
        let m = parse_str("system S { entity e { } allocate e.q -> P.c }").unwrap();
        assert_eq!(build_instance_model(&m), Err(InstanceError::AllocationNotFound("e.q".into())));
    }

    #[test]
    fn lookup_paths() {
        let m = parse_str(BOARD_WITH_TWO_SENSORS).unwrap();
        assert!(matches!(lookup(&m, ""), Lookup::Root(_)));
        assert!(matches!(lookup(&m, "plant.n.s1"), Lookup::Instance { component } if component.name == "Sensor"));
        assert!(matches!(lookup(&m, "plant.n.s1.read"), Lookup::Operation(op) if op.name == "read"));
        assert!(matches!(lookup(&m, "plant.n.a"), Lookup::Port(_)));
        assert_eq!(lookup(&m, "plant.nope"), Lookup::NotFound);
        assert_eq!(lookup(&m, "plant.nope.deeper"), Lookup::NotFound);
        assert!(matches!(lookup(&m, "P.c0"), Lookup::Core(_)));
        assert!(matches!(lookup(&m, "I.read"), Lookup::Operation(_)));
        assert!(matches!(lookup(&m, "B"), Lookup::Component(_)));
    }
}
