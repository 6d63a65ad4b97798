use thiserror::Error;

use crate::instance::{member, split_target, InstanceModel, Lookup};
use crate::model::{ArrivalPattern, CoreRef, Micros, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Periodic,
    Sporadic,
}

/// One analyzable activity bound to a core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtTask {
    /// Operation path of the annotation (`plant.n1.s1.senseTempHum`).
    pub id: String,
    pub core: CoreRef,
    pub wcet: Micros,
    /// Period, or minimum inter-arrival time for sporadic tasks.
    pub period: Micros,
    pub deadline: Micros,
    /// Larger is higher.
    pub priority: u32,
    pub pattern: PatternKind,
    /// Declaration index of the annotation; breaks priority ties.
    pub order: usize,
}

impl RtTask {
    /// A periodic task on an anonymous core, mostly for tests and examples.
    pub fn periodic(id: impl Into<String>, wcet: Micros, period: Micros, deadline: Micros, priority: u32) -> Self {
        RtTask {
            id: id.into(),
            core: CoreRef::new("P", "c0"),
            wcet,
            period,
            deadline,
            priority,
            pattern: PatternKind::Periodic,
            order: 0,
        }
    }
}

/// Tasks sharing one core, highest priority first. Equal priorities keep
/// declaration order, earlier first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreTaskSet {
    pub core: CoreRef,
    pub tasks: Vec<RtTask>,
}

impl CoreTaskSet {
    pub fn new(core: CoreRef, mut tasks: Vec<RtTask>) -> Self {
        tasks.sort_by(|a, b| b.priority.cmp(&a.priority).then(a.order.cmp(&b.order)));
        CoreTaskSet { core, tasks }
    }

    /// Builds a set from tasks given in priority order (first = highest).
    pub fn from_ordered(core: CoreRef, tasks: Vec<RtTask>) -> Self {
        let n = tasks.len() as u32;
        let tasks = tasks
            .into_iter()
            .enumerate()
            .map(|(i, t)| RtTask { priority: n - i as u32, order: i, core: core.clone(), ..t })
            .collect();
        CoreTaskSet { core, tasks }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("rt target {0} does not name an instance member")]
    UnresolvedTarget(String),
    #[error("rt target {0} has no allocated instance on its path")]
    Unallocated(String),
}

/// One task per rt annotation, grouped by the core of the nearest allocated
/// ancestor. Sets come in hardware declaration order and only cores with at
/// least one task appear.
pub fn derive_tasks(model: &Model, instances: &InstanceModel) -> Result<Vec<CoreTaskSet>, DeriveError> {
    let mut by_core: Vec<(CoreRef, Vec<RtTask>)> = Vec::new();
    for (order, rt) in model.rt_annotations.iter().enumerate() {
        let (path, name) = split_target(&rt.target).ok_or_else(|| DeriveError::UnresolvedTarget(rt.target.clone()))?;
        let component = instances
            .get(path)
            .and_then(|inst| model.component(&inst.component))
            .ok_or_else(|| DeriveError::UnresolvedTarget(rt.target.clone()))?;
        if !matches!(member(model, component, name), Lookup::Operation(_) | Lookup::Event(_) | Lookup::Action(_)) {
            return Err(DeriveError::UnresolvedTarget(rt.target.clone()));
        }
        let core = instances.core_of(path).ok_or_else(|| DeriveError::Unallocated(rt.target.clone()))?.clone();
        let pattern = match rt.pattern {
            ArrivalPattern::Periodic(_) => PatternKind::Periodic,
            ArrivalPattern::Sporadic(_) => PatternKind::Sporadic,
        };
        let task = RtTask {
            id: rt.target.clone(),
            core: core.clone(),
            wcet: rt.wcet,
            period: rt.pattern.period(),
            deadline: rt.deadline,
            priority: rt.priority,
            pattern,
            order,
        };
        match by_core.iter_mut().find(|(c, _)| *c == core) {
            Some((_, tasks)) => tasks.push(task),
            None => by_core.push((core, vec![task])),
        }
    }
    by_core.sort_by_key(|(core, _)| (model.hardware.core_index(core).unwrap_or(usize::MAX), core.clone()));
    Ok(by_core.into_iter().map(|(core, tasks)| CoreTaskSet::new(core, tasks)).collect())
}
