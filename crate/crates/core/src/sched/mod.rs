//! Schedulability analysis of allocated real-time annotations.
//!
//! [`derive_tasks`] turns rt annotations into per-core task sets,
//! [`analyze_core`] runs response-time analysis on one core and [`analyze`]
//! composes both into a [`SchedReport`] for a whole model. [`simulate`] is an
//! independent reference schedule used to cross-check the analysis.

mod rta;
mod sim;
mod task;

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rta::{analyze_core, format_ratio, response_time, utilization, CoreResult, ResponseTime, TaskResult};
pub use sim::{hyperperiod, simulate, Job, Segment, SimTrace, MAX_SIM_JOBS};
pub use task::{derive_tasks, CoreTaskSet, DeriveError, PatternKind, RtTask};

use crate::diag::{has_errors, Diagnostic};
use crate::instance::{build_instance_model, InstanceError};
use crate::model::Model;
use crate::validate::validate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Schedulable,
    NotSchedulable,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Schedulable => "SCHEDULABLE",
            Verdict::NotSchedulable => "NOT SCHEDULABLE",
        }
    }
}

/// One analyzed task. Field order is part of the JSON format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskReport {
    pub id: String,
    #[serde(rename = "C_us")]
    pub c_us: u64,
    #[serde(rename = "T_us")]
    pub t_us: u64,
    #[serde(rename = "D_us")]
    pub d_us: u64,
    pub priority: u32,
    #[serde(rename = "R_us")]
    pub r_us: ResponseTime,
    pub deadline_met: bool,
    /// `D - R`; null when the response diverged.
    pub slack_us: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreReport {
    pub processor: String,
    pub core: String,
    /// Exact `num/den`.
    pub utilization: String,
    pub tasks: Vec<TaskReport>,
}

impl CoreReport {
    pub fn schedulable(&self) -> bool {
        self.tasks.iter().all(|t| t.deadline_met)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedReport {
    pub system: String,
    pub verdict: Verdict,
    pub cores: Vec<CoreReport>,
}

impl SchedReport {
    pub fn from_results(system: impl Into<String>, results: &[CoreResult]) -> Self {
        let cores: Vec<CoreReport> = results
            .iter()
            .map(|res| CoreReport {
                processor: res.set.core.processor.clone(),
                core: res.set.core.core.clone(),
                utilization: format_ratio(&res.utilization),
                tasks: res
                    .tasks
                    .iter()
                    .map(|t| TaskReport {
                        id: t.task.id.clone(),
                        c_us: t.task.wcet.0,
                        t_us: t.task.period.0,
                        d_us: t.task.deadline.0,
                        priority: t.task.priority,
                        r_us: t.response,
                        deadline_met: t.deadline_met(),
                        slack_us: t.slack().map(|s| s.0),
                    })
                    .collect(),
            })
            .collect();
        let verdict =
            if results.iter().all(CoreResult::schedulable) { Verdict::Schedulable } else { Verdict::NotSchedulable };
        SchedReport { system: system.into(), verdict, cores }
    }

    pub fn schedulable(&self) -> bool {
        self.verdict == Verdict::Schedulable
    }

    pub fn task(&self, id: &str) -> Option<&TaskReport> {
        self.cores.iter().flat_map(|c| &c.tasks).find(|t| t.id == id)
    }

    /// Pretty JSON with a trailing newline; byte-stable for equal reports.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "system {}: {}", self.system, self.verdict.label());
        if self.cores.is_empty() {
            let _ = writeln!(out, "  (no real-time tasks)");
        }
        for core in &self.cores {
            let status = if core.schedulable() { "ok" } else { "FAIL" };
            let _ = writeln!(out, "  core {}.{}  U = {}  [{status}]", core.processor, core.core, core.utilization);
            for t in &core.tasks {
                let r = match t.r_us {
                    ResponseTime::Finite(r) => format!("{:.3} ms", r.0 as f64 / 1000.0),
                    ResponseTime::Diverged => "diverged".to_string(),
                };
                let _ = writeln!(
                    out,
                    "    {:<40} P={:<3} C={:>9.3} ms T={:>9.3} ms D={:>9.3} ms R={:>12} {}",
                    t.id,
                    t.priority,
                    t.c_us as f64 / 1000.0,
                    t.t_us as f64 / 1000.0,
                    t.d_us as f64 / 1000.0,
                    r,
                    if t.deadline_met { "met" } else { "MISSED" }
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("model has validation errors")]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Derive(#[from] DeriveError),
}

/// Analyzes every core of task sets already derived.
pub fn analyze_sets(system: &str, sets: &[CoreTaskSet]) -> SchedReport {
    let results: Vec<CoreResult> = sets.iter().map(analyze_core).collect();
    SchedReport::from_results(system, &results)
}

/// Validates, flattens, derives tasks and analyzes every core. The system is
/// schedulable iff every task meets its deadline.
pub fn analyze(model: &Model) -> Result<SchedReport, AnalyzeError> {
    let diags = validate(model);
    if has_errors(&diags) {
        return Err(AnalyzeError::Invalid(diags));
    }
    let instances = build_instance_model(model)?;
    let sets = derive_tasks(model, &instances)?;
    Ok(analyze_sets(&model.name, &sets))
}
