//! The three user-facing operations over model text, shared by the
//! command line and the HTTP service so both answer identically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{has_errors, Diagnostic};
use crate::dsl::parse_model;
pub use crate::dsl::SourceFile;
use crate::sched::{analyze, AnalyzeError, SchedReport};
use crate::thingml::{generate, GenerateError, ThingmlUnit};
use crate::validate::validate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Validate,
    Generate,
    Analyze,
}

impl Operation {
    pub const ALL: [Operation; 3] = [Operation::Validate, Operation::Generate, Operation::Analyze];

    pub fn name(self) -> &'static str {
        match self {
            Operation::Validate => "validate",
            Operation::Generate => "generate",
            Operation::Analyze => "analyze",
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown operation `{0}` (expected validate, generate or analyze)")]
pub struct UnknownOperation(pub String);

impl FromStr for Operation {
    type Err = UnknownOperation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operation::ALL.into_iter().find(|op| op.name() == s).ok_or_else(|| UnknownOperation(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Invalid,
    Unschedulable,
    Error,
}

/// Result of one operation. `report` is present for every successful
/// analysis (schedulable or not), `units` for every successful generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<SchedReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<ThingmlUnit>>,
}

impl Outcome {
    fn new(status: Status, diagnostics: Vec<Diagnostic>) -> Self {
        Outcome { status, diagnostics, report: None, units: None }
    }

    pub fn has_warnings(&self) -> bool {
        self.diagnostics.iter().any(|d| !d.is_error())
    }
}

/// A failure after validation succeeded; indicates a bug, not bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InternalError {
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

/// Parses and validates `source`, then runs `op` if the model is valid.
/// Warnings never stop an operation.
pub fn run(op: Operation, source: &SourceFile) -> Result<Outcome, InternalError> {
    let model = match parse_model(source) {
        Ok(m) => m,
        Err(diags) => return Ok(Outcome::new(Status::Invalid, diags)),
    };
    let diags = validate(&model);
    if has_errors(&diags) {
        return Ok(Outcome::new(Status::Invalid, diags));
    }
    let mut outcome = Outcome::new(Status::Ok, diags);
    match op {
        Operation::Validate => {}
        Operation::Generate => outcome.units = Some(generate(&model)?),
        Operation::Analyze => {
            let report = analyze(&model)?;
            if !report.schedulable() {
                outcome.status = Status::Unschedulable;
            }
            outcome.report = Some(report);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operation_names_round_trip() {
        for op in Operation::ALL {
            assert_eq!(op.name().parse::<Operation>().unwrap(), op);
        }
        assert!("simulate".parse::<Operation>().is_err());
    }

    #[test]
    fn parse_errors_are_invalid() {
        let out = run(Operation::Analyze, &SourceFile::new("m", "system {")).unwrap();
        assert_eq!(out.status, Status::Invalid);
        assert!(!out.diagnostics.is_empty());
        assert!(out.report.is_none());
    }

    #[test]
    fn outcome_json_omits_absent_payloads() {
        let out = run(Operation::Validate, &SourceFile::new("m", "system S { }")).unwrap();
        assert_eq!(serde_json::to_string(&out).unwrap(), r#"{"status":"ok","diagnostics":[]}"#);
    }
}
