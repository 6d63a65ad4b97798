//! Diagnostics shared by the parser and the validator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Loc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A finding tied to a source position. Serializes as
/// `{code, severity, message, line, column}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub severity: Severity,
    pub message: String,
    pub line: u32,
    pub column: u32,
}

impl Diagnostic {
    pub fn error(code: &str, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            code: code.to_string(),
            severity: Severity::Error,
            message: message.into(),
            line: loc.line,
            column: loc.column,
        }
    }

    pub fn warning(code: &str, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(code, loc, message) }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn loc(&self) -> Loc {
        Loc::new(self.line, self.column)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}[{}]: {}", self.line, self.column, self.severity, self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Renders diagnostics as the JSON report array.
pub fn to_json(diags: &[Diagnostic]) -> String {
    let mut out = serde_json::to_string_pretty(diags).expect("diagnostics serialize");
    out.push('\n');
    out
}

/// Stable diagnostic codes.
pub mod codes {
    // Parser.
    pub const E_LEX: &str = "E_LEX";
    pub const E_SYNTAX: &str = "E_SYNTAX";
    pub const E_VERSION: &str = "E_VERSION";

    // Validator.
    pub const V_STATE_EVENTS: &str = "V_STATE_EVENTS";
    pub const V_PORT_MATCH: &str = "V_PORT_MATCH";
    pub const V_ACTION_DIRECTION: &str = "V_ACTION_DIRECTION";
    pub const V_EVENT_PORT: &str = "V_EVENT_PORT";
    pub const V_SM_INITIAL: &str = "V_SM_INITIAL";
    pub const V_GUARD_TYPE: &str = "V_GUARD_TYPE";
    pub const V_ALLOC_MISSING: &str = "V_ALLOC_MISSING";
    pub const V_ALLOC_CORE: &str = "V_ALLOC_CORE";
    pub const V_RT_VALUES: &str = "V_RT_VALUES";
    pub const V_ENTITY_PARTS: &str = "V_ENTITY_PARTS";
    pub const V_PAYLOAD_CYCLE: &str = "V_PAYLOAD_CYCLE";
    pub const V_DUP_NAME: &str = "V_DUP_NAME";
    pub const V_UNRESOLVED: &str = "V_UNRESOLVED";
    pub const V_ELEMENT_PARTS: &str = "V_ELEMENT_PARTS";
    pub const V_ENTITY_PORTS: &str = "V_ENTITY_PORTS";
    pub const V_CONTAINMENT_CYCLE: &str = "V_CONTAINMENT_CYCLE";
    pub const V_PROP_INIT: &str = "V_PROP_INIT";
    pub const V_ASSIGN_TYPE: &str = "V_ASSIGN_TYPE";
    pub const V_HW_EMPTY: &str = "V_HW_EMPTY";
    pub const V_UNREACHABLE: &str = "V_UNREACHABLE";
    pub const V_RT_WCET_PERIOD: &str = "V_RT_WCET_PERIOD";
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let d = Diagnostic::error(codes::V_STATE_EVENTS, Loc::new(4, 7), "state Idle has no exit event");
        let json: serde_json::Value = serde_json::from_str(&to_json(&[d])).unwrap();
        assert_eq!(
            json,
            serde_json::json!([{
                "code": "V_STATE_EVENTS",
                "severity": "error",
                "message": "state Idle has no exit event",
                "line": 4,
                "column": 7
            }])
        );
    }
}
