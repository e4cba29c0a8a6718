use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rule broken by a stack layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    UnknownProcess,
    MissingProcess,
    RegionOrder,
    BeolName,
    BeolOrder,
    DuplicateName,
    InvalidPitch,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::UnknownProcess => "unknown-process",
            Rule::MissingProcess => "missing-process",
            Rule::RegionOrder => "region-order",
            Rule::BeolName => "beol-name",
            Rule::BeolOrder => "beol-order",
            Rule::DuplicateName => "duplicate-name",
            Rule::InvalidPitch => "invalid-pitch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub layer: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "layer {}: [{}] {}",
            self.layer,
            self.rule.as_str(),
            self.message
        )
    }
}

/// A configuration problem at a document location (JSON path, plus line/column
/// when the parser knows it).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigIssue {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| format!("\n  {v}")).collect()
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown process `{id}` (known: {known})")]
    UnknownProcess { id: String, known: String },

    #[error("process `{0}` already exists in the catalog")]
    ProcessCollision(String),

    #[error("invalid process `{id}`: {message}")]
    InvalidProcess { id: String, message: String },

    #[error("{field}: {message}")]
    Domain { field: String, message: String },

    #[error("stack `{stack}` has {} violation(s):{}", .violations.len(), join(.violations))]
    Validation {
        stack: String,
        violations: Vec<Violation>,
    },

    #[error("unknown target layer `{target}` (BEOL layers: {available})")]
    UnknownTarget { target: String, available: String },

    #[error("block `{block}` needs {required} but has no area overhead for target {target}")]
    MissingOverhead {
        block: String,
        required: String,
        target: String,
    },

    #[error("reference node `{0}` not in series")]
    MissingReference(String),

    #[error("reference node `{0}` has value 0")]
    ZeroReference(String),

    #[error("carbon intensity range is inverted: low {low} > high {high}")]
    InvertedRange { low: f64, high: f64 },

    #[error("unknown preset `{0}` (known: asap7, n7-euv, n7-duv)")]
    UnknownPreset(String),

    #[error("invalid configuration:{}", join(.0))]
    Config(Vec<ConfigIssue>),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(field: &str, message: impl Into<String>) -> Self {
        Error::Domain {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Errors caused by user input as opposed to I/O failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Csv(_))
    }
}
