//! Session files: the ordered log of successful operations, replayed on load.

use drs_core::logic::TimeStamp;
use serde::{Deserialize, Serialize};

use crate::session::{Mode, SessionError};

pub const FILE_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileStep {
    Input(String),
    Choose(Vec<TimeStamp>),
    Retract(TimeStamp),
    Auto(bool),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionFile {
    pub version: u64,
    pub mode: Mode,
    #[serde(default)]
    pub auto_choose: bool,
    #[serde(default)]
    pub steps: Vec<FileStep>,
}

impl SessionFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("session files always serialize")
    }

    /// Parses a session file, checking the version before the layout.
    pub fn from_json(text: &str) -> Result<SessionFile, SessionError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SessionError::Malformed(e.to_string()))?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(FILE_VERSION) => {}
            Some(found) => return Err(SessionError::VersionMismatch { found }),
            None => return Err(SessionError::Malformed("missing numeric field `version`".into())),
        }
        serde_json::from_value(value).map_err(|e| SessionError::Malformed(e.to_string()))
    }
}
