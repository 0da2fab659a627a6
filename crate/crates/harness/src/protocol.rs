//! JSON messages exchanged with session clients, one object per text frame.

use headpoint_core::dwell::GazeEvent;
use headpoint_core::trials::{LayoutName, TrialRecord};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::spec::SessionSpec;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Inbound {
    Hello(SessionSpec),
    Pose { t: f64, m: [f64; 16] },
    End,
}

/// Why an inbound frame could not be turned into an [`Inbound`].
#[derive(Debug, Clone, PartialEq)]
pub enum InboundError {
    /// Not JSON, not an object, or fields of a known type are wrong.
    Malformed(String),
    /// A well-formed object with a `type` this protocol does not define.
    UnknownType(String),
}

impl std::fmt::Display for InboundError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InboundError::Malformed(m) => write!(f, "malformed message: {m}"),
            InboundError::UnknownType(t) => write!(f, "unknown message type {t:?}"),
        }
    }
}

impl Inbound {
    pub const TYPES: [&'static str; 3] = ["hello", "pose", "end"];

    pub fn parse(text: &str) -> Result<Self, InboundError> {
        let value: Value = serde_json::from_str(text).map_err(|e| InboundError::Malformed(e.to_string()))?;
        let kind = match value.get("type") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(InboundError::Malformed("'type' must be a string".into())),
            None => return Err(InboundError::Malformed("missing 'type'".into())),
        };
        if !Self::TYPES.contains(&kind.as_str()) {
            return Err(InboundError::UnknownType(kind));
        }
        serde_json::from_value(value).map_err(|e| InboundError::Malformed(format!("{kind}: {e}")))
    }
}

/// On-screen widget as shown to the client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidgetInfo {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

/// Screen the client should render after a phase change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseInfo {
    /// `welcome`, `practice`, `test1`, `test2`, ..., `summary`.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutName>,
    /// Target labels of a test, in selection order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sequence: Vec<String>,
    #[serde(default)]
    pub widgets: Vec<WidgetInfo>,
    /// Elapsed time of each finished test; set on the summary screen.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elapsed_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Outbound {
    Cursor { t: f64, x: f64, y: f64, in_bounds: bool },
    Event(GazeEvent),
    Trial(TrialRecord),
    Phase(PhaseInfo),
    Error { message: String },
}

impl Outbound {
    pub fn error(message: impl Into<String>) -> Self {
        Outbound::Error { message: message.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("outbound messages serialize")
    }

    pub fn is_cursor(&self) -> bool {
        matches!(self, Outbound::Cursor { .. })
    }
}
