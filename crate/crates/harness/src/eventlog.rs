//! Event logs: the outbound message stream of a session minus cursor
//! updates, one JSON object per line after a version line and the session
//! header.

use std::io::BufRead;

use headpoint_core::analysis::{KeyedTrial, SequenceKey};
use headpoint_core::trials::TrialRecord;
use thiserror::Error;

use crate::protocol::Outbound;
use crate::spec::SessionSpec;

pub const EVENTS_MAGIC: &str = "HEADPOINT-EVENTS";
pub const EVENTS_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EventLogError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: not an event log (expected '{EVENTS_MAGIC} <version>')")]
    NotAnEventLog { line: usize },
    #[error("line {line}: unsupported event log version {found} (supported: {EVENTS_VERSION})")]
    Version { line: usize, found: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub spec: SessionSpec,
    pub messages: Vec<Outbound>,
}

impl EventLog {
    pub fn new(spec: SessionSpec) -> Self {
        Self { spec, messages: Vec::new() }
    }

    /// Appends the messages that belong in a log, dropping cursor updates.
    pub fn extend(&mut self, messages: impl IntoIterator<Item = Outbound>) {
        self.messages.extend(messages.into_iter().filter(|m| !m.is_cursor()));
    }

    pub fn trials(&self) -> impl Iterator<Item = &TrialRecord> {
        self.messages.iter().filter_map(|m| match m {
            Outbound::Trial(r) => Some(r),
            _ => None,
        })
    }

    pub fn keyed_trials(&self) -> Vec<KeyedTrial> {
        self.trials()
            .map(|r| KeyedTrial {
                key: SequenceKey {
                    participant: self.spec.participant.clone(),
                    distance: self.spec.distance,
                    layout: r.layout,
                },
                record: r.clone(),
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{EVENTS_MAGIC} {EVENTS_VERSION}\n");
        out.push_str(&serde_json::to_string(&self.spec).expect("spec serializes"));
        out.push('\n');
        for m in &self.messages {
            out.push_str(&m.to_json());
            out.push('\n');
        }
        out
    }

    pub fn load(r: impl BufRead) -> Result<Self, EventLogError> {
        let mut lines = r.lines();
        let first = lines.next().transpose()?.ok_or(EventLogError::NotAnEventLog { line: 1 })?;
        let mut parts = first.split_whitespace();
        if parts.next() != Some(EVENTS_MAGIC) {
            return Err(EventLogError::NotAnEventLog { line: 1 });
        }
        let version = parts.next().unwrap_or("").to_string();
        if version.parse::<u32>().ok() != Some(EVENTS_VERSION) || parts.next().is_some() {
            return Err(EventLogError::Version { line: 1, found: version });
        }
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| EventLogError::Malformed { line: 2, message: "missing session header".into() })?;
        let spec =
            serde_json::from_str(&header).map_err(|e| EventLogError::Malformed { line: 2, message: e.to_string() })?;
        let mut messages = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let m: Outbound = serde_json::from_str(&line)
                .map_err(|e| EventLogError::Malformed { line: i + 3, message: e.to_string() })?;
            messages.push(m);
        }
        Ok(Self { spec, messages })
    }

    pub fn load_path(path: &std::path::Path) -> Result<Self, EventLogError> {
        Self::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::PhaseInfo;
    use headpoint_core::trials::{Distance, LayoutName};

    #[test]
    fn round_trip_and_cursor_filtering() {
        let mut log = EventLog::new(SessionSpec::new("P03", Distance::Far, vec![LayoutName::Alphabets]));
        log.extend([
            Outbound::Phase(PhaseInfo {
                name: "test1".into(),
                layout: Some(LayoutName::Alphabets),
                sequence: vec!["A".into()],
                widgets: vec![],
                elapsed_ms: vec![],
            }),
            Outbound::Cursor { t: 0.0, x: 1.0, y: 2.0, in_bounds: true },
        ]);
        assert_eq!(log.messages.len(), 1);
        let text = log.to_text();
        assert!(text.starts_with("HEADPOINT-EVENTS 1\n{\"participant\":\"P03\""));
        assert_eq!(EventLog::load(text.as_bytes()).unwrap(), log);
        let broken = format!("{text}{{\"type\":\"trial\"}}\n");
        assert!(matches!(EventLog::load(broken.as_bytes()), Err(EventLogError::Malformed { line: 4, .. })));
        assert!(matches!(
            EventLog::load("HEADPOINT-EVENTS 2\n".as_bytes()),
            Err(EventLogError::Version { line: 1, .. })
        ));
    }
}
