//! Offline replay of recorded traces.

use headpoint_core::geometry::{Pose, ScreenGeometry};
use thiserror::Error;

use crate::eventlog::EventLog;
use crate::pipeline::{RunError, SessionRunner};
use crate::spec::SessionSpec;
use crate::trace::TraceFile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("trace metadata does not match the session: {0}")]
    Metadata(String),
    #[error("session setup failed: {0}")]
    Setup(RunError),
    #[error("frame {index} (t = {t} ms): {source}")]
    Frame {
        index: usize,
        t: f64,
        #[source]
        source: RunError,
    },
}

/// Replays a trace under the session described by its own header.
pub fn replay(trace: &TraceFile, fallback_screen: &ScreenGeometry) -> Result<EventLog, ReplayError> {
    replay_with(trace, &trace.spec, fallback_screen)
}

/// Replays a trace under `spec`, which must agree with the trace header on
/// everything that shaped the recording.
pub fn replay_with(
    trace: &TraceFile,
    spec: &SessionSpec,
    fallback_screen: &ScreenGeometry,
) -> Result<EventLog, ReplayError> {
    check_metadata(&trace.spec, spec, fallback_screen)?;
    let mut runner = SessionRunner::new(spec.clone(), fallback_screen).map_err(ReplayError::Setup)?;
    let mut log = EventLog::new(spec.clone());
    log.extend([runner.phase_message()]);
    for (index, frame) in trace.frames.iter().enumerate() {
        let fail = |source| ReplayError::Frame { index, t: frame.t, source };
        let pose = Pose::from_row_major(frame.t, &frame.m).map_err(|e| fail(e.into()))?;
        log.extend(runner.push(&pose).map_err(fail)?);
    }
    Ok(log)
}

fn check_metadata(recorded: &SessionSpec, spec: &SessionSpec, fallback: &ScreenGeometry) -> Result<(), ReplayError> {
    let mismatch = |what: &str| Err(ReplayError::Metadata(what.to_string()));
    if recorded.participant != spec.participant {
        return mismatch("participant");
    }
    if recorded.distance != spec.distance {
        return mismatch("distance");
    }
    if recorded.layouts != spec.layouts {
        return mismatch("layouts");
    }
    if recorded.flow != spec.flow {
        return mismatch("flow");
    }
    if recorded.screen_or(fallback) != spec.screen_or(fallback) {
        return mismatch("screen");
    }
    Ok(())
}
