//! Pose-to-message pipeline shared by offline replay and the live service.

use headpoint_core::dwell::{DwellEngine, DwellError};
use headpoint_core::geometry::{HeadModel, PointerMapper, Pose, PoseError, ScreenGeometry};
use headpoint_core::trials::{Session, SessionError, SessionPhase};
use thiserror::Error;

use crate::protocol::{Inbound, InboundError, Outbound, PhaseInfo, WidgetInfo};
use crate::spec::{SessionSpec, SpecError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid pose: {0}")]
    Pose(#[from] PoseError),
    #[error("timestamp {t} ms precedes the previous frame at {previous} ms")]
    NonMonotone { t: f64, previous: f64 },
    #[error(transparent)]
    Dwell(#[from] DwellError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// Maps poses to cursors, drives the dwell engine and the session, and
/// reports everything as outbound messages.
#[derive(Debug, Clone)]
pub struct SessionRunner {
    spec: SessionSpec,
    mapper: PointerMapper,
    engine: DwellEngine,
    session: Session,
    previous_t: Option<f64>,
}

impl SessionRunner {
    pub fn new(spec: SessionSpec, fallback_screen: &ScreenGeometry) -> Result<Self, RunError> {
        let config = spec.to_config(fallback_screen)?;
        let screen = spec.screen_or(fallback_screen);
        let mapper = PointerMapper::new(HeadModel::default(), screen, spec.filter()?);
        let session = Session::new(config)?;
        let engine = screen_engine(&session, &screen)?;
        Ok(Self { spec, mapper, engine, session, previous_t: None })
    }

    pub fn spec(&self) -> &SessionSpec {
        &self.spec
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    /// Description of the screen currently shown.
    pub fn phase_message(&self) -> Outbound {
        let s = &self.session;
        let widgets = s
            .widgets()
            .into_iter()
            .map(|w| WidgetInfo { id: w.id, x: w.rect.x, y: w.rect.y, width: w.rect.width, height: w.rect.height })
            .collect();
        let elapsed_ms = match s.phase() {
            SessionPhase::Summary => s.test_elapsed_ms().to_vec(),
            _ => Vec::new(),
        };
        Outbound::Phase(PhaseInfo {
            name: s.phase().name(),
            layout: s.current_layout().map(|l| l.name),
            sequence: s.current_sequence(),
            widgets,
            elapsed_ms,
        })
    }

    pub fn push_raw(&mut self, t: f64, m: &[f64; 16]) -> Result<Vec<Outbound>, RunError> {
        self.push(&Pose::from_row_major(t, m)?)
    }

    /// Processes one frame. Frames with an invalid pose or an earlier
    /// timestamp are rejected without touching the session.
    pub fn push(&mut self, pose: &Pose) -> Result<Vec<Outbound>, RunError> {
        let t = pose.t_ms();
        if let Some(previous) = self.previous_t {
            if t < previous {
                return Err(RunError::NonMonotone { t, previous });
            }
        }
        self.previous_t = Some(t);
        let cursor = self.mapper.map(pose);
        self.session.observe_frame(t);
        let mut out = vec![Outbound::Cursor { t, x: cursor.x, y: cursor.y, in_bounds: cursor.in_bounds }];
        let phase = self.session.phase();
        for event in self.engine.process_frame(t, cursor)? {
            let record = self.session.advance(&event)?;
            out.push(Outbound::Event(event));
            if let Some(record) = record {
                out.push(Outbound::Trial(record));
            }
            // Events still queued belong to the screen that was just left.
            if self.session.phase() != phase {
                self.engine = screen_engine(&self.session, &self.mapper.screen)?;
                out.push(self.phase_message());
                break;
            }
        }
        Ok(out)
    }
}

fn screen_engine(session: &Session, screen: &ScreenGeometry) -> Result<DwellEngine, DwellError> {
    let mut engine = DwellEngine::new(screen.width_pt, screen.height_pt);
    for widget in session.widgets() {
        engine.register_widget(widget)?;
    }
    Ok(engine)
}

/// Response to one inbound frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Reply {
    pub messages: Vec<Outbound>,
    /// The connection should be closed after sending `messages`.
    pub close: bool,
}

/// Protocol state of one client connection.
#[derive(Debug, Clone)]
pub struct Connection {
    fallback_screen: ScreenGeometry,
    runner: Option<SessionRunner>,
}

impl Connection {
    pub fn new(fallback_screen: ScreenGeometry) -> Self {
        Self { fallback_screen, runner: None }
    }

    pub fn runner(&self) -> Option<&SessionRunner> {
        self.runner.as_ref()
    }

    pub fn handle_text(&mut self, text: &str) -> Reply {
        let message = match Inbound::parse(text) {
            Ok(m) => m,
            Err(e @ (InboundError::Malformed(_) | InboundError::UnknownType(_))) => return error(e.to_string()),
        };
        match (message, self.runner.as_mut()) {
            (Inbound::Hello(spec), None) => match SessionRunner::new(spec, &self.fallback_screen) {
                Ok(runner) => {
                    let opening = runner.phase_message();
                    self.runner = Some(runner);
                    Reply { messages: vec![opening], close: false }
                }
                Err(e) => error(format!("invalid hello: {e}")),
            },
            (Inbound::Hello(_), Some(_)) => error("session already started on this connection"),
            (_, None) => Reply { messages: vec![Outbound::error("expected hello as the first message")], close: true },
            (Inbound::Pose { t, m }, Some(runner)) => match runner.push_raw(t, &m) {
                Ok(messages) => Reply { messages, close: false },
                Err(e) => error(format!("frame rejected: {e}")),
            },
            (Inbound::End, Some(_)) => Reply { messages: Vec::new(), close: true },
        }
    }
}

fn error(message: impl Into<String>) -> Reply {
    Reply { messages: vec![Outbound::error(message)], close: false }
}
