//! Dwell-based selection.
//!
//! Each registered widget runs a small state machine fed by the cursor
//! stream. Entering a widget starts a hover timer; staying inside emits a
//! progress value every frame, a `glance` selection once the hover lasts
//! `glance_ms` and a `gaze` selection once it lasts `gaze_ms`. After the last
//! selection a widget goes quiet until the cursor leaves it, so resting on a
//! button never clicks it twice.
//!
//! Timestamps are frame timestamps; there is no sub-frame interpolation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::ScreenPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DwellError {
    #[error("widget id {0:?} is already registered")]
    DuplicateId(String),
    #[error("widget {0:?} lies outside the screen")]
    OutOfBounds(String),
    #[error("widget {0:?} overlaps widget {1:?}")]
    Overlap(String, String),
    #[error("widget {id:?} is invalid: {reason}")]
    InvalidWidget { id: String, reason: &'static str },
    #[error("frame timestamp {t} precedes previous frame at {previous}")]
    NonMonotone { t: f64, previous: f64 },
    #[error("frame timestamp {0} is not finite")]
    BadTimestamp(f64),
}

/// Axis-aligned rectangle in screen points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, width: f64, height: f64) -> Self {
        Self { x, y, width, height }
    }

    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    pub fn center(&self) -> ScreenPoint {
        ScreenPoint::new(self.x + self.width / 2.0, self.y + self.height / 2.0, true)
    }

    /// Closed on the left and top edges, open on the right and bottom.
    pub fn contains(&self, p: &ScreenPoint) -> bool {
        p.x >= self.x && p.x < self.right() && p.y >= self.y && p.y < self.bottom()
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }
}

/// Hover thresholds for one widget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwellConfig {
    pub glance_ms: f64,
    /// `f64::INFINITY` disables the gaze selection.
    pub gaze_ms: f64,
}

impl Default for DwellConfig {
    fn default() -> Self {
        Self { glance_ms: 1000.0, gaze_ms: 2000.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Widget {
    pub id: String,
    pub rect: Rect,
    pub dwell: DwellConfig,
    pub enabled: bool,
}

impl Widget {
    pub fn new(id: impl Into<String>, rect: Rect) -> Self {
        Self { id: id.into(), rect, dwell: DwellConfig::default(), enabled: true }
    }

    pub fn with_dwell(mut self, dwell: DwellConfig) -> Self {
        self.dwell = dwell;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Phase {
    #[default]
    Idle,
    Hovering,
    FiredAwaitingExit,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WidgetState {
    pub phase: Phase,
    pub hover_start: Option<f64>,
    pub glance_emitted: bool,
    pub gaze_emitted: bool,
}

/// Event kinds in their same-frame emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Enter,
    Progress,
    Glance,
    Gaze,
    Exit,
}

impl EventKind {
    pub fn is_selection(self) -> bool {
        matches!(self, EventKind::Glance | EventKind::Gaze)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeEvent {
    pub t: f64,
    pub widget_id: String,
    pub kind: EventKind,
    /// Hover progress towards the glance threshold, capped at 1.
    pub progress: f64,
    pub cursor: ScreenPoint,
}

#[derive(Debug, Clone)]
struct Entry {
    widget: Widget,
    state: WidgetState,
}

/// Widget registry plus per-widget dwell state for one session.
#[derive(Debug, Clone)]
pub struct DwellEngine {
    width_pt: f64,
    height_pt: f64,
    widgets: BTreeMap<String, Entry>,
    last_t: Option<f64>,
}

impl DwellEngine {
    /// Engine for a screen of the given size in points.
    pub fn new(width_pt: f64, height_pt: f64) -> Self {
        Self { width_pt, height_pt, widgets: BTreeMap::new(), last_t: None }
    }

    pub fn register_widget(&mut self, widget: Widget) -> Result<(), DwellError> {
        let r = widget.rect;
        if !(r.width > 0.0 && r.height > 0.0) {
            return Err(DwellError::InvalidWidget { id: widget.id, reason: "width and height must be positive" });
        }
        if !(widget.dwell.glance_ms >= 0.0 && widget.dwell.glance_ms <= widget.dwell.gaze_ms) {
            return Err(DwellError::InvalidWidget { id: widget.id, reason: "glance_ms must not exceed gaze_ms" });
        }
        if self.widgets.contains_key(&widget.id) {
            return Err(DwellError::DuplicateId(widget.id));
        }
        if r.x < 0.0 || r.y < 0.0 || r.right() > self.width_pt || r.bottom() > self.height_pt {
            return Err(DwellError::OutOfBounds(widget.id));
        }
        if let Some(other) = self.widgets.values().find(|e| e.widget.rect.intersects(&r)) {
            return Err(DwellError::Overlap(widget.id, other.widget.id.clone()));
        }
        self.widgets.insert(widget.id.clone(), Entry { widget, state: WidgetState::default() });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.widgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widgets.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.widgets.contains_key(id)
    }

    pub fn widgets(&self) -> impl Iterator<Item = &Widget> {
        self.widgets.values().map(|e| &e.widget)
    }

    pub fn state(&self, id: &str) -> Option<&WidgetState> {
        self.widgets.get(id).map(|e| &e.state)
    }

    pub fn set_enabled(&mut self, id: &str, enabled: bool) -> bool {
        match self.widgets.get_mut(id) {
            Some(e) => {
                e.widget.enabled = enabled;
                true
            }
            None => false,
        }
    }

    /// The enabled widget under the cursor, if any.
    pub fn hit_test(&self, cursor: &ScreenPoint) -> Option<&str> {
        self.widgets.values().find(|e| e.widget.enabled && e.widget.rect.contains(cursor)).map(|e| e.widget.id.as_str())
    }

    /// All widgets back to idle. Does not forget the last frame timestamp.
    pub fn reset(&mut self) {
        for e in self.widgets.values_mut() {
            e.state = WidgetState::default();
        }
    }

    /// Advances every widget by one cursor frame.
    ///
    /// Events come out sorted by widget id, then by [`EventKind`] order.
    pub fn process_frame(&mut self, t: f64, cursor: ScreenPoint) -> Result<Vec<GazeEvent>, DwellError> {
        if !t.is_finite() {
            return Err(DwellError::BadTimestamp(t));
        }
        if let Some(previous) = self.last_t {
            if t < previous {
                return Err(DwellError::NonMonotone { t, previous });
            }
        }
        self.last_t = Some(t);

        let hit = self.hit_test(&cursor).map(str::to_owned);
        let mut events = Vec::new();
        for (id, entry) in self.widgets.iter_mut() {
            let inside = hit.as_deref() == Some(id.as_str());
            let mut emit = |kind, progress| {
                events.push(GazeEvent { t, widget_id: id.clone(), kind, progress, cursor });
            };
            let state = &mut entry.state;
            match (state.phase, inside) {
                (Phase::Idle, false) | (Phase::FiredAwaitingExit, true) => {}
                (Phase::Hovering | Phase::FiredAwaitingExit, false) => {
                    emit(EventKind::Exit, 0.0);
                    *state = WidgetState::default();
                }
                (Phase::Idle, true) => {
                    emit(EventKind::Enter, 0.0);
                    *state = WidgetState { phase: Phase::Hovering, hover_start: Some(t), ..WidgetState::default() };
                    step_hover(state, &entry.widget.dwell, t, &mut emit);
                }
                (Phase::Hovering, true) => step_hover(state, &entry.widget.dwell, t, &mut emit),
            }
        }
        Ok(events)
    }
}

fn step_hover(state: &mut WidgetState, dwell: &DwellConfig, t: f64, emit: &mut impl FnMut(EventKind, f64)) {
    let start = state.hover_start.expect("hovering widget has a start time");
    let elapsed = t - start;
    let progress = if dwell.glance_ms > 0.0 { (elapsed / dwell.glance_ms).min(1.0) } else { 1.0 };
    emit(EventKind::Progress, progress);
    if !state.glance_emitted && elapsed >= dwell.glance_ms {
        state.glance_emitted = true;
        emit(EventKind::Glance, progress);
    }
    if !state.gaze_emitted && elapsed >= dwell.gaze_ms {
        state.gaze_emitted = true;
        emit(EventKind::Gaze, progress);
    }
    let done = state.gaze_emitted || (state.glance_emitted && !dwell.gaze_ms.is_finite());
    if done {
        state.phase = Phase::FiredAwaitingExit;
        state.hover_start = None;
    }
}
