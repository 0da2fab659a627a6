//! Target-acquisition tests: layouts, target sequences and the session
//! state machine that turns dwell selections into trial records.
//!
//! A session walks through `welcome -> practice -> test1 -> test2 -> summary`.
//! Offline studies skip the first two screens and run a single test. During a
//! test exactly one target is current; a selection on it closes a trial and
//! moves the highlight on. Selections on any other target are ignored and
//! only counted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dwell::{DwellConfig, EventKind, GazeEvent, Rect, Widget};
use crate::geometry::{ScreenGeometry, ScreenPoint};

/// Keypad-style selection order of the numbers test.
pub const NUMBERS_SEQUENCE: [&str; 20] =
    ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0", "1", "9", "2", "8", "3", "7", "6", "4", "0", "5"];

/// Labels of the alphabets grid, row-major.
pub const ALPHABET_LABELS: [&str; 15] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N", "O"];

/// Widget on the welcome screen that starts the practice.
pub const START_WIDGET: &str = "start";
/// Widget on the practice screen that starts the first test.
pub const CONTINUE_WIDGET: &str = "continue";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("{layout} layout does not fit on a {width} x {height} pt screen")]
    Overflow { layout: LayoutName, width: f64, height: f64 },
    #[error("target size and gap must be positive")]
    BadParams,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("event from widget {0:?} which is not on the current screen")]
    UnknownWidget(String),
    #[error("session has no tests configured")]
    NoTests,
    #[error("session is not complete (phase {0})")]
    Incomplete(SessionPhase),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutName {
    Numbers,
    Alphabets,
}

impl LayoutName {
    pub const ALL: [LayoutName; 2] = [LayoutName::Numbers, LayoutName::Alphabets];

    pub fn as_str(self) -> &'static str {
        match self {
            LayoutName::Numbers => "numbers",
            LayoutName::Alphabets => "alphabets",
        }
    }

    pub fn sequence(self) -> Vec<String> {
        match self {
            LayoutName::Numbers => NUMBERS_SEQUENCE.iter().map(|s| s.to_string()).collect(),
            LayoutName::Alphabets => ALPHABET_LABELS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl std::fmt::Display for LayoutName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LayoutName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "numbers" => Ok(LayoutName::Numbers),
            "alphabets" => Ok(LayoutName::Alphabets),
            other => Err(format!("unknown layout {other:?} (expected numbers or alphabets)")),
        }
    }
}

/// Head-to-screen distance band of a test run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Near,
    Mid,
    Far,
}

impl Distance {
    pub const ALL: [Distance; 3] = [Distance::Near, Distance::Mid, Distance::Far];

    /// Midpoint of the band in inches: 11-15, 15-19 and 19-23.
    pub fn nominal_inches(self) -> f64 {
        match self {
            Distance::Near => 13.0,
            Distance::Mid => 17.0,
            Distance::Far => 21.0,
        }
    }

    pub fn head_depth_m(self) -> f64 {
        self.nominal_inches() * 0.0254
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Distance::Near => "near",
            Distance::Mid => "mid",
            Distance::Far => "far",
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Distance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "near" => Ok(Distance::Near),
            "mid" => Ok(Distance::Mid),
            "far" => Ok(Distance::Far),
            other => Err(format!("unknown distance {other:?} (expected near, mid or far)")),
        }
    }
}

/// Target size and spacing. For the numbers keypad `gap` is the exact gap
/// between keys; for the alphabets grid it is the minimum gap, the actual
/// gaps being stretched to fill the screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub target_size: f64,
    pub gap: f64,
}

impl LayoutParams {
    pub fn default_for(name: LayoutName) -> Self {
        match name {
            LayoutName::Numbers => Self { target_size: 90.0, gap: 12.0 },
            LayoutName::Alphabets => Self { target_size: 110.0, gap: 8.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: String,
    pub label: String,
    pub rect: Rect,
}

impl Target {
    pub fn center(&self) -> ScreenPoint {
        self.rect.center()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub name: LayoutName,
    pub screen: ScreenGeometry,
    pub targets: Vec<Target>,
}

impl Layout {
    pub fn target(&self, label: &str) -> Option<&Target> {
        self.targets.iter().find(|t| t.label == label)
    }

    pub fn sequence(&self) -> Vec<String> {
        self.name.sequence()
    }

    pub fn widgets(&self, dwell: DwellConfig) -> Vec<Widget> {
        self.targets.iter().map(|t| Widget::new(t.id.clone(), t.rect).with_dwell(dwell)).collect()
    }
}

pub fn build_layout(name: LayoutName, screen: &ScreenGeometry, params: LayoutParams) -> Result<Layout, LayoutError> {
    if !(params.target_size > 0.0 && params.gap >= 0.0) {
        return Err(LayoutError::BadParams);
    }
    let overflow = || LayoutError::Overflow { layout: name, width: screen.width_pt, height: screen.height_pt };
    let s = params.target_size;
    let mut targets = Vec::new();
    let mut push = |label: &str, x: f64, y: f64| {
        targets.push(Target { id: label.to_string(), label: label.to_string(), rect: Rect::new(x, y, s, s) });
    };
    match name {
        LayoutName::Numbers => {
            // 3x3 keypad for 1-9 centred on the screen, "0" under the middle column.
            let pitch = s + params.gap;
            let left = screen.width_pt / 2.0 - 1.5 * s - params.gap;
            let top = screen.height_pt / 2.0 - 1.5 * s - params.gap;
            if left < 0.0 || top < 0.0 || top + 3.0 * pitch + s > screen.height_pt {
                return Err(overflow());
            }
            for digit in 1..=9 {
                let (row, col) = ((digit - 1) / 3, (digit - 1) % 3);
                push(&digit.to_string(), left + col as f64 * pitch, top + row as f64 * pitch);
            }
            push("0", left + pitch, top + 3.0 * pitch);
        }
        LayoutName::Alphabets => {
            let (cols, rows) = (3.0, 5.0);
            let gap_x = (screen.width_pt - cols * s) / (cols + 1.0);
            let gap_y = (screen.height_pt - rows * s) / (rows + 1.0);
            if gap_x < params.gap || gap_y < params.gap {
                return Err(overflow());
            }
            for (i, label) in ALPHABET_LABELS.iter().enumerate() {
                let (row, col) = ((i / 3) as f64, (i % 3) as f64);
                push(label, gap_x + col * (s + gap_x), gap_y + row * (s + gap_y));
            }
        }
    }
    Ok(Layout { name, screen: *screen, targets })
}

/// Which dwell event kind counts as a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectKind {
    #[default]
    Glance,
    Gaze,
}

impl SelectKind {
    pub fn event_kind(self) -> EventKind {
        match self {
            SelectKind::Glance => EventKind::Glance,
            SelectKind::Gaze => EventKind::Gaze,
        }
    }

    /// Hover time needed for this selection under the given thresholds.
    pub fn threshold_ms(self, dwell: &DwellConfig) -> f64 {
        match self {
            SelectKind::Glance => dwell.glance_ms,
            SelectKind::Gaze => dwell.gaze_ms,
        }
    }
}

/// Whether a session opens on the welcome and practice screens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    /// Start directly in the first test.
    #[default]
    Tests,
    /// Welcome and practice screens first, each left by dwelling on a button.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub participant_id: String,
    pub distance: Distance,
    pub tests: Vec<Layout>,
    pub dwell: DwellConfig,
    pub select: SelectKind,
    pub flow: Flow,
}

impl SessionConfig {
    /// One test with default dwell settings.
    pub fn single(participant_id: impl Into<String>, distance: Distance, layout: Layout) -> Self {
        Self {
            participant_id: participant_id.into(),
            distance,
            tests: vec![layout],
            dwell: DwellConfig::default(),
            select: SelectKind::default(),
            flow: Flow::default(),
        }
    }

    pub fn screen(&self) -> Option<ScreenGeometry> {
        self.tests.first().map(|l| l.screen)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "phase", content = "index")]
pub enum SessionPhase {
    Welcome,
    Practice,
    Test(usize),
    Summary,
}

impl SessionPhase {
    pub fn name(&self) -> String {
        match self {
            SessionPhase::Welcome => "welcome".into(),
            SessionPhase::Practice => "practice".into(),
            SessionPhase::Test(i) => format!("test{}", i + 1),
            SessionPhase::Summary => "summary".into(),
        }
    }
}

impl std::fmt::Display for SessionPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

/// One target acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub layout: LayoutName,
    pub index: usize,
    pub target_label: String,
    pub target_center: ScreenPoint,
    /// Centre of the previous target; the screen centre for the first trial.
    pub prev_center: ScreenPoint,
    pub selection_point: ScreenPoint,
    pub amplitude: f64,
    /// Since the previous selection, or since the test started for the first trial.
    pub movement_time_ms: f64,
    pub t_select: f64,
}

/// Session state machine.
#[derive(Debug, Clone)]
pub struct Session {
    config: SessionConfig,
    practice_layout: Option<Layout>,
    phase: SessionPhase,
    phase_start: Option<f64>,
    position: usize,
    last_select: Option<f64>,
    records: Vec<TrialRecord>,
    test_elapsed: Vec<f64>,
    ignored: usize,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Self, SessionError> {
        let Some(first) = config.tests.first() else {
            return Err(SessionError::NoTests);
        };
        let (phase, practice_layout) = match config.flow {
            Flow::Tests => (SessionPhase::Test(0), None),
            Flow::Full => {
                let keypad =
                    build_layout(LayoutName::Numbers, &first.screen, LayoutParams::default_for(LayoutName::Numbers))?;
                (SessionPhase::Welcome, Some(keypad))
            }
        };
        Ok(Self {
            config,
            practice_layout,
            phase,
            phase_start: None,
            position: 0,
            last_select: None,
            records: Vec::new(),
            test_elapsed: Vec::new(),
            ignored: 0,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn phase(&self) -> SessionPhase {
        self.phase
    }

    pub fn is_complete(&self) -> bool {
        self.phase == SessionPhase::Summary
    }

    /// Selections on targets other than the current one.
    pub fn ignored_selections(&self) -> usize {
        self.ignored
    }

    /// Elapsed time of each finished test, first selection anchor to last selection.
    pub fn test_elapsed_ms(&self) -> &[f64] {
        &self.test_elapsed
    }

    pub fn current_layout(&self) -> Option<&Layout> {
        match self.phase {
            SessionPhase::Test(i) => self.config.tests.get(i),
            SessionPhase::Practice => self.practice_layout.as_ref(),
            _ => None,
        }
    }

    /// Target sequence of the current test.
    pub fn current_sequence(&self) -> Vec<String> {
        match self.phase {
            SessionPhase::Test(i) => self.config.tests[i].sequence(),
            _ => Vec::new(),
        }
    }

    /// Label highlighted as the next target to select (orange).
    pub fn current_target(&self) -> Option<String> {
        self.current_sequence().get(self.position).cloned()
    }

    /// Label highlighted as the one after it (gray).
    pub fn following_target(&self) -> Option<String> {
        self.current_sequence().get(self.position + 1).cloned()
    }

    /// Widgets shown on the current screen.
    pub fn widgets(&self) -> Vec<Widget> {
        let dwell = self.config.dwell;
        let Some(screen) = self.config.screen() else { return Vec::new() };
        let button = |id: &str, y: f64| {
            let (w, h) = (160.0_f64.min(screen.width_pt), 60.0_f64.min(screen.height_pt / 4.0));
            Widget::new(id, Rect::new((screen.width_pt - w) / 2.0, y.min(screen.height_pt - h), w, h)).with_dwell(dwell)
        };
        match self.phase {
            SessionPhase::Welcome => vec![button(START_WIDGET, (screen.height_pt - 60.0) / 2.0)],
            SessionPhase::Practice => {
                let mut widgets = self.practice_layout.as_ref().map(|l| l.widgets(dwell)).unwrap_or_default();
                widgets.push(button(CONTINUE_WIDGET, screen.height_pt * 0.05));
                widgets
            }
            SessionPhase::Test(i) => self.config.tests[i].widgets(dwell),
            SessionPhase::Summary => Vec::new(),
        }
    }

    /// Notes that a frame at `t` was shown; the first frame of a phase
    /// anchors its start time.
    pub fn observe_frame(&mut self, t: f64) {
        if self.phase_start.is_none() {
            self.phase_start = Some(t);
        }
    }

    fn enter_phase(&mut self, phase: SessionPhase, t: f64) {
        self.phase = phase;
        self.phase_start = Some(t);
        self.position = 0;
        self.last_select = None;
    }

    /// Consumes one dwell event, returning a trial record when it completes
    /// a trial.
    pub fn advance(&mut self, event: &GazeEvent) -> Result<Option<TrialRecord>, SessionError> {
        let known = self.widgets().iter().any(|w| w.id == event.widget_id);
        if !known {
            return Err(SessionError::UnknownWidget(event.widget_id.clone()));
        }
        if event.kind != self.config.select.event_kind() {
            return Ok(None);
        }
        match self.phase {
            SessionPhase::Welcome => {
                if event.widget_id == START_WIDGET {
                    self.enter_phase(SessionPhase::Practice, event.t);
                }
                Ok(None)
            }
            SessionPhase::Practice => {
                if event.widget_id == CONTINUE_WIDGET {
                    self.enter_phase(SessionPhase::Test(0), event.t);
                }
                Ok(None)
            }
            SessionPhase::Test(i) => self.advance_test(i, event),
            SessionPhase::Summary => Ok(None),
        }
    }

    fn advance_test(&mut self, test: usize, event: &GazeEvent) -> Result<Option<TrialRecord>, SessionError> {
        let layout = &self.config.tests[test];
        let sequence = layout.sequence();
        let expected = &sequence[self.position];
        let target = layout.target(expected).expect("sequence labels exist in layout");
        if event.widget_id != target.id {
            self.ignored += 1;
            return Ok(None);
        }
        let prev_center = if self.position == 0 {
            layout.screen.center()
        } else {
            layout.target(&sequence[self.position - 1]).expect("sequence labels exist in layout").center()
        };
        let target_center = target.center();
        let start = self.last_select.or(self.phase_start).unwrap_or(event.t);
        let record = TrialRecord {
            layout: layout.name,
            index: self.position,
            target_label: expected.clone(),
            target_center,
            prev_center,
            selection_point: event.cursor,
            amplitude: prev_center.distance(&target_center),
            movement_time_ms: event.t - start,
            t_select: event.t,
        };
        self.records.push(record.clone());
        self.last_select = Some(event.t);
        self.position += 1;
        if self.position == sequence.len() {
            self.test_elapsed.push(event.t - self.phase_start.unwrap_or(event.t));
            let next =
                if test + 1 < self.config.tests.len() { SessionPhase::Test(test + 1) } else { SessionPhase::Summary };
            self.enter_phase(next, event.t);
        }
        Ok(Some(record))
    }

    /// Records of a complete session in selection order.
    pub fn session_log(&self) -> Result<&[TrialRecord], SessionError> {
        if !self.is_complete() {
            return Err(SessionError::Incomplete(self.phase));
        }
        Ok(&self.records)
    }

    /// Records collected so far, complete or not.
    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }
}
