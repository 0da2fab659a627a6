//! Session description shared by trace headers, event log headers and the
//! `hello` message.

use headpoint_core::dwell::DwellConfig;
use headpoint_core::geometry::{GeometryError, ScreenGeometry, SmoothingFilter};
use headpoint_core::trials::{
    build_layout, Distance, Flow, LayoutError, LayoutName, LayoutParams, SelectKind, SessionConfig,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("session lists no layouts")]
    NoLayouts,
    #[error("dwell thresholds must be positive with gaze after glance (glance {glance_ms}, gaze {gaze_ms:?})")]
    BadDwell { glance_ms: f64, gaze_ms: Option<f64> },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

/// Dwell thresholds in wire form; a missing or null `gaze_ms` disables gaze.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwellSpec {
    pub glance_ms: f64,
    #[serde(default)]
    pub gaze_ms: Option<f64>,
}

impl Default for DwellSpec {
    fn default() -> Self {
        let d = DwellConfig::default();
        Self { glance_ms: d.glance_ms, gaze_ms: Some(d.gaze_ms) }
    }
}

impl DwellSpec {
    pub fn to_config(self) -> Result<DwellConfig, SpecError> {
        let gaze_ms = self.gaze_ms.unwrap_or(f64::INFINITY);
        let ok = self.glance_ms > 0.0 && self.glance_ms.is_finite() && gaze_ms >= self.glance_ms && !gaze_ms.is_nan();
        if !ok {
            return Err(SpecError::BadDwell { glance_ms: self.glance_ms, gaze_ms: self.gaze_ms });
        }
        Ok(DwellConfig { glance_ms: self.glance_ms, gaze_ms })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSpec {
    pub participant: String,
    pub distance: Distance,
    /// Layouts of the test phases, in order.
    pub layouts: Vec<LayoutName>,
    #[serde(default)]
    pub dwell: DwellSpec,
    #[serde(default)]
    pub select: SelectKind,
    #[serde(default)]
    pub flow: Flow,
    /// Falls back to the process-wide screen profile when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen: Option<ScreenGeometry>,
    /// Cursor smoothing factor in (0, 1]; 1 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
    /// Generator seed of synthetic traces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SessionSpec {
    pub fn new(participant: impl Into<String>, distance: Distance, layouts: Vec<LayoutName>) -> Self {
        Self {
            participant: participant.into(),
            distance,
            layouts,
            dwell: DwellSpec::default(),
            select: SelectKind::default(),
            flow: Flow::default(),
            screen: None,
            smoothing: None,
            seed: None,
        }
    }

    pub fn screen_or(&self, fallback: &ScreenGeometry) -> ScreenGeometry {
        self.screen.unwrap_or(*fallback)
    }

    pub fn filter(&self) -> Result<SmoothingFilter, SpecError> {
        match self.smoothing {
            Some(alpha) => Ok(SmoothingFilter::new(alpha)?),
            None => Ok(SmoothingFilter::passthrough()),
        }
    }

    pub fn to_config(&self, fallback_screen: &ScreenGeometry) -> Result<SessionConfig, SpecError> {
        if self.layouts.is_empty() {
            return Err(SpecError::NoLayouts);
        }
        let screen = self.screen_or(fallback_screen);
        screen.validate()?;
        let tests = self
            .layouts
            .iter()
            .map(|&name| build_layout(name, &screen, LayoutParams::default_for(name)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SessionConfig {
            participant_id: self.participant.clone(),
            distance: self.distance,
            tests,
            dwell: self.dwell.to_config()?,
            select: self.select,
            flow: self.flow,
        })
    }
}
