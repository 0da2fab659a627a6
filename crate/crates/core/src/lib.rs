//! Hands-free pointing engine driven by head pose.
//!
//! The crate is organised the way the data flows:
//!
//! - [`geometry`] turns a head pose into a cursor position by casting a
//!   virtual stylus ray from the head centre onto the screen plane.
//! - [`dwell`] watches the cursor stream and emits hover and dwell-selection
//!   events per widget.
//! - [`trials`] holds the two target-acquisition test layouts and the session
//!   state machine that turns selections into trial records.
//! - [`analysis`] computes Fitts' law throughput with the standard-deviation
//!   method, box summaries and per-target covariance eigen-analysis.
//! - [`synth`] generates deterministic synthetic head-motion traces that drive
//!   the whole pipeline end to end.

pub mod analysis;
pub mod dwell;
pub mod geometry;
pub mod synth;
pub mod trials;

pub use dwell::{DwellConfig, DwellEngine, EventKind, GazeEvent, Rect, Widget};
pub use geometry::{HeadModel, PointerMapper, Pose, ScreenGeometry, ScreenPoint, SmoothingFilter};
pub use trials::{Distance, Layout, LayoutName, SelectKind, Session, SessionConfig, TrialRecord};
