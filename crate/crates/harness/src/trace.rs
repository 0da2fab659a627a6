//! Line-oriented pose trace files.
//!
//! ```text
//! HEADPOINT-TRACE 1
//! {"participant":"P01","distance":"near","layouts":["numbers"],...}
//! 0 1 0 0 0 0 1 0 0 0 0 1 0.3302 0 0 0 1
//! 16 ...
//! ```
//!
//! Each frame line holds the timestamp in milliseconds followed by the 16
//! row-major entries of the head transform. Reals are written as the
//! shortest decimal that parses back to the same bits.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use headpoint_core::geometry::Pose;
use thiserror::Error;

use crate::spec::SessionSpec;

pub const TRACE_MAGIC: &str = "HEADPOINT-TRACE";
pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: not a trace file (expected '{TRACE_MAGIC} <version>')")]
    NotATrace { line: usize },
    #[error("line {line}: unsupported trace version {found} (supported: {TRACE_VERSION})")]
    Version { line: usize, found: String },
    #[error("line {line}: bad header: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: malformed frame: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: non-finite value in frame")]
    NonFinite { line: usize },
    #[error("line {line}: timestamp {t} precedes previous timestamp {previous}")]
    NonMonotone { line: usize, t: f64, previous: f64 },
    #[error("frame {index}: {message}")]
    InvalidFrame { index: usize, message: String },
}

/// One recorded head transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub m: [f64; 16],
}

impl Frame {
    pub fn from_pose(pose: &Pose) -> Self {
        Self { t: pose.t_ms(), m: pose.to_row_major() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub spec: SessionSpec,
    pub frames: Vec<Frame>,
}

impl TraceFile {
    pub fn from_poses(spec: SessionSpec, poses: &[Pose]) -> Self {
        Self { spec, frames: poses.iter().map(Frame::from_pose).collect() }
    }

    /// Checks the invariants enforced on load.
    pub fn validate(&self) -> Result<(), TraceError> {
        let mut previous = f64::NEG_INFINITY;
        for (index, f) in self.frames.iter().enumerate() {
            if !f.t.is_finite() || f.m.iter().any(|v| !v.is_finite()) {
                return Err(TraceError::InvalidFrame { index, message: "non-finite value".into() });
            }
            if f.t < previous {
                return Err(TraceError::InvalidFrame { index, message: format!("timestamp {} decreases", f.t) });
            }
            previous = f.t;
        }
        Ok(())
    }

    pub fn to_text(&self) -> Result<String, TraceError> {
        self.validate()?;
        let header = serde_json::to_string(&self.spec).expect("spec serializes");
        let mut out = String::with_capacity(64 + header.len() + self.frames.len() * 128);
        let _ = writeln!(out, "{TRACE_MAGIC} {TRACE_VERSION}");
        out.push_str(&header);
        out.push('\n');
        for f in &self.frames {
            let _ = write!(out, "{}", f.t);
            for v in &f.m {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn save(&self, mut w: impl Write) -> Result<(), TraceError> {
        w.write_all(self.to_text()?.as_bytes())?;
        Ok(w.flush()?)
    }

    pub fn load(r: impl BufRead) -> Result<Self, TraceError> {
        let mut lines = r.lines();
        let first = lines.next().transpose()?.ok_or(TraceError::NotATrace { line: 1 })?;
        let mut parts = first.split_whitespace();
        if parts.next() != Some(TRACE_MAGIC) {
            return Err(TraceError::NotATrace { line: 1 });
        }
        let version = parts.next().unwrap_or("").to_string();
        if version.parse::<u32>().ok() != Some(TRACE_VERSION) || parts.next().is_some() {
            return Err(TraceError::Version { line: 1, found: version });
        }
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| TraceError::Header { line: 2, message: "missing metadata line".into() })?;
        let spec: SessionSpec =
            serde_json::from_str(&header).map_err(|e| TraceError::Header { line: 2, message: e.to_string() })?;

        let mut frames = Vec::new();
        let mut previous = f64::NEG_INFINITY;
        for (i, line) in lines.enumerate() {
            let line_no = i + 3;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut values = [0.0; 17];
            let mut n = 0;
            for field in line.split_whitespace() {
                if n == 17 {
                    return Err(TraceError::Malformed { line: line_no, message: "more than 17 fields".into() });
                }
                values[n] = field.parse::<f64>().map_err(|_| TraceError::Malformed {
                    line: line_no,
                    message: format!("'{field}' is not a number"),
                })?;
                n += 1;
            }
            if n < 17 {
                return Err(TraceError::Malformed { line: line_no, message: format!("expected 17 fields, found {n}") });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(TraceError::NonFinite { line: line_no });
            }
            let t = values[0];
            if t < previous {
                return Err(TraceError::NonMonotone { line: line_no, t, previous });
            }
            previous = t;
            let mut m = [0.0; 16];
            m.copy_from_slice(&values[1..]);
            frames.push(Frame { t, m });
        }
        Ok(Self { spec, frames })
    }

    pub fn load_path(path: &std::path::Path) -> Result<Self, TraceError> {
        Self::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
