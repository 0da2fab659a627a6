//! Performance analysis of trial logs.
//!
//! Throughput uses the standard-deviation method: selection points are
//! projected onto each trial's task axis (previous target centre to current
//! target centre), the spread of those projections gives the effective width
//! `W_e = 4.133 * S_x`, and `TP = log2(A / W_e + 1) / MT`.

mod fitts;
pub mod report;
mod summary;

use thiserror::Error;

pub use fitts::{
    effective_id, effective_width, effective_width_with, project_onto_axis, sequence_stats, throughput, Dispersion,
    EffectiveWidth, GroupStats, Grouping, KeyedTrial, SequenceKey, SequenceReport, SequenceStats, SkippedGroup,
    EFFECTIVE_WIDTH_FACTOR,
};
pub use summary::{box_stats, covariance_eigen, BoxStats, CovarianceEigen};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("task axis has zero length")]
    DegenerateAxis,
    #[error("need at least {needed} values, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("effective width is zero; selections have no spread")]
    ZeroWidth,
    #[error("movement amplitude must be non-negative, got {0}")]
    NegativeAmplitude(f64),
    #[error("movement time must be positive, got {0} s")]
    NonPositiveTime(f64),
    #[error("input contains a non-finite value")]
    NonFinite,
}
