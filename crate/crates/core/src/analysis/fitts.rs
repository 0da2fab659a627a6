use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::geometry::ScreenPoint;
use crate::trials::{Distance, LayoutName, TrialRecord};

/// Ratio between effective width and the spread of selection coordinates.
pub const EFFECTIVE_WIDTH_FACTOR: f64 = 4.133;

/// Standard deviation denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispersion {
    /// `n - 1`
    #[default]
    Sample,
    /// `n`
    Population,
}

/// Signed offset of `point` from `target` along the unit vector `prev -> target`.
pub fn project_onto_axis(prev: &ScreenPoint, target: &ScreenPoint, point: &ScreenPoint) -> Result<f64, AnalysisError> {
    let (ax, ay) = (target.x - prev.x, target.y - prev.y);
    let len = ax.hypot(ay);
    if len.is_nan() || len <= 0.0 {
        return Err(AnalysisError::DegenerateAxis);
    }
    Ok(((point.x - target.x) * ax + (point.y - target.y) * ay) / len)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveWidth {
    pub sx: f64,
    pub we: f64,
}

pub fn effective_width(projections: &[f64]) -> Result<EffectiveWidth, AnalysisError> {
    effective_width_with(projections, Dispersion::Sample)
}

pub fn effective_width_with(projections: &[f64], dispersion: Dispersion) -> Result<EffectiveWidth, AnalysisError> {
    let n = projections.len();
    if n < 2 {
        return Err(AnalysisError::TooFew { needed: 2, got: n });
    }
    if projections.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let mean = projections.iter().sum::<f64>() / n as f64;
    let ss: f64 = projections.iter().map(|v| (v - mean) * (v - mean)).sum();
    let denom = match dispersion {
        Dispersion::Sample => (n - 1) as f64,
        Dispersion::Population => n as f64,
    };
    let sx = (ss / denom).sqrt();
    Ok(EffectiveWidth { sx, we: EFFECTIVE_WIDTH_FACTOR * sx })
}

/// `log2(A / W_e + 1)` in bits.
pub fn effective_id(amplitude: f64, we: f64) -> Result<f64, AnalysisError> {
    if !amplitude.is_finite() || !we.is_finite() {
        return Err(AnalysisError::NonFinite);
    }
    if amplitude < 0.0 {
        return Err(AnalysisError::NegativeAmplitude(amplitude));
    }
    if we <= 0.0 {
        return Err(AnalysisError::ZeroWidth);
    }
    Ok((amplitude / we + 1.0).log2())
}

/// Bits per second.
pub fn throughput(id_bits: f64, mt_s: f64) -> Result<f64, AnalysisError> {
    if mt_s.is_nan() || mt_s <= 0.0 {
        return Err(AnalysisError::NonPositiveTime(mt_s));
    }
    Ok(id_bits / mt_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceStats {
    pub we: f64,
    pub ide: f64,
    pub mt_mean_s: f64,
    pub tp: f64,
    pub n_trials: usize,
    pub sx: f64,
    pub a_mean: f64,
}

impl SequenceStats {
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a TrialRecord>,
        dispersion: Dispersion,
    ) -> Result<Self, AnalysisError> {
        let mut projections = Vec::new();
        let (mut a_sum, mut mt_sum) = (0.0, 0.0);
        for r in records {
            projections.push(project_onto_axis(&r.prev_center, &r.target_center, &r.selection_point)?);
            a_sum += r.amplitude;
            mt_sum += r.movement_time_ms;
        }
        let n = projections.len();
        let width = effective_width_with(&projections, dispersion)?;
        let a_mean = a_sum / n as f64;
        let mt_mean_s = mt_sum / n as f64 / 1000.0;
        let ide = effective_id(a_mean, width.we)?;
        let tp = throughput(ide, mt_mean_s)?;
        Ok(Self { we: width.we, ide, mt_mean_s, tp, n_trials: n, sx: width.sx, a_mean })
    }
}

/// Identity of one motion sequence: a participant's run of one layout at one
/// distance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SequenceKey {
    pub participant: String,
    pub distance: Distance,
    pub layout: LayoutName,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyedTrial {
    pub key: SequenceKey,
    pub record: TrialRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grouping {
    /// One group per participant, distance and layout.
    #[default]
    PerSequence,
    /// All participants pooled per distance and layout.
    Pooled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    /// `None` for pooled groups.
    pub participant: Option<String>,
    pub distance: Distance,
    pub layout: LayoutName,
    pub stats: SequenceStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedGroup {
    pub participant: Option<String>,
    pub distance: Distance,
    pub layout: LayoutName,
    pub reason: AnalysisError,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceReport {
    pub groups: Vec<GroupStats>,
    pub skipped: Vec<SkippedGroup>,
}

/// Per-group Fitts statistics, ordered by (participant, distance, layout).
///
/// Groups that cannot be evaluated (fewer than two trials, zero spread) are
/// reported in `skipped` instead of failing the whole report.
pub fn sequence_stats(trials: &[KeyedTrial], grouping: Grouping, dispersion: Dispersion) -> SequenceReport {
    type GroupKey = (Option<String>, Distance, LayoutName);
    let mut groups: BTreeMap<GroupKey, Vec<&TrialRecord>> = BTreeMap::new();
    for t in trials {
        let participant = match grouping {
            Grouping::PerSequence => Some(t.key.participant.clone()),
            Grouping::Pooled => None,
        };
        groups.entry((participant, t.key.distance, t.key.layout)).or_default().push(&t.record);
    }
    let mut report = SequenceReport::default();
    for ((participant, distance, layout), records) in groups {
        match SequenceStats::from_records(records, dispersion) {
            Ok(stats) => report.groups.push(GroupStats { participant, distance, layout, stats }),
            Err(reason) => report.skipped.push(SkippedGroup { participant, distance, layout, reason }),
        }
    }
    report
}
