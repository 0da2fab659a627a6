//! Synthetic studies and the analysis of their event logs.

use headpoint_core::analysis::{report, sequence_stats, AnalysisError, Dispersion, Grouping, KeyedTrial, SkippedGroup};
use headpoint_core::geometry::ScreenGeometry;
use headpoint_core::synth::{synth_session, Anisotropy, MotionParams, SynthError, SynthKey};
use headpoint_core::trials::{build_layout, Distance, LayoutError, LayoutName, LayoutParams};
use rayon::prelude::*;
use thiserror::Error;

use crate::eventlog::EventLog;
use crate::spec::SessionSpec;
use crate::trace::TraceFile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StudyError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("{name}: {source}")]
    Synth {
        name: String,
        #[source]
        source: SynthError,
    },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Motion settings that override the generator defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotionOverrides {
    pub noise_sigma_pt: Option<f64>,
    pub frame_interval_ms: Option<f64>,
    pub dwell_hold_ms: Option<f64>,
    pub move_ms_per_pt: Option<f64>,
    pub anisotropy: Option<Anisotropy>,
}

impl MotionOverrides {
    pub fn params(&self, distance: Distance, seed: u64) -> MotionParams {
        let mut p = MotionParams::new(distance, seed);
        p.noise_sigma_pt = self.noise_sigma_pt.unwrap_or(p.noise_sigma_pt);
        p.frame_interval_ms = self.frame_interval_ms.unwrap_or(p.frame_interval_ms);
        p.dwell_hold_ms = self.dwell_hold_ms.unwrap_or(p.dwell_hold_ms);
        p.move_ms_per_pt = self.move_ms_per_pt.unwrap_or(p.move_ms_per_pt);
        p.anisotropy = self.anisotropy.or(p.anisotropy);
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyPlan {
    pub participants: u32,
    pub seed: u64,
    pub distances: Vec<Distance>,
    pub layouts: Vec<LayoutName>,
    pub motion: MotionOverrides,
}

impl StudyPlan {
    /// Every distance and layout.
    pub fn full(participants: u32, seed: u64) -> Self {
        Self {
            participants,
            seed,
            distances: Distance::ALL.to_vec(),
            layouts: LayoutName::ALL.to_vec(),
            motion: MotionOverrides::default(),
        }
    }
}

pub fn participant_id(index: u32) -> String {
    format!("P{index:02}")
}

/// File stem of one generated session, e.g. `P07_mid_alphabets`.
pub fn session_name(participant: &str, distance: Distance, layout: LayoutName) -> String {
    format!("{participant}_{distance}_{layout}")
}

/// One trace per participant, distance and layout, ordered by name.
pub fn synth_study(plan: &StudyPlan, screen: &ScreenGeometry) -> Result<Vec<(String, TraceFile)>, StudyError> {
    let layouts = plan
        .layouts
        .iter()
        .map(|&name| build_layout(name, screen, LayoutParams::default_for(name)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut jobs = Vec::new();
    for p in 1..=plan.participants {
        for &distance in &plan.distances {
            for layout in &layouts {
                jobs.push((p, distance, layout));
            }
        }
    }
    let mut traces = jobs
        .into_par_iter()
        .map(|(p, distance, layout)| {
            let participant = participant_id(p);
            let name = session_name(&participant, distance, layout.name);
            let params = plan.motion.params(distance, plan.seed);
            let key = SynthKey { participant: p, distance, layout: layout.name };
            let poses = synth_session(layout, &layout.sequence(), &params, &key)
                .map_err(|source| StudyError::Synth { name: name.clone(), source })?;
            let mut spec = SessionSpec::new(participant, distance, vec![layout.name]);
            spec.screen = Some(*screen);
            spec.seed = Some(plan.seed);
            Ok((name, TraceFile::from_poses(spec, &poses)))
        })
        .collect::<Result<Vec<_>, StudyError>>()?;
    traces.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(traces)
}

/// CSV documents produced by `analyze`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutputs {
    pub trials_csv: String,
    pub sequences_csv: String,
    pub eigen_csv: String,
    pub box_csv: String,
    pub skipped: Vec<SkippedGroup>,
}

impl AnalysisOutputs {
    pub fn files(&self) -> [(&'static str, &str); 4] {
        [
            ("trials.csv", &self.trials_csv),
            ("sequences.csv", &self.sequences_csv),
            ("eigen.csv", &self.eigen_csv),
            ("box.csv", &self.box_csv),
        ]
    }
}

/// Analyzes a set of event logs. Output does not depend on the order of `logs`.
pub fn analyze_logs(
    logs: &[EventLog],
    grouping: Grouping,
    dispersion: Dispersion,
) -> Result<AnalysisOutputs, StudyError> {
    let mut trials: Vec<KeyedTrial> = logs.iter().flat_map(EventLog::keyed_trials).collect();
    // Fixed accumulation order keeps sums bit-identical whatever the input order.
    trials.sort_by(|a, b| a.key.cmp(&b.key).then(a.record.index.cmp(&b.record.index)));
    let per_sequence = sequence_stats(&trials, Grouping::PerSequence, dispersion);
    let stats = match grouping {
        Grouping::PerSequence => per_sequence.clone(),
        Grouping::Pooled => sequence_stats(&trials, Grouping::Pooled, dispersion),
    };
    Ok(AnalysisOutputs {
        trials_csv: report::trials_csv(&trials),
        sequences_csv: report::sequences_csv(&stats.groups),
        eigen_csv: report::eigen_csv(&trials),
        box_csv: report::box_csv(&trials, &per_sequence.groups)?,
        skipped: stats.skipped,
    })
}
