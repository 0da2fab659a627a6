//! Deterministic synthetic head-motion traces.
//!
//! For every target in a sequence the cursor follows a minimum-jerk path from
//! its current position to the target centre, then holds there with seeded
//! Gaussian jitter long enough for the dwell selection to fire. Each cursor
//! position is turned into a head pose with the inverse stylus mapping, so a
//! trace replayed through the pointer model reproduces the cursor path.
//!
//! Jitter is drawn from a ChaCha stream keyed by
//! `(seed, participant, distance, layout, trial)` with the frame index as the
//! stream id, so any frame can be regenerated in isolation.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::geometry::{pose_for_screen_point, GeometryError, Pose, ScreenPoint};
use crate::trials::{Distance, Layout, LayoutName};

/// Shortest movement duration, so adjacent targets are never hopped instantly.
pub const MIN_MOVE_MS: f64 = 200.0;
/// Jitter is truncated at this many standard deviations.
pub const NOISE_CLIP_SIGMAS: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid motion parameter: {0}")]
    BadParams(&'static str),
    #[error("sequence label {0:?} is not a target of the layout")]
    UnknownLabel(String),
    #[error("jitter of up to {extent:.3} pt would leave target {label:?} (half size {half:.3} pt)")]
    NoiseTooLarge { label: String, extent: f64, half: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Principal direction and elongation of the hold jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anisotropy {
    /// Angle of the major axis in screen coordinates (x right, y down), degrees.
    pub axis_deg: f64,
    /// Major over minor standard deviation, at least 1.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionParams {
    pub head_depth_m: f64,
    /// Movement duration per point of amplitude.
    pub move_ms_per_pt: f64,
    /// Hold time at each target; must cover the selection threshold.
    pub dwell_hold_ms: f64,
    /// Jitter standard deviation (major axis when anisotropic).
    pub noise_sigma_pt: f64,
    pub anisotropy: Option<Anisotropy>,
    pub frame_interval_ms: f64,
    pub seed: u64,
}

impl MotionParams {
    pub fn new(distance: Distance, seed: u64) -> Self {
        Self {
            head_depth_m: distance.head_depth_m(),
            move_ms_per_pt: 3.0,
            dwell_hold_ms: 1000.0,
            noise_sigma_pt: 5.0,
            anisotropy: None,
            frame_interval_ms: 16.0,
            seed,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.head_depth_m) {
            return Err(SynthError::BadParams("head depth must be positive"));
        }
        if !positive(self.move_ms_per_pt) || !positive(self.dwell_hold_ms) || !positive(self.frame_interval_ms) {
            return Err(SynthError::BadParams("durations must be positive"));
        }
        if !(self.noise_sigma_pt >= 0.0 && self.noise_sigma_pt.is_finite()) {
            return Err(SynthError::BadParams("noise sigma must be non-negative"));
        }
        if let Some(a) = self.anisotropy {
            if !(a.ratio >= 1.0 && a.ratio.is_finite() && a.axis_deg.is_finite()) {
                return Err(SynthError::BadParams("anisotropy ratio must be at least 1"));
            }
        }
        Ok(())
    }

    /// Standard deviations along the major and minor axes, and the axis angle.
    fn jitter_axes(&self) -> (f64, f64, f64) {
        match self.anisotropy {
            Some(a) => (self.noise_sigma_pt, self.noise_sigma_pt / a.ratio, a.axis_deg.to_radians()),
            None => (self.noise_sigma_pt, self.noise_sigma_pt, 0.0),
        }
    }

    /// Largest possible jitter offset along x and y.
    fn jitter_extent(&self) -> (f64, f64) {
        let (major, minor, angle) = self.jitter_axes();
        let (s, c) = angle.sin_cos();
        (
            NOISE_CLIP_SIGMAS * (major * c.abs() + minor * s.abs()),
            NOISE_CLIP_SIGMAS * (major * s.abs() + minor * c.abs()),
        )
    }

    pub fn move_duration_ms(&self, amplitude: f64) -> f64 {
        (self.move_ms_per_pt * amplitude).max(MIN_MOVE_MS)
    }

    pub fn move_frames(&self, amplitude: f64) -> usize {
        (self.move_duration_ms(amplitude) / self.frame_interval_ms).ceil() as usize
    }

    /// One frame more than the hold time strictly needs, so that a selection
    /// triggered on the first hold frame still gets its full dwell.
    pub fn hold_frames(&self) -> usize {
        (self.dwell_hold_ms / self.frame_interval_ms).ceil() as usize + 1
    }
}

/// Identifies one generated session inside a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SynthKey {
    pub participant: u32,
    pub distance: Distance,
    pub layout: LayoutName,
}

/// Minimum-jerk interpolation from `start` to `end` over `duration`.
pub fn min_jerk(start: f64, end: f64, duration: f64, t: f64) -> f64 {
    let tau = (t / duration).clamp(0.0, 1.0);
    let shape = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
    start + (end - start) * shape
}

/// Frame count of a synthetic session: one start frame at the screen centre
/// plus move and hold frames for every trial.
pub fn expected_frame_count(layout: &Layout, sequence: &[String], params: &MotionParams) -> Result<usize, SynthError> {
    let mut cursor = layout.screen.center();
    let mut frames = 1;
    for label in sequence {
        let target = layout.target(label).ok_or_else(|| SynthError::UnknownLabel(label.clone()))?.center();
        frames += params.move_frames(cursor.distance(&target)) + params.hold_frames();
        cursor = target;
    }
    Ok(frames)
}

fn rng_for(params: &MotionParams, key: &SynthKey, trial: usize, frame: usize) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&params.seed.to_le_bytes());
    seed[8..12].copy_from_slice(&key.participant.to_le_bytes());
    seed[12] = key.distance as u8;
    seed[13] = key.layout as u8;
    seed[16..24].copy_from_slice(&(trial as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(frame as u64);
    rng
}

/// Jitter offset of one hold frame.
pub fn hold_jitter(params: &MotionParams, key: &SynthKey, trial: usize, frame: usize) -> [f64; 2] {
    if params.noise_sigma_pt == 0.0 {
        return [0.0, 0.0];
    }
    let (major, minor, angle) = params.jitter_axes();
    let mut rng = rng_for(params, key, trial, frame);
    let mut draw = |sigma: f64| {
        let z: f64 = StandardNormal.sample(&mut rng);
        sigma * z.clamp(-NOISE_CLIP_SIGMAS, NOISE_CLIP_SIGMAS)
    };
    let (a, b) = (draw(major), draw(minor));
    let (s, c) = angle.sin_cos();
    [a * c - b * s, a * s + b * c]
}

/// Cursor path of a synthetic session, one point per frame.
pub fn synth_cursor_path(
    layout: &Layout,
    sequence: &[String],
    params: &MotionParams,
    key: &SynthKey,
) -> Result<Vec<(f64, ScreenPoint)>, SynthError> {
    params.validate()?;
    let (ext_x, ext_y) = params.jitter_extent();
    for label in sequence {
        let target = layout.target(label).ok_or_else(|| SynthError::UnknownLabel(label.clone()))?;
        let (hw, hh) = (target.rect.width / 2.0, target.rect.height / 2.0);
        if ext_x >= hw || ext_y >= hh {
            let (extent, half) = if ext_x / hw >= ext_y / hh { (ext_x, hw) } else { (ext_y, hh) };
            return Err(SynthError::NoiseTooLarge { label: label.clone(), extent, half });
        }
    }

    let dt = params.frame_interval_ms;
    let mut path = Vec::with_capacity(expected_frame_count(layout, sequence, params)?);
    let mut t = 0.0;
    let mut cursor = layout.screen.center();
    path.push((t, cursor));
    for (trial, label) in sequence.iter().enumerate() {
        let target = layout.target(label).expect("checked above").center();
        let duration = params.move_duration_ms(cursor.distance(&target));
        for k in 1..=params.move_frames(cursor.distance(&target)) {
            let elapsed = k as f64 * dt;
            t += dt;
            let x = min_jerk(cursor.x, target.x, duration, elapsed);
            let y = min_jerk(cursor.y, target.y, duration, elapsed);
            path.push((t, ScreenPoint::new(x, y, true)));
        }
        for frame in 0..params.hold_frames() {
            t += dt;
            let [jx, jy] = hold_jitter(params, key, trial, frame);
            path.push((t, ScreenPoint::new(target.x + jx, target.y + jy, true)));
        }
        cursor = target;
    }
    Ok(path)
}

/// Pose trace of a synthetic session with the head straight in front of the
/// screen centre at `params.head_depth_m`.
pub fn synth_session(
    layout: &Layout,
    sequence: &[String],
    params: &MotionParams,
    key: &SynthKey,
) -> Result<Vec<Pose>, SynthError> {
    let head = Vector3::new(0.0, 0.0, params.head_depth_m);
    synth_cursor_path(layout, sequence, params, key)?
        .into_iter()
        .map(|(t, p)| Ok(pose_for_screen_point(&p, head, &layout.screen)?.with_time(t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScreenGeometry;
    use crate::trials::{build_layout, LayoutParams};

    fn layout(name: LayoutName) -> Layout {
        build_layout(name, &ScreenGeometry::default(), LayoutParams::default_for(name)).unwrap()
    }

    fn key() -> SynthKey {
        SynthKey { participant: 3, distance: Distance::Mid, layout: LayoutName::Numbers }
    }

    #[test]
    fn min_jerk_endpoints_and_midpoint() {
        assert_eq!(min_jerk(2.0, 12.0, 400.0, 0.0), 2.0);
        assert_eq!(min_jerk(2.0, 12.0, 400.0, 400.0), 12.0);
        assert_eq!(min_jerk(2.0, 12.0, 400.0, 200.0), 7.0);
    }

    #[test]
    fn min_jerk_quarter() {
        // 10/64 - 15/256 + 6/1024 = 106/1024
        let v = min_jerk(0.0, 1.0, 1.0, 0.25);
        assert!((v - 106.0 / 1024.0).abs() < 1e-15);
        assert!((v - 0.103516).abs() < 1e-6);
    }

    #[test]
    fn trace_length_matches_prediction() {
        let l = layout(LayoutName::Numbers);
        let p = MotionParams::new(Distance::Mid, 1);
        let trace = synth_session(&l, &l.sequence(), &p, &key()).unwrap();
        assert_eq!(trace.len(), expected_frame_count(&l, &l.sequence(), &p).unwrap());
        assert!(trace.windows(2).all(|w| w[1].t_ms() - w[0].t_ms() == 16.0));
    }

    #[test]
    fn same_seed_same_trace() {
        let l = layout(LayoutName::Alphabets);
        let p = MotionParams::new(Distance::Far, 9);
        let a = synth_session(&l, &l.sequence(), &p, &key()).unwrap();
        let b = synth_session(&l, &l.sequence(), &p, &key()).unwrap();
        assert_eq!(a, b);
        let other = MotionParams { seed: 10, ..p };
        assert_ne!(a, synth_session(&l, &l.sequence(), &other, &key()).unwrap());
    }

    #[test]
    fn jitter_is_keyed_per_frame() {
        let p = MotionParams::new(Distance::Mid, 5);
        let a = hold_jitter(&p, &key(), 4, 17);
        assert_eq!(a, hold_jitter(&p, &key(), 4, 17));
        assert_ne!(a, hold_jitter(&p, &key(), 4, 18));
        assert_ne!(a, hold_jitter(&p, &key(), 5, 17));
        let bound = NOISE_CLIP_SIGMAS * p.noise_sigma_pt;
        for f in 0..500 {
            let [x, y] = hold_jitter(&p, &key(), 0, f);
            assert!(x.abs() <= bound && y.abs() <= bound);
        }
    }

    #[test]
    fn rejects_noise_that_leaves_targets() {
        let l = layout(LayoutName::Numbers);
        let p = MotionParams { noise_sigma_pt: 15.0, ..MotionParams::new(Distance::Near, 1) };
        assert!(matches!(synth_session(&l, &l.sequence(), &p, &key()), Err(SynthError::NoiseTooLarge { .. })));
        let p = MotionParams { frame_interval_ms: 0.0, ..MotionParams::new(Distance::Near, 1) };
        assert!(matches!(synth_session(&l, &l.sequence(), &p, &key()), Err(SynthError::BadParams(_))));
    }

    #[test]
    fn noise_free_hold_sits_on_target_centre() {
        let l = layout(LayoutName::Numbers);
        let p = MotionParams { noise_sigma_pt: 0.0, ..MotionParams::new(Distance::Near, 1) };
        let path = synth_cursor_path(&l, &l.sequence(), &p, &key()).unwrap();
        let last = path.last().unwrap().1;
        assert_eq!(last, l.target("5").unwrap().center());
    }
}
