//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use headpoint_core::analysis::{
    covariance_eigen, effective_id, effective_width, throughput, Dispersion, SequenceStats,
};
use headpoint_core::dwell::{DwellConfig, DwellEngine, EventKind, Rect, Widget};
use headpoint_core::geometry::{
    intersect_plane, pointer_from_pose, pose_for_screen_point, update_ray, HeadModel, Pose, ScreenGeometry,
    ScreenPoint, SmoothingFilter,
};
use headpoint_core::synth::Anisotropy;
use headpoint_core::trials::{Distance, LayoutName, TrialRecord};
use headpoint_harness::protocol::Outbound;
use headpoint_harness::replay::replay;
use headpoint_harness::study::{synth_study, MotionOverrides, StudyPlan};
use headpoint_harness::trace::{Frame, TraceFile};
use headpoint_harness::SessionSpec;
use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

const DEPTHS: [f64; 3] = [0.3302, 0.4318, 0.5334];

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn geometry_round_trip() -> Outcome {
    let screen = ScreenGeometry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let targets: Vec<ScreenPoint> = (0..1000)
        .map(|_| {
            ScreenPoint::new(rng.random_range(0.0..screen.width_pt), rng.random_range(0.0..screen.height_pt), true)
        })
        .collect();
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for depth in DEPTHS {
        for target in &targets {
            let pose =
                pose_for_screen_point(target, Vector3::new(0.0, 0.0, depth), &screen).map_err(|e| e.to_string())?;
            let got = pointer_from_pose(&HeadModel::default(), &pose, &screen, &mut SmoothingFilter::passthrough());
            worst = worst.max((got.x - target.x).abs()).max((got.y - target.y).abs());
        }
    }
    let elapsed = started.elapsed();
    check(
        worst < 1e-9 && elapsed < Duration::from_secs(1),
        format!("3000 round trips, max error {worst:.3e} pt, {} ms", elapsed.as_millis()),
    )
}

fn distance_law() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for depth in DEPTHS {
        for i in -3000..=3000 {
            let yaw = (i as f64 / 100.0).to_radians();
            let rotation = Rotation3::from_axis_angle(&Vector3::y_axis(), yaw);
            let pose = Pose::from_parts(0.0, rotation, Vector3::new(0.0, 0.0, depth)).map_err(|e| e.to_string())?;
            let [bx, _] = intersect_plane(&update_ray(&HeadModel::default(), &pose), 0.0).map_err(|_| "no hit")?;
            let expected = depth * yaw.abs().tan();
            let err = if expected == 0.0 { bx.abs() } else { (bx.abs() - expected).abs() / expected };
            worst = worst.max(err);
            checked += 1;
        }
    }
    check(worst <= 1e-12, format!("{checked} yaw/depth pairs, max relative error {worst:.3e}"))
}

fn dwell_timing() -> Outcome {
    let mut engine = DwellEngine::new(375.0, 812.0);
    engine.register_widget(Widget::new("k", Rect::new(100.0, 100.0, 90.0, 90.0))).map_err(|e| e.to_string())?;
    let inside = ScreenPoint::new(145.0, 145.0, true);
    let (mut glance, mut gaze) = (None, None);
    for frame in 0..200 {
        let t = frame as f64 * 16.0;
        for ev in engine.process_frame(t, inside).map_err(|e| e.to_string())? {
            match ev.kind {
                EventKind::Glance => glance = glance.or(Some(ev.t)),
                EventKind::Gaze => gaze = gaze.or(Some(ev.t)),
                _ => {}
            }
        }
    }
    let timing_ok = glance == Some(1008.0) && gaze == Some(2000.0);

    let (walks, mut selections, mut repeats) = (100_000, 0u64, 0u64);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let widgets =
        [Rect::new(0.0, 0.0, 100.0, 100.0), Rect::new(150.0, 0.0, 100.0, 100.0), Rect::new(0.0, 300.0, 375.0, 80.0)];
    let dwell = DwellConfig { glance_ms: 300.0, gaze_ms: 600.0 };
    for _ in 0..walks {
        let mut engine = DwellEngine::new(375.0, 812.0);
        for (i, rect) in widgets.iter().enumerate() {
            engine.register_widget(Widget::new(i.to_string(), *rect).with_dwell(dwell)).map_err(|e| e.to_string())?;
        }
        // Per widget: selection kinds seen since the last enter.
        let mut seen = [[false; 2]; 3];
        let mut t = 0.0;
        for _ in 0..rng.random_range(1..8) {
            let target = rng.random_range(0..4);
            let point = match target {
                3 => ScreenPoint::new(330.0, 700.0, true),
                i => {
                    let r = widgets[i];
                    ScreenPoint::new(r.x + rng.random_range(0.0..r.width), r.y + rng.random_range(0.0..r.height), true)
                }
            };
            for _ in 0..rng.random_range(1..60) {
                for ev in engine.process_frame(t, point).map_err(|e| e.to_string())? {
                    let w: usize = ev.widget_id.parse().expect("numeric id");
                    match ev.kind {
                        EventKind::Enter | EventKind::Exit => seen[w] = [false; 2],
                        EventKind::Glance | EventKind::Gaze => {
                            let k = (ev.kind == EventKind::Gaze) as usize;
                            selections += 1;
                            repeats += seen[w][k] as u64;
                            seen[w][k] = true;
                        }
                        EventKind::Progress => {}
                    }
                }
                t += 16.0;
            }
        }
    }
    check(
        timing_ok && repeats == 0 && selections > 0,
        format!(
            "glance at {glance:?} ms, gaze at {gaze:?} ms; {walks} walks, {selections} selections, {repeats} repeats"
        ),
    )
}

fn fitts_oracle() -> Outcome {
    let w = effective_width(&[-10.0, 0.0, 10.0]).map_err(|e| e.to_string())?;
    let id_one = effective_id(41.33, 41.33).map_err(|e| e.to_string())?;
    let id_four = effective_id(4.0 * 41.33, 41.33).map_err(|e| e.to_string())?;
    let log2_5 = 5f64.ln() / 2f64.ln();
    let tp = throughput(id_four, 1.5).map_err(|e| e.to_string())?;
    let ok = (w.sx - 10.0).abs() < 1e-9
        && (w.we - 41.33).abs() < 1e-9
        && (id_one - 1.0).abs() < 1e-9
        && (id_four - log2_5).abs() < 1e-9
        && (id_four - 2.32193).abs() < 5e-6
        && (tp - log2_5 / 1.5).abs() < 1e-9;
    check(ok, format!("W_e {:.9}, ID_e {id_one:.9} and {id_four:.9} bits, TP {tp:.9} bps", w.we))
}

fn estimator_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = Normal::new(0.0, 10.0).map_err(|e| e.to_string())?;
    let offsets: Vec<f64> = (0..10_000).map(|_| normal.sample(&mut rng)).collect();
    let we = effective_width(&offsets).map_err(|e| e.to_string())?.we;
    let center = ScreenPoint::new(100.0, 0.0, true);
    let records: Vec<TrialRecord> = offsets
        .iter()
        .enumerate()
        .map(|(index, o)| TrialRecord {
            layout: LayoutName::Numbers,
            index,
            target_label: "1".into(),
            target_center: center,
            prev_center: ScreenPoint::new(0.0, 0.0, true),
            selection_point: ScreenPoint::new(center.x + o, 0.0, true),
            amplitude: 100.0,
            movement_time_ms: 1000.0,
            t_select: 1000.0 * (index + 1) as f64,
        })
        .collect();
    let tp = SequenceStats::from_records(&records, Dispersion::Sample).map_err(|e| e.to_string())?.tp;
    let we_err = (we - 41.33).abs() / 41.33;
    let tp_err = (tp - 1.77394).abs() / 1.77394;
    check(
        we_err < 0.05 && tp_err < 0.02,
        format!("W_e {we:.4} pt ({:.2}% off), TP {tp:.5} bps ({:.2}% off)", we_err * 100.0, tp_err * 100.0),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_headpoint"))
        .args(args)
        .env_remove("HEADPOINT_SCREEN_PROFILE")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("headpoint {} failed: {}", args[0], String::from_utf8_lossy(&out.stderr)))
    }
}

fn study_pipeline(root: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let s = |p: &Path| p.to_str().expect("utf-8 temp path").to_string();
    let (traces, events, csv) = (root.join("traces"), root.join("events"), root.join("csv"));
    run_cli(&["synth", "--participants", "27", "--seed", "7", "--out", &s(&traces)])?;
    run_cli(&["replay", "--trace", &s(&traces), "--out", &s(&events)])?;
    run_cli(&["analyze", "--events", &s(&events), "--out", &s(&csv)])?;
    ["trials.csv", "sequences.csv", "eigen.csv", "box.csv"]
        .iter()
        .map(|name| std::fs::read(csv.join(name)).map(|b| (name.to_string(), b)).map_err(|e| e.to_string()))
        .collect()
}

fn study_structure() -> Outcome {
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    let started = Instant::now();
    let a = study_pipeline(first.path())?;
    let elapsed = started.elapsed();
    let b = study_pipeline(second.path())?;
    let rows = |name: &str| {
        let bytes = &a.iter().find(|(n, _)| n == name).expect("output file").1;
        String::from_utf8_lossy(bytes).lines().count() - 1
    };
    let (trials, sequences) = (rows("trials.csv"), rows("sequences.csv"));
    let identical = a == b;
    check(
        trials == 2835 && sequences == 162 && identical && elapsed < Duration::from_secs(60),
        format!(
            "{trials} trial rows, {sequences} sequence rows, rerun byte-identical: {identical}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn axis_error_deg(found: f64, expected: f64) -> f64 {
    let d = (found - expected).rem_euclid(180.0);
    d.min(180.0 - d)
}

fn eigen_recovery() -> Outcome {
    let screen = ScreenGeometry::default();
    // Every digit appears twice per numbers session.
    let plan = StudyPlan {
        participants: 500,
        seed: 30,
        distances: vec![Distance::Mid],
        layouts: vec![LayoutName::Numbers],
        motion: MotionOverrides {
            noise_sigma_pt: Some(12.0),
            anisotropy: Some(Anisotropy { axis_deg: 30.0, ratio: 4.0 }),
            ..Default::default()
        },
    };
    let traces = synth_study(&plan, &screen).map_err(|e| e.to_string())?;
    let logs =
        traces.par_iter().map(|(_, t)| replay(t, &screen).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
    let mut per_target: std::collections::BTreeMap<String, Vec<[f64; 2]>> = Default::default();
    for r in logs.iter().flat_map(|l| l.trials()) {
        let offset = [r.selection_point.x - r.target_center.x, r.selection_point.y - r.target_center.y];
        per_target.entry(r.target_label.clone()).or_default().push(offset);
    }
    let (mut worst_axis, mut worst_trace, mut min_n): (f64, f64, usize) = (0.0, 0.0, usize::MAX);
    for points in per_target.values() {
        let e = covariance_eigen(points).map_err(|e| e.to_string())?;
        worst_axis = worst_axis.max(axis_error_deg(e.principal_axis_deg(), 30.0));
        let trace = e.covariance[0][0] + e.covariance[1][1];
        worst_trace = worst_trace.max((e.eigenvalues[0] + e.eigenvalues[1] - trace).abs());
        min_n = min_n.min(points.len());
    }
    check(
        per_target.len() == 10 && min_n >= 1000 && worst_axis < 3.0 && worst_trace < 1e-9,
        format!(
            "{} targets, at least {min_n} points each, max axis error {worst_axis:.3} deg, max |sum - trace| {worst_trace:.1e}",
            per_target.len()
        ),
    )
}

/// A trace that is not a study session: a random head walk that also
/// leaves the screen and points away from it.
fn random_walk_trace() -> TraceFile {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut yaw, mut pitch) = (0.0f64, 0.0f64);
    let frames = (0..3000)
        .map(|i| {
            yaw = (yaw + rng.random_range(-0.03..0.03)).clamp(-2.0, 2.0);
            pitch = (pitch + rng.random_range(-0.03..0.03)).clamp(-1.2, 1.2);
            let rotation = Rotation3::from_axis_angle(&Vector3::y_axis(), yaw)
                * Rotation3::from_axis_angle(&Vector3::x_axis(), pitch);
            let pose =
                Pose::from_parts(i as f64 * 16.0, rotation, Vector3::new(0.01, -0.02, 0.4318)).expect("rigid pose");
            Frame::from_pose(&pose)
        })
        .collect();
    let mut spec = SessionSpec::new("W01", Distance::Mid, vec![LayoutName::Alphabets, LayoutName::Numbers]);
    spec.flow = headpoint_core::trials::Flow::Full;
    spec.smoothing = Some(0.4);
    TraceFile { spec, frames }
}

fn service_equivalence() -> Outcome {
    let screen = ScreenGeometry::default();
    let mut plan = StudyPlan::full(2, 77);
    plan.motion.noise_sigma_pt = Some(9.0);
    let mut traces: Vec<TraceFile> =
        synth_study(&plan, &screen).map_err(|e| e.to_string())?.into_iter().map(|(_, t)| t).collect();
    traces.push(random_walk_trace());
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let mut mismatches = 0;
    let mut messages = 0;
    runtime.block_on(async {
        let addr = common::start_service().await;
        for trace in &traces {
            let offline = replay(trace, &screen).map_err(|e| e.to_string())?;
            let live: Vec<Outbound> =
                common::stream_trace(addr, trace).await.into_iter().filter(|m| !m.is_cursor()).collect();
            messages += live.len();
            if live != offline.messages {
                mismatches += 1;
            }
        }
        Ok::<(), String>(())
    })?;
    check(
        mismatches == 0,
        format!("{} traces, {messages} non-cursor messages, {mismatches} mismatching logs", traces.len()),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("geometry round trip", geometry_round_trip),
        ("distance-sensitivity law", distance_law),
        ("dwell timing and re-entry", dwell_timing),
        ("Fitts oracle", fitts_oracle),
        ("estimator convergence", estimator_convergence),
        ("study-structure reproduction", study_structure),
        ("eigen recovery", eigen_recovery),
        ("service/offline equivalence", service_equivalence),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
