//! CSV renderings of analysis results.
//!
//! All tables are comma-separated UTF-8 with LF line endings. Real numbers
//! are printed with six significant digits (ties to even), trailing zeros
//! removed, switching to exponent form outside `[1e-4, 1e6)`.

use std::collections::BTreeMap;

use super::{box_stats, covariance_eigen, project_onto_axis, AnalysisError, GroupStats, KeyedTrial};
use crate::trials::{Distance, LayoutName};

pub const TRIALS_HEADER: [&str; 10] = [
    "participant",
    "distance",
    "layout",
    "trial_index",
    "target",
    "amplitude_pt",
    "mt_ms",
    "sel_x",
    "sel_y",
    "proj_pt",
];
pub const SEQUENCES_HEADER: [&str; 10] =
    ["participant", "distance", "layout", "n_trials", "Sx_pt", "We_pt", "A_mean_pt", "IDe_bits", "MT_s", "TP_bps"];
pub const EIGEN_HEADER: [&str; 11] =
    ["layout", "target", "mean_x", "mean_y", "cov_xx", "cov_xy", "cov_yy", "eig1", "eig2", "v1x", "v1y"];
pub const BOX_HEADER: [&str; 10] = ["layout", "distance", "metric", "n", "min", "q1", "median", "q3", "max", "mean"];

/// Participant column value for pooled groups.
pub const POOLED_PARTICIPANT: &str = "*";

/// Formats a real with six significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // `{:e}` with a precision rounds the exact binary value half to even.
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };
    if (-4..6).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        format!("{sign}{}", trim_fraction(&body))
    } else {
        let body = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{sign}{body}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer never fails");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}

fn sorted(trials: &[KeyedTrial]) -> Vec<&KeyedTrial> {
    let mut v: Vec<&KeyedTrial> = trials.iter().collect();
    v.sort_by(|a, b| a.key.cmp(&b.key).then(a.record.index.cmp(&b.record.index)));
    v
}

/// One row per trial. Trials with a degenerate task axis get an empty
/// projection cell.
pub fn trials_csv(trials: &[KeyedTrial]) -> String {
    let mut w = writer();
    w.write_record(TRIALS_HEADER).expect("write");
    for t in sorted(trials) {
        let r = &t.record;
        let proj =
            project_onto_axis(&r.prev_center, &r.target_center, &r.selection_point).map(fmt_real).unwrap_or_default();
        w.write_record([
            t.key.participant.clone(),
            t.key.distance.to_string(),
            t.key.layout.to_string(),
            r.index.to_string(),
            r.target_label.clone(),
            fmt_real(r.amplitude),
            fmt_real(r.movement_time_ms),
            fmt_real(r.selection_point.x),
            fmt_real(r.selection_point.y),
            proj,
        ])
        .expect("write");
    }
    finish(w)
}

pub fn sequences_csv(groups: &[GroupStats]) -> String {
    let mut w = writer();
    w.write_record(SEQUENCES_HEADER).expect("write");
    for g in groups {
        let s = &g.stats;
        w.write_record([
            g.participant.clone().unwrap_or_else(|| POOLED_PARTICIPANT.into()),
            g.distance.to_string(),
            g.layout.to_string(),
            s.n_trials.to_string(),
            fmt_real(s.sx),
            fmt_real(s.we),
            fmt_real(s.a_mean),
            fmt_real(s.ide),
            fmt_real(s.mt_mean_s),
            fmt_real(s.tp),
        ])
        .expect("write");
    }
    finish(w)
}

/// Per-target covariance of selection points pooled over all sessions.
/// Targets with fewer than two selections are left out.
pub fn eigen_csv(trials: &[KeyedTrial]) -> String {
    let mut points: BTreeMap<(LayoutName, &str), Vec<[f64; 2]>> = BTreeMap::new();
    for t in trials {
        let p = t.record.selection_point;
        points.entry((t.key.layout, t.record.target_label.as_str())).or_default().push([p.x, p.y]);
    }
    let mut w = writer();
    w.write_record(EIGEN_HEADER).expect("write");
    for ((layout, target), pts) in points {
        let Ok(e) = covariance_eigen(&pts) else { continue };
        let row = [
            e.mean[0],
            e.mean[1],
            e.covariance[0][0],
            e.covariance[0][1],
            e.covariance[1][1],
            e.eigenvalues[0],
            e.eigenvalues[1],
            e.eigenvectors[0][0],
            e.eigenvectors[0][1],
        ];
        let mut rec = vec![layout.to_string(), target.to_string()];
        rec.extend(row.into_iter().map(fmt_real));
        w.write_record(rec).expect("write");
    }
    finish(w)
}

/// Box summaries per layout and distance of test completion time
/// (`elapsed_s`, sum of movement times of one sequence) and throughput per
/// motion sequence (`tp_bps`).
pub fn box_csv(trials: &[KeyedTrial], groups: &[GroupStats]) -> Result<String, AnalysisError> {
    let mut elapsed: BTreeMap<(LayoutName, Distance), BTreeMap<&str, f64>> = BTreeMap::new();
    for t in trials {
        *elapsed.entry((t.key.layout, t.key.distance)).or_default().entry(t.key.participant.as_str()).or_default() +=
            t.record.movement_time_ms / 1000.0;
    }
    let mut tp: BTreeMap<(LayoutName, Distance), Vec<f64>> = BTreeMap::new();
    for g in groups {
        tp.entry((g.layout, g.distance)).or_default().push(g.stats.tp);
    }
    let mut w = writer();
    w.write_record(BOX_HEADER).expect("write");
    for (key, per_participant) in &elapsed {
        let values: Vec<f64> = per_participant.values().copied().collect();
        write_box(&mut w, *key, "elapsed_s", &values)?;
        if let Some(values) = tp.get(key) {
            write_box(&mut w, *key, "tp_bps", values)?;
        }
    }
    Ok(finish(w))
}

fn write_box(
    w: &mut csv::Writer<Vec<u8>>,
    (layout, distance): (LayoutName, Distance),
    metric: &str,
    values: &[f64],
) -> Result<(), AnalysisError> {
    let b = box_stats(values)?;
    let mut rec = vec![layout.to_string(), distance.to_string(), metric.to_string(), b.n.to_string()];
    rec.extend([b.min, b.q1, b.median, b.q3, b.max, b.mean].into_iter().map(fmt_real));
    w.write_record(rec).expect("write");
    Ok(())
}
