use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AggregateStats, ConvergenceCurve, RobustnessRow, SweepRow, TrialRecord};
use crate::error::{Error, Result};
use crate::geometry::PathPlan;
use crate::gridworld::GridMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            _ => Err(Error::Config(format!("unknown report format `{s}`"))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const RECORDS_HEADER: &str = "map,planner,trial,success,length,smoothness,time_s,iters";

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let rec = &r.record;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.map,
            r.planner,
            r.trial,
            rec.success,
            opt(rec.length),
            opt(rec.smoothness),
            rec.wall_time,
            rec.iterations_used
        );
    }
    out
}

pub fn records_json(records: &[TrialRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)? + "\n")
}

pub fn stats_csv(stats: &[AggregateStats]) -> String {
    let mut out = String::from(
        "map,planner,trials,success_rate,length_mean,length_std,smoothness_mean,smoothness_std,time_mean,time_std,iters_mean\n",
    );
    for s in stats {
        let m = |v: Option<super::MeanStd>| (opt(v.map(|x| x.mean)), opt(v.map(|x| x.std)));
        let (lm, ls) = m(s.length);
        let (sm, ss) = m(s.smoothness);
        let (tm, ts) = m(s.wall_time);
        let _ = writeln!(
            out,
            "{},{},{},{},{lm},{ls},{sm},{ss},{tm},{ts},{}",
            s.map, s.planner, s.trials, s.success_rate, s.iterations_mean
        );
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("group,alpha_pred,alpha_explore,trials,success_rate,length,time_s,smoothness,iters\n");
    for r in rows {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.group,
            r.alpha_pred,
            r.alpha_explore,
            s.trials,
            s.success_rate,
            opt(s.length.map(|v| v.mean)),
            opt(s.wall_time.map(|v| v.mean)),
            opt(s.smoothness.map(|v| v.mean)),
            s.iterations_mean
        );
    }
    out
}

/// Long format: one row per (curve, iteration) with a cost.
pub fn curves_csv(curves: &[ConvergenceCurve]) -> String {
    let mut out = String::from("map,planner,iteration,cost\n");
    for c in curves {
        for (i, v) in c.costs.iter().enumerate() {
            if let Some(v) = v {
                let _ = writeln!(out, "{},{},{},{}", c.map, c.planner, i + 1, v);
            }
        }
    }
    out
}

pub fn robustness_csv(rows: &[RobustnessRow]) -> String {
    let mut out = String::from(
        "group,noise,length_delta_pct,time_delta_pct,smoothness_delta_pct,success_delta_pts,clean_success,noisy_success\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.group,
            r.noise,
            opt(r.length_delta),
            opt(r.time_delta),
            opt(r.smoothness_delta),
            r.success_delta,
            r.clean.success_rate,
            r.noisy.success_rate
        );
    }
    out
}

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn fmt_pt(v: f64) -> String {
    format!("{v:.3}")
}

/// Paths drawn over the map raster. Occupied runs of each row become one
/// rectangle; a two-waypoint path is a single `<line>`.
pub fn svg_map_paths(map: &GridMap, paths: &[(&str, &PathPlan)]) -> String {
    let (w, h) = map.dims();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {w} {h}">"#,
        w * 3,
        h * 3
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);
    let _ = writeln!(out, r##"<g fill="#000000">"##);
    for r in 0..h {
        let mut c = 0;
        while c < w {
            if map.is_occupied(r, c) {
                let c0 = c;
                while c < w && map.is_occupied(r, c) {
                    c += 1;
                }
                let _ = writeln!(out, r#"<rect x="{c0}" y="{r}" width="{}" height="1"/>"#, c - c0);
            } else {
                c += 1;
            }
        }
    }
    out.push_str("</g>\n");
    for (i, (name, path)) in paths.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let wp = &path.waypoints;
        if wp.len() == 2 {
            let _ = writeln!(
                out,
                r#"<line class="{name}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="0.6" fill="none"/>"#,
                fmt_pt(wp[0].x),
                fmt_pt(wp[0].y),
                fmt_pt(wp[1].x),
                fmt_pt(wp[1].y)
            );
        } else if wp.len() > 2 {
            let pts: Vec<String> = wp.iter().map(|p| format!("{},{}", fmt_pt(p.x), fmt_pt(p.y))).collect();
            let _ = writeln!(
                out,
                r#"<polyline class="{name}" points="{}" stroke="{color}" stroke-width="0.6" fill="none"/>"#,
                pts.join(" ")
            );
        }
    }
    for (p, color) in [(map.start, "#2ca02c"), (map.goal, "#1f77b4")] {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="1.5" fill="{color}"/>"#,
            fmt_pt(p.x),
            fmt_pt(p.y)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Line plot of series indexed from 1; `None` entries break the line.
pub fn svg_line_plot(title: &str, series: &[(&str, &[Option<f64>])]) -> String {
    let (pw, ph, pad) = (640.0, 400.0, 50.0);
    let n = series.iter().map(|(_, s)| s.len()).max().unwrap_or(0).max(1) as f64;
    let vals = series.iter().flat_map(|(_, s)| s.iter().flatten().copied());
    let (mut lo, mut hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        hi = lo + 1.0;
    }
    let x = |i: usize| pad + (i as f64) / n * (pw - 2.0 * pad);
    let y = |v: f64| ph - pad - (v - lo) / (hi - lo) * (ph - 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pw}" height="{ph}" viewBox="0 0 {pw} {ph}">"#
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{pw}" height="{ph}" fill="#ffffff"/>"##);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, pw / 2.0);
    let (right, bottom) = (pw - pad, ph - pad);
    let _ = writeln!(
        out,
        r##"<path d="M{pad},{pad} L{pad},{bottom} L{right},{bottom}" stroke="#000000" fill="none"/>"##
    );
    let _ = writeln!(out, r#"<text x="{pad}" y="{}" font-size="10">{}</text>"#, ph - pad + 15.0, 1);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{}</text>"#,
        pw - pad,
        ph - pad + 15.0,
        n as usize
    );
    let _ = writeln!(out, r#"<text x="5" y="{}" font-size="10">{}</text>"#, y(hi) + 4.0, fmt_pt(hi));
    let _ = writeln!(out, r#"<text x="5" y="{}" font-size="10">{}</text>"#, y(lo) + 4.0, fmt_pt(lo));
    for (k, (name, s)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut runs: Vec<Vec<String>> = vec![Vec::new()];
        for (i, v) in s.iter().enumerate() {
            match v {
                Some(v) => runs.last_mut().expect("non-empty").push(format!("{},{}", fmt_pt(x(i + 1)), fmt_pt(y(*v)))),
                None if !runs.last().expect("non-empty").is_empty() => runs.push(Vec::new()),
                None => {}
            }
        }
        for run in runs.iter().filter(|r| !r.is_empty()) {
            let _ = writeln!(
                out,
                r#"<polyline class="{name}" points="{}" stroke="{color}" stroke-width="1.5" fill="none"/>"#,
                run.join(" ")
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{name}</text>"#,
            pw - pad - 120.0,
            pad + 15.0 * k as f64
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
