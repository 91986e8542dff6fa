use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trial, trial_seed, with_jobs, AggregateStats, PlannerSpec, SuiteMap};
use crate::error::{Error, Result};
use crate::gridworld::{extract_convex_corners, CornerSet};
use crate::guidance::{filter_predicted_corners, perturb_corners, NoiseSpec};
use crate::planners::{convex_neural_plan_with_predicted, PlannerConfig, PlannerKind, RunRecord};
use crate::rng::derive_seed;

/// Mean outcome of one `(alpha_pred, alpha_explore)` pair over one map group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub group: String,
    pub alpha_pred: f64,
    pub alpha_explore: f64,
    pub stats: AggregateStats,
}

/// Groups in order of first appearance.
fn groups(maps: &[SuiteMap]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for m in maps {
        if !out.contains(&m.group.as_str()) {
            out.push(&m.group);
        }
    }
    out
}

fn pooled(group: &str, planner: &str, records: &[RunRecord]) -> AggregateStats {
    let refs: Vec<&RunRecord> = records.iter().collect();
    AggregateStats::from_records(group, planner, &refs)
}

/// Runs the convex-corner planner for every parameter pair. Trial seeds are
/// the suite trial seeds of the `convex_neural` planner, so every pair sees
/// the same seeds.
pub fn sensitivity_sweep(
    maps: &[SuiteMap],
    base: &PlannerConfig,
    grid: &[(f64, f64)],
    trials: usize,
    suite_seed: u64,
    jobs: usize,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let specs: Vec<PlannerSpec> = grid
        .iter()
        .map(|&(ap, ae)| {
            let cfg = PlannerConfig {
                alpha_pred: ap,
                alpha_explore: ae,
                ..base.clone()
            };
            cfg.validate().map(|_| PlannerSpec::new(PlannerKind::ConvexNeural, cfg))
        })
        .collect::<Result<_>>()?;
    let name = PlannerKind::ConvexNeural.as_str();
    let mut jobs_list = Vec::new();
    for (gi, _) in grid.iter().enumerate() {
        for (mi, m) in maps.iter().enumerate() {
            for t in 0..trials {
                jobs_list.push((gi, mi, trial_seed(suite_seed, &m.id, name, t)));
            }
        }
    }
    let records: Vec<RunRecord> = with_jobs(jobs, || {
        jobs_list
            .par_iter()
            .map(|&(gi, mi, seed)| run_trial(&maps[mi], &specs[gi], seed))
            .collect()
    });
    let mut rows = Vec::new();
    for group in groups(maps) {
        for (gi, &(ap, ae)) in grid.iter().enumerate() {
            let recs: Vec<RunRecord> = jobs_list
                .iter()
                .zip(&records)
                .filter(|((g, mi, _), _)| *g == gi && maps[*mi].group == group)
                .map(|(_, r)| r.clone())
                .collect();
            rows.push(SweepRow {
                group: group.to_string(),
                alpha_pred: ap,
                alpha_explore: ae,
                stats: pooled(group, name, &recs),
            });
        }
    }
    Ok(rows)
}

/// Mean best cost per iteration; `costs[i]` belongs to iteration `i + 1`
/// and is `None` until some seed has a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCurve {
    pub map: String,
    pub planner: String,
    pub seeds: usize,
    pub costs: Vec<Option<f64>>,
}

/// Expands a cost trace to one value per iteration up to `horizon`,
/// carrying the last cost forward.
pub fn align_trace(trace: &[(usize, f64)], horizon: usize) -> Vec<Option<f64>> {
    let mut out = vec![None; horizon];
    let mut k = 0;
    let mut cur = None;
    for (i, slot) in out.iter_mut().enumerate() {
        while k < trace.len() && trace[k].0 <= i + 1 {
            cur = Some(trace[k].1).filter(|c| c.is_finite());
            k += 1;
        }
        *slot = cur;
    }
    out
}

/// Mean over the finite entries of each column.
pub fn average_aligned(rows: &[Vec<Option<f64>>], horizon: usize) -> Vec<Option<f64>> {
    (0..horizon)
        .map(|i| {
            let vals: Vec<f64> = rows.iter().filter_map(|r| r.get(i).copied().flatten()).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect()
}

/// Runs every planner once per seed on `map` and averages the aligned cost
/// traces up to each planner's iteration budget.
pub fn convergence_trace(map: &SuiteMap, planners: &[PlannerSpec], seeds: &[u64], jobs: usize) -> Result<Vec<ConvergenceCurve>> {
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    for p in planners {
        p.config.validate()?;
    }
    let pairs: Vec<(usize, u64)> = (0..planners.len())
        .flat_map(|pi| seeds.iter().map(move |&s| (pi, s)))
        .collect();
    let records: Vec<RunRecord> = with_jobs(jobs, || {
        pairs
            .par_iter()
            .map(|&(pi, s)| run_trial(map, &planners[pi], s))
            .collect()
    });
    Ok(planners
        .iter()
        .enumerate()
        .map(|(pi, p)| {
            let horizon = p.config.max_iters;
            let rows: Vec<Vec<Option<f64>>> = pairs
                .iter()
                .zip(&records)
                .filter(|((i, _), _)| *i == pi)
                .map(|(_, r)| align_trace(&r.cost_trace, horizon))
                .collect();
            ConvergenceCurve {
                map: map.id.clone(),
                planner: p.name.clone(),
                seeds: seeds.len(),
                costs: average_aligned(&rows, horizon),
            }
        })
        .collect())
}

/// First iteration (1-based) whose cost is within `frac` of the curve's
/// final cost, or `None` for a curve without any solution.
pub fn iterations_to_within(curve: &ConvergenceCurve, frac: f64) -> Option<usize> {
    let last = curve.costs.iter().rev().find_map(|c| *c)?;
    let bound = last * (1.0 + frac);
    curve
        .costs
        .iter()
        .position(|c| matches!(c, Some(v) if *v <= bound))
        .map(|i| i + 1)
}

/// Noisy versus clean convex-corner outcome for one map group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub group: String,
    pub noise: String,
    pub clean: AggregateStats,
    pub noisy: AggregateStats,
    /// Percentage change of the mean length.
    pub length_delta: Option<f64>,
    pub time_delta: Option<f64>,
    pub smoothness_delta: Option<f64>,
    /// Change of the success rate in percentage points.
    pub success_delta: f64,
}

fn pct(clean: Option<f64>, noisy: Option<f64>) -> Option<f64> {
    match (clean, noisy) {
        (Some(c), Some(n)) if c != 0.0 => Some((n - c) / c * 100.0),
        (Some(c), Some(n)) if c == n => Some(0.0),
        _ => None,
    }
}

fn plan_predicted(map: &SuiteMap, predicted: &CornerSet, cfg: &PlannerConfig) -> RunRecord {
    match catch_unwind(AssertUnwindSafe(|| convex_neural_plan_with_predicted(&map.map, predicted, cfg))) {
        Ok(Ok(r)) => r,
        _ => RunRecord::failure(0, 0.0),
    }
}

/// Perturbs each map's clean predicted corners with every noise spec and
/// compares against the clean run. Clean and noisy trials share seeds, and
/// a perturbation that leaves the predicted set unchanged reuses the clean
/// record.
pub fn robustness_study(
    maps: &[SuiteMap],
    cfg: &PlannerConfig,
    noise: &[NoiseSpec],
    trials: usize,
    suite_seed: u64,
    jobs: usize,
) -> Result<Vec<RobustnessRow>> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    for n in noise {
        n.validate()?;
    }
    let name = PlannerKind::ConvexNeural.as_str();
    // per map: clean set, then one set per noise spec
    let sets: Vec<Vec<CornerSet>> = maps
        .iter()
        .map(|m| {
            let mask = m
                .mask_for(PlannerKind::ConvexNeural)
                .ok_or_else(|| Error::Config(format!("map `{}` has no guidance", m.id)))?;
            mask.check_dims(&m.map)?;
            let clean = filter_predicted_corners(mask, &extract_convex_corners(&m.map))?;
            let mut out = vec![clean.clone()];
            for n in noise {
                let spec = n.with_seed(derive_seed(n.seed, &[&m.id, &n.label()]));
                out.push(perturb_corners(&clean, &spec, &m.map)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut jobs_list = Vec::new();
    for (mi, m) in maps.iter().enumerate() {
        for t in 0..trials {
            jobs_list.push((mi, t, trial_seed(suite_seed, &m.id, name, t)));
        }
    }
    // records[job][variant], variant 0 clean
    let records: Vec<Vec<RunRecord>> = with_jobs(jobs, || {
        jobs_list
            .par_iter()
            .map(|&(mi, _, seed)| {
                let run_cfg = cfg.clone().with_seed(seed);
                let clean = plan_predicted(&maps[mi], &sets[mi][0], &run_cfg);
                let mut out = vec![clean.clone()];
                for set in &sets[mi][1..] {
                    out.push(if *set == sets[mi][0] {
                        clean.clone()
                    } else {
                        plan_predicted(&maps[mi], set, &run_cfg)
                    });
                }
                out
            })
            .collect()
    });

    let mut rows = Vec::new();
    for group in groups(maps) {
        let variant = |v: usize| -> Vec<RunRecord> {
            jobs_list
                .iter()
                .zip(&records)
                .filter(|((mi, _, _), _)| maps[*mi].group == group)
                .map(|(_, r)| r[v].clone())
                .collect()
        };
        let clean = pooled(group, name, &variant(0));
        for (ni, n) in noise.iter().enumerate() {
            let noisy = pooled(group, name, &variant(ni + 1));
            rows.push(RobustnessRow {
                group: group.to_string(),
                noise: n.label(),
                length_delta: pct(clean.length.map(|s| s.mean), noisy.length.map(|s| s.mean)),
                time_delta: pct(clean.wall_time.map(|s| s.mean), noisy.wall_time.map(|s| s.mean)),
                smoothness_delta: pct(clean.smoothness.map(|s| s.mean), noisy.smoothness.map(|s| s.mean)),
                success_delta: noisy.success_rate - clean.success_rate,
                clean: clean.clone(),
                noisy,
            });
        }
    }
    Ok(rows)
}
