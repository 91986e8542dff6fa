//! Experiment harness: seeded repeated trials, aggregation, parameter
//! sweeps, convergence curves, noise robustness and report files.

mod experiments;
mod report;
mod suite;

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planners::{run_planner, PlannerConfig, PlannerKind, RunRecord};
use crate::rng::derive_seed;

pub use experiments::{
    align_trace, average_aligned, convergence_trace, iterations_to_within, robustness_study, sensitivity_sweep,
    ConvergenceCurve, RobustnessRow, SweepRow,
};
pub use report::{
    curves_csv, records_csv, records_json, robustness_csv, stats_csv, svg_line_plot, svg_map_paths, sweep_csv, write_text,
    ReportFormat, RECORDS_HEADER,
};
pub use suite::{SuiteMap, SuiteSpec};

/// A planner entry in a suite. `name` feeds seed derivation, so two entries
/// with distinct names never share trial seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSpec {
    pub name: String,
    pub kind: PlannerKind,
    pub config: PlannerConfig,
}

impl PlannerSpec {
    pub fn new(kind: PlannerKind, config: PlannerConfig) -> Self {
        Self {
            name: kind.as_str().to_string(),
            kind,
            config,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioSuite {
    pub seed: u64,
    pub maps: Vec<SuiteMap>,
    pub planners: Vec<PlannerSpec>,
    pub trials_per_map: usize,
}

impl ScenarioSuite {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_map == 0 {
            return Err(Error::Config("trials_per_map must be at least 1".into()));
        }
        for p in &self.planners {
            p.config.validate()?;
        }
        Ok(())
    }
}

/// One trial's record with its coordinates in the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub map: String,
    pub planner: String,
    pub trial: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub record: RunRecord,
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt() })
    }
}

/// Per (map, planner) summary. Length and smoothness cover successful
/// trials only; time and iterations cover all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub map: String,
    pub planner: String,
    pub trials: usize,
    pub successes: usize,
    /// Percentage in [0, 100].
    pub success_rate: f64,
    pub length: Option<MeanStd>,
    pub smoothness: Option<MeanStd>,
    pub wall_time: Option<MeanStd>,
    pub iterations_mean: f64,
}

impl AggregateStats {
    pub fn from_records(map: &str, planner: &str, records: &[&RunRecord]) -> Self {
        let ok: Vec<&RunRecord> = records.iter().copied().filter(|r| r.success).collect();
        let lengths: Vec<f64> = ok.iter().filter_map(|r| r.length).collect();
        let smooth: Vec<f64> = ok.iter().filter_map(|r| r.smoothness).collect();
        let times: Vec<f64> = records.iter().map(|r| r.wall_time).collect();
        let trials = records.len();
        Self {
            map: map.to_string(),
            planner: planner.to_string(),
            trials,
            successes: ok.len(),
            success_rate: if trials == 0 { 0.0 } else { ok.len() as f64 / trials as f64 * 100.0 },
            length: MeanStd::of(&lengths),
            smoothness: MeanStd::of(&smooth),
            wall_time: MeanStd::of(&times),
            iterations_mean: if trials == 0 {
                0.0
            } else {
                records.iter().map(|r| r.iterations_used as f64).sum::<f64>() / trials as f64
            },
        }
    }

    /// Copy with timing fields cleared, for reproducibility comparisons.
    pub fn without_time(&self) -> Self {
        Self {
            wall_time: None,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub records: Vec<TrialRecord>,
    pub stats: Vec<AggregateStats>,
}

/// Seed of one trial, a function of the suite seed and trial coordinates.
pub fn trial_seed(suite_seed: u64, map: &str, planner: &str, trial: usize) -> u64 {
    derive_seed(suite_seed, &[map, planner, &trial.to_string()])
}

/// Runs one planner on one suite map. Errors and panics become failures.
pub fn run_trial(map: &SuiteMap, planner: &PlannerSpec, seed: u64) -> RunRecord {
    let cfg = planner.config.clone().with_seed(seed);
    let guidance = map.mask_for(planner.kind);
    let outcome = catch_unwind(AssertUnwindSafe(|| run_planner(planner.kind, &map.map, guidance, &cfg)));
    match outcome {
        Ok(Ok(rec)) => rec,
        Ok(Err(_)) | Err(_) => RunRecord::failure(0, 0.0),
    }
}

/// Runs `f` on a pool of `jobs` threads (0 means the rayon default).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Executes every (map, planner, trial) and aggregates per (map, planner)
/// in suite order.
pub fn run_suite(suite: &ScenarioSuite, jobs: usize) -> Result<SuiteResult> {
    suite.validate()?;
    let mut jobs_list = Vec::new();
    for (mi, m) in suite.maps.iter().enumerate() {
        for (pi, p) in suite.planners.iter().enumerate() {
            for t in 0..suite.trials_per_map {
                jobs_list.push((mi, pi, t, trial_seed(suite.seed, &m.id, &p.name, t)));
            }
        }
    }
    let records: Vec<TrialRecord> = with_jobs(jobs, || {
        jobs_list
            .par_iter()
            .map(|&(mi, pi, t, seed)| {
                let (m, p) = (&suite.maps[mi], &suite.planners[pi]);
                TrialRecord {
                    map: m.id.clone(),
                    planner: p.name.clone(),
                    trial: t,
                    seed,
                    record: run_trial(m, p, seed),
                }
            })
            .collect()
    });
    let stats = aggregate(&records);
    Ok(SuiteResult { records, stats })
}

/// Groups records by (map, planner) in order of first appearance.
pub fn aggregate(records: &[TrialRecord]) -> Vec<AggregateStats> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in records {
        let k = (r.map.as_str(), r.planner.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(m, p)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.map == m && r.planner == p)
                .map(|r| &r.record)
                .collect();
            AggregateStats::from_records(m, p, &group)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PathPlan, Point};

    fn rec(success: bool, length: f64, time: f64, iters: usize) -> RunRecord {
        if success {
            let mut r = RunRecord::from_path(PathPlan::new(vec![Point::new(0.0, 0.0), Point::new(length, 0.0)]), iters, time);
            r.smoothness = Some(length / 10.0);
            r
        } else {
            RunRecord::failure(iters, time)
        }
    }

    #[test]
    fn mean_std_is_population() {
        let s = MeanStd::of(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.std, 2.0);
        assert!(MeanStd::of(&[]).is_none());
        assert_eq!(MeanStd::of(&[3.0]).unwrap().std, 0.0);
    }

    #[test]
    fn failures_excluded_from_length() {
        let rs = [rec(true, 10.0, 1.0, 100), rec(false, 0.0, 3.0, 1000), rec(true, 20.0, 2.0, 200)];
        let refs: Vec<&RunRecord> = rs.iter().collect();
        let s = AggregateStats::from_records("m", "p", &refs);
        assert_eq!(s.successes, 2);
        assert!((s.success_rate - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.length.unwrap().mean, 15.0);
        assert_eq!(s.length.unwrap().std, 5.0);
        assert_eq!(s.wall_time.unwrap().mean, 2.0);
        assert!((s.iterations_mean - 1300.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_failed_has_no_length() {
        let rs = [rec(false, 0.0, 1.0, 5)];
        let refs: Vec<&RunRecord> = rs.iter().collect();
        let s = AggregateStats::from_records("m", "p", &refs);
        assert_eq!(s.success_rate, 0.0);
        assert!(s.length.is_none());
    }

    #[test]
    fn aggregate_keeps_first_appearance_order() {
        let mk = |m: &str, p: &str| TrialRecord {
            map: m.into(),
            planner: p.into(),
            trial: 0,
            seed: 0,
            record: rec(true, 1.0, 0.0, 1),
        };
        let stats = aggregate(&[mk("b", "x"), mk("a", "x"), mk("b", "y"), mk("b", "x")]);
        let keys: Vec<(&str, &str)> = stats.iter().map(|s| (s.map.as_str(), s.planner.as_str())).collect();
        assert_eq!(keys, vec![("b", "x"), ("a", "x"), ("b", "y")]);
        assert_eq!(stats[0].trials, 2);
    }

    #[test]
    fn trial_seeds_depend_on_every_coordinate() {
        let base = trial_seed(1, "m", "p", 0);
        assert_ne!(base, trial_seed(2, "m", "p", 0));
        assert_ne!(base, trial_seed(1, "n", "p", 0));
        assert_ne!(base, trial_seed(1, "m", "q", 0));
        assert_ne!(base, trial_seed(1, "m", "p", 1));
        assert_eq!(base, trial_seed(1, "m", "p", 0));
    }
}
