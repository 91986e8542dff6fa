use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{with_jobs, PlannerSpec, ScenarioSuite};
use crate::error::{Error, Result};
use crate::gridworld::{
    generate_map_with, inflate, load_map, load_mask_for, Difficulty, GridMap, MapGenConfig, DEFAULT_SAFETY_MARGIN,
};
use crate::guidance::{oracle_corridor, oracle_guidance, GuidanceMask, NoiseSpec, ORACLE_RADIUS};
use crate::planners::{PlannerConfig, PlannerKind};
use crate::rng::derive_seed;

/// A planning map (already inflated) with the masks its guided planners use.
#[derive(Debug, Clone)]
pub struct SuiteMap {
    pub id: String,
    /// Grouping label for sweeps and robustness tables, e.g. the difficulty.
    pub group: String,
    pub map: GridMap,
    /// Sparse waypoint mask consumed by the convex-corner planner.
    pub waypoint_mask: Option<GuidanceMask>,
    /// Dense path mask consumed by the mask-mixing baselines.
    pub corridor_mask: Option<GuidanceMask>,
}

impl SuiteMap {
    /// Builds oracle masks for an inflated map.
    pub fn with_oracle(id: impl Into<String>, group: impl Into<String>, map: GridMap) -> Result<Self> {
        let waypoint_mask = oracle_guidance(&map, ORACLE_RADIUS)?;
        let corridor_mask = oracle_corridor(&map, ORACLE_RADIUS)?;
        Ok(Self {
            id: id.into(),
            group: group.into(),
            map,
            waypoint_mask: Some(waypoint_mask),
            corridor_mask: Some(corridor_mask),
        })
    }

    /// Uses one supplied mask for every guided planner.
    pub fn with_mask(id: impl Into<String>, group: impl Into<String>, map: GridMap, mask: GuidanceMask) -> Self {
        Self {
            id: id.into(),
            group: group.into(),
            map,
            waypoint_mask: Some(mask.clone()),
            corridor_mask: Some(mask),
        }
    }

    pub fn mask_for(&self, kind: PlannerKind) -> Option<&GuidanceMask> {
        match kind {
            PlannerKind::ConvexNeural => self.waypoint_mask.as_ref(),
            PlannerKind::Neural | PlannerKind::NeuralInformed => {
                self.corridor_mask.as_ref().or(self.waypoint_mask.as_ref())
            }
            PlannerKind::RrtStar | PlannerKind::Visibility => None,
        }
    }
}

/// Declarative experiment description, loaded from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSpec {
    pub seed: u64,
    pub difficulties: Vec<Difficulty>,
    pub maps_per_difficulty: usize,
    pub width: usize,
    pub height: usize,
    pub safety_margin: f64,
    /// Raw PPM maps used in addition to generated ones.
    pub map_files: Vec<PathBuf>,
    /// Optional PGM masks paired index-wise with `map_files`; without them
    /// oracle masks are computed.
    pub mask_files: Vec<PathBuf>,
    pub planners: Vec<PlannerKind>,
    pub trials: usize,
    pub planner: PlannerConfig,
    pub sweep_alpha_pred: Vec<f64>,
    pub sweep_alpha_explore: Vec<f64>,
    pub noise: Vec<NoiseSpec>,
    pub converge_seeds: usize,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            difficulties: Difficulty::ALL.to_vec(),
            maps_per_difficulty: 3,
            width: 224,
            height: 224,
            safety_margin: DEFAULT_SAFETY_MARGIN,
            map_files: Vec::new(),
            mask_files: Vec::new(),
            planners: PlannerKind::ALL.to_vec(),
            trials: 10,
            planner: PlannerConfig::default(),
            sweep_alpha_pred: vec![0.0, 0.5, 0.9],
            sweep_alpha_explore: vec![0.0, 0.2, 0.5],
            noise: vec![
                NoiseSpec::shift(2.0, 0),
                NoiseSpec::shift(4.0, 0),
                NoiseSpec::deletion(0.3, 0),
                NoiseSpec::deletion(0.6, 0),
            ],
            converge_seeds: 20,
        }
    }
}

impl SuiteSpec {
    pub fn validate(&self) -> Result<()> {
        self.planner.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.planners.is_empty() {
            return Err(Error::Config("at least one planner is required".into()));
        }
        if !self.mask_files.is_empty() && self.mask_files.len() != self.map_files.len() {
            return Err(Error::Config("mask_files must pair one-to-one with map_files".into()));
        }
        if self.converge_seeds == 0 {
            return Err(Error::Config("converge_seeds must be at least 1".into()));
        }
        for n in &self.noise {
            n.validate()?;
        }
        for &a in self.sweep_alpha_pred.iter().chain(&self.sweep_alpha_explore) {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Config("sweep probabilities must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }

    /// Generates (or loads) the maps and their masks, in a fixed order:
    /// generated maps by difficulty, then files.
    pub fn build_maps(&self, jobs: usize) -> Result<Vec<SuiteMap>> {
        self.validate()?;
        let mut generated = Vec::new();
        for &d in &self.difficulties {
            for i in 0..self.maps_per_difficulty {
                generated.push((d, i));
            }
        }
        let mut maps: Vec<SuiteMap> = with_jobs(jobs, || {
            generated
                .par_iter()
                .map(|&(d, i)| {
                    let id = format!("{d}_{i}");
                    let gen = MapGenConfig {
                        safety_margin: self.safety_margin,
                        ..MapGenConfig::new(d, self.width, self.height)
                    };
                    let raw = generate_map_with(derive_seed(self.seed, &["map", d.as_str(), &i.to_string()]), &gen)?;
                    SuiteMap::with_oracle(id, d.as_str(), inflate(&raw, self.safety_margin))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (k, path) in self.map_files.iter().enumerate() {
            let raw = load_map(path)?;
            let map = inflate(&raw, self.safety_margin);
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("file_{k}"));
            let entry = match self.mask_files.get(k) {
                Some(mask_path) => {
                    let mask = load_mask_for(&map, mask_path)?;
                    SuiteMap::with_mask(id, "files", map, mask)
                }
                None => SuiteMap::with_oracle(id, "files", map)?,
            };
            maps.push(entry);
        }
        Ok(maps)
    }

    pub fn planner_specs(&self) -> Vec<PlannerSpec> {
        self.planners
            .iter()
            .map(|&k| PlannerSpec::new(k, self.planner.clone()))
            .collect()
    }

    pub fn build(&self, jobs: usize) -> Result<ScenarioSuite> {
        Ok(ScenarioSuite {
            seed: self.seed,
            maps: self.build_maps(jobs)?,
            planners: self.planner_specs(),
            trials_per_map: self.trials,
        })
    }
}
