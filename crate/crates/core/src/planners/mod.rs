//! Planners: visibility-graph A*, RRT* with pluggable samplers, and the
//! convex-corner guided RRT*.

pub mod convex;
pub mod index;
pub mod rrt_star;
pub mod sampler;
pub mod tree;
pub mod visibility;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PathPlan;
use crate::gridworld::GridMap;
use crate::guidance::GuidanceMask;

pub use convex::{convex_neural_plan, convex_neural_plan_observed, convex_neural_plan_with_predicted, CornerPools};
pub use rrt_star::{choose_parent, early_stop_check, rewire, rrt_star_plan, rrt_star_plan_observed};
pub use sampler::{
    ConvexStructuredSampler, NeuralInformedSampler, NeuralSampler, SampleSource, Sampler,
    UniformSampler,
};
pub use tree::{Node, Tree};
pub use visibility::plan_visibility_astar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    RrtStar,
    Neural,
    NeuralInformed,
    ConvexNeural,
    Visibility,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 5] = [
        PlannerKind::RrtStar,
        PlannerKind::Neural,
        PlannerKind::NeuralInformed,
        PlannerKind::Visibility,
        PlannerKind::ConvexNeural,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::RrtStar => "rrt_star",
            PlannerKind::Neural => "neural",
            PlannerKind::NeuralInformed => "neural_informed",
            PlannerKind::ConvexNeural => "convex_neural",
            PlannerKind::Visibility => "visibility",
        }
    }

    /// Whether the planner consumes a guidance mask.
    pub fn needs_guidance(self) -> bool {
        matches!(
            self,
            PlannerKind::Neural | PlannerKind::NeuralInformed | PlannerKind::ConvexNeural
        )
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown planner `{s}`")))
    }
}

/// Planner parameters. Defaults follow the benchmark setup: step 5,
/// neighbour radius 7, 1000 iterations, mixing ratio 0.5, and
/// predicted/explore probabilities 0.5/0.2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Steering step length.
    pub step: f64,
    /// Fixed neighbourhood radius for parent choice and rewiring.
    pub near_radius: f64,
    pub max_iters: usize,
    /// Guided-sample probability for the mask-mixing samplers.
    pub alpha: f64,
    pub alpha_pred: f64,
    pub alpha_explore: f64,
    /// Early-stop window in iterations.
    pub stall_window: usize,
    /// Early-stop cost tolerance.
    pub stall_eps: f64,
    /// Early stopping for the convex-corner planner.
    pub early_stop: bool,
    pub goal_tol: f64,
    pub goal_bias: f64,
    /// Jitter radius around predicted corners.
    pub corner_radius: f64,
    pub seed: u64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            step: 5.0,
            near_radius: 7.0,
            max_iters: 1000,
            alpha: 0.5,
            alpha_pred: 0.5,
            alpha_explore: 0.2,
            stall_window: 50,
            stall_eps: 1e-3,
            early_stop: true,
            goal_tol: 5.0,
            goal_bias: 0.05,
            corner_radius: crate::gridworld::DEFAULT_SAFETY_MARGIN,
            seed: 0,
        }
    }
}

impl PlannerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.step) {
            return bad("step must be positive");
        }
        if !finite_pos(self.near_radius) {
            return bad("near_radius must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        for (name, p) in [
            ("alpha", self.alpha),
            ("alpha_pred", self.alpha_pred),
            ("alpha_explore", self.alpha_explore),
            ("goal_bias", self.goal_bias),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.stall_window == 0 {
            return bad("stall_window must be at least 1");
        }
        if !finite_pos(self.stall_eps) {
            return bad("stall_eps must be positive");
        }
        if !(self.goal_tol.is_finite() && self.goal_tol >= 0.0) {
            return bad("goal_tol must be non-negative");
        }
        if !(self.corner_radius.is_finite() && self.corner_radius >= 0.0) {
            return bad("corner_radius must be non-negative");
        }
        Ok(())
    }
}

/// Outcome of one planning trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub success: bool,
    pub path: Option<PathPlan>,
    pub length: Option<f64>,
    pub smoothness: Option<f64>,
    /// Seconds spent inside the planner.
    pub wall_time: f64,
    /// Iterations executed (node expansions for visibility A*).
    pub iterations_used: usize,
    /// `(iteration, best cost)` from the first solution onward.
    pub cost_trace: Vec<(usize, f64)>,
    #[serde(default)]
    pub stopped_early: bool,
    /// Set when guidance produced no predicted corners.
    #[serde(default)]
    pub degraded_guidance: bool,
}

impl RunRecord {
    pub fn failure(iterations_used: usize, wall_time: f64) -> Self {
        Self {
            success: false,
            path: None,
            length: None,
            smoothness: None,
            wall_time,
            iterations_used,
            cost_trace: Vec::new(),
            stopped_early: false,
            degraded_guidance: false,
        }
    }

    pub fn from_path(path: PathPlan, iterations_used: usize, wall_time: f64) -> Self {
        Self {
            success: true,
            length: Some(path.length()),
            smoothness: Some(path.smoothness()),
            path: Some(path),
            wall_time,
            iterations_used,
            cost_trace: Vec::new(),
            stopped_early: false,
            degraded_guidance: false,
        }
    }

    /// Copy with the wall time zeroed, for reproducibility comparisons.
    pub fn without_time(&self) -> Self {
        Self {
            wall_time: 0.0,
            ..self.clone()
        }
    }

    pub fn final_cost(&self) -> Option<f64> {
        self.cost_trace.last().map(|&(_, c)| c)
    }
}

/// Runs `kind` on an inflated map. Guided planners require `guidance`.
pub fn run_planner(
    kind: PlannerKind,
    map: &GridMap,
    guidance: Option<&GuidanceMask>,
    cfg: &PlannerConfig,
) -> Result<RunRecord> {
    cfg.validate()?;
    let need = || Error::Config(format!("planner `{kind}` needs a guidance mask"));
    match kind {
        PlannerKind::Visibility => match plan_visibility_astar(map) {
            Ok(r) => Ok(r),
            Err(Error::NoPath) => Ok(RunRecord::failure(0, 0.0)),
            Err(e) => Err(e),
        },
        PlannerKind::RrtStar => {
            let sampler = UniformSampler::new(map);
            rrt_star_plan(map, cfg, sampler, false)
        }
        PlannerKind::Neural => {
            let mask = guidance.ok_or_else(need)?;
            let sampler = NeuralSampler::new(mask, map, cfg.alpha)?;
            rrt_star_plan(map, cfg, sampler, false)
        }
        PlannerKind::NeuralInformed => {
            let mask = guidance.ok_or_else(need)?;
            let sampler = NeuralInformedSampler::new(mask, map, cfg.alpha)?;
            rrt_star_plan(map, cfg, sampler, false)
        }
        PlannerKind::ConvexNeural => {
            let mask = guidance.ok_or_else(need)?;
            convex_neural_plan(map, mask, cfg)
        }
    }
}
