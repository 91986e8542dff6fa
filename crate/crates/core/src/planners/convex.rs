//! Convex-corner guided RRT*: predicted corners, their hull with the query
//! endpoints, and a three-pool structured sampler with early stopping.

use std::time::Instant;

use super::rrt_star::rrt_star_plan_observed;
use super::sampler::ConvexStructuredSampler;
use super::tree::Tree;
use super::{PlannerConfig, RunRecord};
use crate::error::Result;
use crate::geometry::{convex_hull, HullPolygon, Point};
use crate::gridworld::{extract_convex_corners, CornerSet, GridMap};
use crate::guidance::{filter_predicted_corners, GuidanceMask};

/// The three sampling pools, as cell-centre points in row-major order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CornerPools {
    pub predicted: Vec<Point>,
    /// Remaining corners inside the guidance hull.
    pub inside: Vec<Point>,
    /// Remaining corners outside the guidance hull.
    pub outside: Vec<Point>,
}

impl CornerPools {
    /// Splits `corners \ predicted` by the hull of `predicted ∪ {start, goal}`.
    /// With no predicted corners every remaining corner goes outside.
    pub fn build(map: &GridMap, corners: &CornerSet, predicted: &CornerSet) -> Result<(Self, HullPolygon)> {
        let pred_points = predicted.points();
        let mut hull_input = pred_points.clone();
        hull_input.push(map.start);
        hull_input.push(map.goal);
        let hull = convex_hull(&hull_input)?;
        let rest = corners.difference(predicted).points();
        let (inside, outside) = if pred_points.is_empty() {
            (Vec::new(), rest)
        } else {
            rest.into_iter().partition(|&p| hull.contains(p))
        };
        Ok((
            Self {
                predicted: pred_points,
                inside,
                outside,
            },
            hull,
        ))
    }

    pub fn is_degraded(&self) -> bool {
        self.predicted.is_empty()
    }
}

pub fn convex_neural_plan(map: &GridMap, mask: &GuidanceMask, cfg: &PlannerConfig) -> Result<RunRecord> {
    convex_neural_plan_observed(map, mask, cfg, &mut |_, _| {})
}

/// As [`convex_neural_plan`] with a per-iteration tree observer.
pub fn convex_neural_plan_observed(
    map: &GridMap,
    mask: &GuidanceMask,
    cfg: &PlannerConfig,
    observer: &mut dyn FnMut(usize, &Tree),
) -> Result<RunRecord> {
    mask.check_dims(map)?;
    let clock = Instant::now();
    let corners = extract_convex_corners(map);
    let predicted = filter_predicted_corners(mask, &corners)?;
    let mut rec = plan_with_pools(map, &corners, &predicted, cfg, observer)?;
    rec.wall_time = clock.elapsed().as_secs_f64();
    Ok(rec)
}

/// Runs with an explicit predicted set, e.g. one perturbed by noise.
/// Predicted cells need not be corners.
pub fn convex_neural_plan_with_predicted(map: &GridMap, predicted: &CornerSet, cfg: &PlannerConfig) -> Result<RunRecord> {
    let clock = Instant::now();
    let corners = extract_convex_corners(map);
    let mut rec = plan_with_pools(map, &corners, predicted, cfg, &mut |_, _| {})?;
    rec.wall_time = clock.elapsed().as_secs_f64();
    Ok(rec)
}

fn plan_with_pools(
    map: &GridMap,
    corners: &CornerSet,
    predicted: &CornerSet,
    cfg: &PlannerConfig,
    observer: &mut dyn FnMut(usize, &Tree),
) -> Result<RunRecord> {
    cfg.validate()?;
    let (pools, _) = CornerPools::build(map, corners, predicted)?;
    let degraded = pools.is_degraded();
    let sampler = ConvexStructuredSampler::new(pools, map, cfg);
    let mut rec = rrt_star_plan_observed(map, cfg, sampler, cfg.early_stop, observer)?;
    rec.degraded_guidance = degraded;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_map() -> GridMap {
        let mut m = GridMap::new(40, 40).with_query(Point::new(3.5, 20.5), Point::new(36.5, 20.5));
        for r in 15..26 {
            for c in 15..26 {
                m.set_occupied(r, c, true);
            }
        }
        m
    }

    #[test]
    fn pools_partition_corners() {
        let map = square_map();
        let mut cells = extract_convex_corners(&map).cells().to_vec();
        assert_eq!(cells.len(), 4);
        // a cell inside the triangle start, goal, (14, 14)
        cells.push((18, 10));
        let corners = CornerSet::from_cells(cells);
        let predicted = CornerSet::from_cells(vec![(14, 14)]);
        let (pools, hull) = CornerPools::build(&map, &corners, &predicted).unwrap();
        assert_eq!(pools.predicted, vec![Point::cell_center(14, 14)]);
        assert_eq!(pools.inside, vec![Point::cell_center(18, 10)]);
        assert_eq!(pools.outside.len(), 3);
        assert!(pools.outside.iter().all(|&p| !hull.contains(p)));
    }

    #[test]
    fn empty_prediction_puts_everything_outside() {
        let map = square_map();
        let corners = extract_convex_corners(&map);
        let (pools, hull) = CornerPools::build(&map, &corners, &CornerSet::default()).unwrap();
        assert!(pools.is_degraded());
        assert!(hull.is_degenerate());
        assert!(pools.inside.is_empty());
        assert_eq!(pools.outside.len(), 4);
    }

    #[test]
    fn free_map_goes_straight_to_goal() {
        let map = GridMap::new(64, 64).with_query(Point::new(4.5, 4.5), Point::new(60.5, 40.5));
        let mask = GuidanceMask::empty(64, 64);
        let rec = convex_neural_plan(&map, &mask, &PlannerConfig::default()).unwrap();
        assert!(rec.success);
        assert!(rec.degraded_guidance);
        assert!((rec.length.unwrap() - map.start.dist(map.goal)).abs() < 1e-9);
        assert!(rec.smoothness.unwrap() < 1e-9);
    }

    #[test]
    fn same_seed_same_record() {
        let map = square_map();
        let mut mask = GuidanceMask::empty(40, 40);
        mask.set(14, 14, true);
        let cfg = PlannerConfig::default().with_seed(7);
        let a = convex_neural_plan(&map, &mask, &cfg).unwrap();
        let b = convex_neural_plan(&map, &mask, &cfg).unwrap();
        assert!(a.success);
        assert_eq!(a.without_time(), b.without_time());
    }
}
