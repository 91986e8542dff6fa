//! RRT* with a fixed neighbour radius and pluggable sampling.

use std::time::Instant;

use rand::Rng;

use super::index::BucketIndex;
use super::sampler::Sampler;
use super::tree::Tree;
use super::{PlannerConfig, RunRecord};
use crate::error::{Error, Result};
use crate::geometry::{steer, PathPlan, Point};
use crate::gridworld::{point_free, segment_collision_free, GridMap};
use crate::rng::seeded;

/// Two nodes closer than this are treated as the same configuration.
const DUPLICATE_EPS: f64 = 1e-9;

/// Picks the collision-free neighbour minimising `cost + distance`, lowest
/// index first on ties. `None` when every connection is blocked.
pub fn choose_parent(tree: &Tree, x_new: Point, neighbors: &[usize], map: &GridMap) -> Option<(usize, f64)> {
    let mut candidates: Vec<(f64, usize)> = neighbors
        .iter()
        .map(|&i| (tree.cost(i) + tree.position(i).dist(x_new), i))
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    candidates
        .into_iter()
        .find(|&(_, i)| segment_collision_free(map, tree.position(i), x_new))
        .map(|(c, i)| (i, c))
}

/// Reroutes neighbours through `new` when that strictly lowers their cost.
/// Returns the number of nodes reparented.
pub fn rewire(tree: &mut Tree, new: usize, neighbors: &[usize], map: &GridMap) -> usize {
    let mut count = 0;
    for &n in neighbors {
        if n == new || tree.node(new).parent == Some(n) {
            continue;
        }
        let via = tree.cost(new) + tree.position(new).dist(tree.position(n));
        if via < tree.cost(n) && segment_collision_free(map, tree.position(new), tree.position(n)) {
            tree.reparent(n, new);
            count += 1;
        }
    }
    count
}

/// True once the trace holds an entry `stall_window` iterations before the
/// latest one and the cost moved by less than `eps` between them.
pub fn early_stop_check(cost_trace: &[(usize, f64)], stall_window: usize, eps: f64) -> bool {
    let Some(&(k, c_k)) = cost_trace.last() else {
        return false;
    };
    if !c_k.is_finite() || k < stall_window {
        return false;
    }
    let target = k - stall_window;
    let Ok(pos) = cost_trace.binary_search_by(|&(it, _)| it.cmp(&target)) else {
        return false;
    };
    let c_prev = cost_trace[pos].1;
    c_prev.is_finite() && (c_k - c_prev).abs() < eps
}

pub fn rrt_star_plan<S: Sampler>(map: &GridMap, cfg: &PlannerConfig, sampler: S, early_stop: bool) -> Result<RunRecord> {
    rrt_star_plan_observed(map, cfg, sampler, early_stop, &mut |_, _| {})
}

/// As [`rrt_star_plan`], calling `observer(iteration, tree)` after every
/// iteration, rejected ones included.
pub fn rrt_star_plan_observed<S: Sampler>(
    map: &GridMap,
    cfg: &PlannerConfig,
    mut sampler: S,
    early_stop: bool,
    observer: &mut dyn FnMut(usize, &Tree),
) -> Result<RunRecord> {
    cfg.validate()?;
    if !map.query_is_free() {
        return Err(Error::Config("start or goal lies on an occupied cell".into()));
    }
    let clock = Instant::now();
    let (start, goal) = (map.start, map.goal);
    let mut rng = seeded(cfg.seed);
    let mut tree = Tree::new(start);
    let mut index = BucketIndex::new(map.width as f64, map.height as f64, cfg.near_radius);
    index.insert(0, start);

    let reaches_goal = |p: Point| p.dist(goal) <= cfg.goal_tol && segment_collision_free(map, p, goal);
    let mut goal_nodes: Vec<usize> = Vec::new();
    if reaches_goal(start) {
        goal_nodes.push(0);
    }

    let mut best = f64::INFINITY;
    let mut best_node = None;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut stopped_early = false;

    for it in 1..=cfg.max_iters {
        iterations = it;
        let x_rand = if rng.random::<f64>() < cfg.goal_bias {
            goal
        } else {
            sampler.sample(best, &mut rng)
        };
        if let Some(id) = extend(&mut tree, &mut index, map, cfg, x_rand) {
            if reaches_goal(tree.position(id)) {
                goal_nodes.push(id);
            }
        }

        // rewiring may have lowered any goal node's cost
        for &g in &goal_nodes {
            let c = tree.cost(g) + tree.position(g).dist(goal);
            if c < best {
                best = c;
                best_node = Some(g);
            }
        }
        if best.is_finite() {
            trace.push((it, best));
        }
        observer(it, &tree);
        if early_stop && early_stop_check(&trace, cfg.stall_window, cfg.stall_eps) {
            stopped_early = true;
            break;
        }
    }

    let wall_time = clock.elapsed().as_secs_f64();
    let Some(node) = best_node else {
        return Ok(RunRecord::failure(iterations, wall_time));
    };
    let mut waypoints = tree.path_to(node);
    if waypoints.last() != Some(&goal) {
        waypoints.push(goal);
    }
    let mut record = RunRecord::from_path(PathPlan::new(waypoints), iterations, wall_time);
    record.cost_trace = trace;
    record.stopped_early = stopped_early;
    Ok(record)
}

/// One steer/connect/rewire step. Returns the inserted node, if any.
fn extend(tree: &mut Tree, index: &mut BucketIndex, map: &GridMap, cfg: &PlannerConfig, x_rand: Point) -> Option<usize> {
    let nearest = index.nearest(x_rand)?;
    let from = tree.position(nearest);
    let steered = steer(from, x_rand, cfg.step);
    if steered.degenerate {
        return None;
    }
    let x_new = steered.point;
    if !point_free(map, x_new) || !segment_collision_free(map, from, x_new) {
        return None;
    }
    let mut near = index.within(x_new, cfg.near_radius);
    if let Err(pos) = near.binary_search(&nearest) {
        near.insert(pos, nearest);
    }
    if near.iter().any(|&i| tree.position(i).dist(x_new) < DUPLICATE_EPS) {
        return None;
    }
    let (parent, _) = choose_parent(tree, x_new, &near, map)?;
    let id = tree.add(x_new, parent);
    index.insert(id, x_new);
    rewire(tree, id, &near, map);
    Some(id)
}
