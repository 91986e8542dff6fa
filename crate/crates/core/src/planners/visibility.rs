//! Shortest corner-anchored polyline via A* over a lazily checked
//! visibility graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::RunRecord;
use crate::error::{Error, Result};
use crate::geometry::{PathPlan, Point};
use crate::gridworld::{extract_convex_corners, segment_collision_free, GridMap};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    vertex: usize,
}

impl Eq for Open {}

impl Ord for Open {
    // min-heap on f, then on vertex index
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Vertices are `[start, goal, corner centres...]` in row-major corner order.
pub fn visibility_vertices(map: &GridMap) -> Vec<Point> {
    let mut v = vec![map.start, map.goal];
    v.extend(extract_convex_corners(map).points());
    v
}

/// Plans over `{start, goal} ∪ corners` of an inflated map. Edges join
/// mutually visible vertices and are only collision-checked when they
/// would improve a tentative distance.
pub fn plan_visibility_astar(map: &GridMap) -> Result<RunRecord> {
    let clock = Instant::now();
    if !map.query_is_free() {
        return Err(Error::NoPath);
    }
    let verts = visibility_vertices(map);
    let n = verts.len();
    let goal = map.goal;
    if map.start == goal {
        return Ok(RunRecord::from_path(PathPlan::new(vec![map.start]), 0, clock.elapsed().as_secs_f64()));
    }

    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    g[0] = 0.0;
    open.push(Open {
        f: verts[0].dist(goal),
        vertex: 0,
    });
    let mut expansions = 0;
    while let Some(Open { vertex: u, .. }) = open.pop() {
        if closed[u] {
            continue;
        }
        closed[u] = true;
        expansions += 1;
        if u == 1 {
            let mut path = vec![verts[1]];
            let mut cur = 1;
            while cur != 0 {
                cur = parent[cur];
                path.push(verts[cur]);
            }
            path.reverse();
            return Ok(RunRecord::from_path(PathPlan::new(path), expansions, clock.elapsed().as_secs_f64()));
        }
        for v in 0..n {
            if closed[v] {
                continue;
            }
            let cand = g[u] + verts[u].dist(verts[v]);
            if cand < g[v] && segment_collision_free(map, verts[u], verts[v]) {
                g[v] = cand;
                parent[v] = u;
                open.push(Open {
                    f: cand + verts[v].dist(goal),
                    vertex: v,
                });
            }
        }
    }
    Err(Error::NoPath)
}
