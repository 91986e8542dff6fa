//! Procedural maps: random convex and notched (concave) polygons rasterised
//! onto the grid, plus a feasible start/goal query.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{inflate, segment_collision_free, GridMap, DEFAULT_SAFETY_MARGIN};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::planners::visibility::plan_visibility_astar;
use crate::rng::{seeded, PlannerRng};

pub const MAX_GENERATION_ATTEMPTS: usize = 50;

/// Query pairs tried per obstacle layout before the layout is redrawn.
const QUERY_TRIES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Sparse,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Sparse, Difficulty::Medium, Difficulty::Hard];

    /// Accepted occupied fraction of the raw (uninflated) map.
    pub fn occupancy_band(self) -> (f64, f64) {
        match self {
            Difficulty::Sparse => (0.02, 0.08),
            Difficulty::Medium => (0.08, 0.18),
            Difficulty::Hard => (0.18, 0.30),
        }
    }

    /// Inclusive polygon-count range.
    pub fn obstacle_count(self) -> (usize, usize) {
        match self {
            Difficulty::Sparse => (3, 6),
            Difficulty::Medium => (6, 14),
            Difficulty::Hard => (14, 26),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Sparse => "sparse",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Difficulty {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sparse" | "easy" => Ok(Difficulty::Sparse),
            "medium" => Ok(Difficulty::Medium),
            "hard" | "dense" => Ok(Difficulty::Hard),
            other => Err(Error::Config(format!("unknown difficulty `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapGenConfig {
    pub difficulty: Difficulty,
    pub width: usize,
    pub height: usize,
    /// Inflation used to check start/goal clearance and feasibility.
    pub safety_margin: f64,
    /// Minimum start-goal distance as a fraction of the shorter side.
    pub min_query_fraction: f64,
    /// Reject queries whose endpoints see each other directly.
    pub require_detour: bool,
}

impl MapGenConfig {
    pub fn new(difficulty: Difficulty, width: usize, height: usize) -> Self {
        Self {
            difficulty,
            width,
            height,
            safety_margin: DEFAULT_SAFETY_MARGIN,
            min_query_fraction: 0.5,
            require_detour: true,
        }
    }
}

/// Generates a raw (uninflated) map whose query is feasible after
/// inflation by the default safety margin.
pub fn generate_map(seed: u64, difficulty: Difficulty, width: usize, height: usize) -> Result<GridMap> {
    generate_map_with(seed, &MapGenConfig::new(difficulty, width, height))
}

pub fn generate_map_with(seed: u64, cfg: &MapGenConfig) -> Result<GridMap> {
    if cfg.width < 32 || cfg.height < 32 {
        return Err(Error::Config(format!(
            "generated maps need at least 32x32 cells, got {}x{}",
            cfg.width, cfg.height
        )));
    }
    let mut rng = seeded(seed);
    let (lo, hi) = cfg.difficulty.occupancy_band();
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let raw = random_layout(cfg, &mut rng);
        let fraction = raw.occupied_fraction();
        if fraction < lo || fraction > hi {
            continue;
        }
        let inflated = inflate(&raw, cfg.safety_margin);
        let min_dist = cfg.min_query_fraction * cfg.width.min(cfg.height) as f64;
        if let Some((start, goal)) = random_query(&inflated, &mut rng, min_dist, cfg.require_detour) {
            return Ok(raw.with_query(start, goal));
        }
    }
    Err(Error::Generation {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}

/// Picks a start/goal pair of free cell centres at least `min_dist` apart
/// that visibility A* can connect on `inflated`. With `require_detour` the
/// straight segment between them must be blocked.
pub fn random_query(
    inflated: &GridMap,
    rng: &mut PlannerRng,
    min_dist: f64,
    require_detour: bool,
) -> Option<(Point, Point)> {
    let labels = components(inflated);
    let free = inflated.free_cells();
    if free.len() < 2 {
        return None;
    }
    for _ in 0..QUERY_TRIES {
        let (sr, sc) = free[rng.random_range(0..free.len())];
        let comp = labels[inflated.index(sr, sc)];
        let start = Point::cell_center(sr, sc);
        let candidates: Vec<(usize, usize)> = free
            .iter()
            .copied()
            .filter(|&(r, c)| {
                labels[inflated.index(r, c)] == comp && Point::cell_center(r, c).dist(start) >= min_dist
            })
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let (gr, gc) = candidates[rng.random_range(0..candidates.len())];
        let goal = Point::cell_center(gr, gc);
        if require_detour && segment_collision_free(inflated, start, goal) {
            continue;
        }
        let query = inflated.clone().with_query(start, goal);
        if plan_visibility_astar(&query).is_ok() {
            return Some((start, goal));
        }
    }
    None
}

/// 8-connected free-space component labels; occupied cells get `u32::MAX`.
fn components(map: &GridMap) -> Vec<u32> {
    let mut labels = vec![u32::MAX; map.width * map.height];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for r in 0..map.height {
        for c in 0..map.width {
            let i = map.index(r, c);
            if map.occupancy[i] || labels[i] != u32::MAX {
                continue;
            }
            labels[i] = next;
            stack.push((r, c));
            while let Some((cr, cc)) = stack.pop() {
                for dr in -1isize..=1 {
                    for dc in -1isize..=1 {
                        let (nr, nc) = (cr as isize + dr, cc as isize + dc);
                        if !map.in_bounds(nr, nc) {
                            continue;
                        }
                        let j = map.index(nr as usize, nc as usize);
                        if !map.occupancy[j] && labels[j] == u32::MAX {
                            labels[j] = next;
                            stack.push((nr as usize, nc as usize));
                        }
                    }
                }
            }
            next += 1;
        }
    }
    labels
}

fn random_layout(cfg: &MapGenConfig, rng: &mut PlannerRng) -> GridMap {
    let (w, h) = (cfg.width as f64, cfg.height as f64);
    let (lo, hi) = cfg.difficulty.occupancy_band();
    let (cmin, cmax) = cfg.difficulty.obstacle_count();
    let count = rng.random_range(cmin..=cmax);
    // Aim above the band's lower edge; overlaps eat some of the area.
    let target = rng.random_range(lo + 0.3 * (hi - lo)..hi - 0.05 * (hi - lo)) * 1.08;
    let mean_area = target * w * h / count as f64;

    let mut map = GridMap::new(cfg.width, cfg.height);
    for _ in 0..count {
        let area = mean_area * rng.random_range(0.5..1.5);
        let concave = rng.random_bool(0.5);
        let center = Point::new(rng.random_range(0.05 * w..0.95 * w), rng.random_range(0.05 * h..0.95 * h));
        let poly = random_polygon(rng, center, area, concave);
        rasterize(&mut map, &poly);
    }
    map
}

/// Vertices on a rotated ellipse at jittered, evenly spaced angles form a
/// convex polygon; pulling a new vertex inward at an edge midpoint notches
/// it into a concave one. The result is scaled to `area` and centred.
fn random_polygon(rng: &mut PlannerRng, center: Point, area: f64, concave: bool) -> Vec<Point> {
    let n = rng.random_range(3..=10usize);
    let offset = rng.random_range(0.0..2.0 * PI);
    let (sx, sy) = (rng.random_range(0.6..1.4), rng.random_range(0.6..1.4));
    let rot = rng.random_range(0.0..PI);
    let (cr, sr) = (rot.cos(), rot.sin());
    // keeps every angular gap below pi so the centre stays inside
    let jitter = if n == 3 { 0.2 } else { 0.35 };
    let mut verts: Vec<Point> = (0..n)
        .map(|k| {
            let a = offset + (k as f64 + rng.random_range(-jitter..jitter)) * 2.0 * PI / n as f64;
            let (x, y) = (sx * a.cos(), sy * a.sin());
            Point::new(cr * x - sr * y, sr * x + cr * y)
        })
        .collect();
    if concave {
        let k = rng.random_range(0..n);
        let mid = (verts[k] + verts[(k + 1) % n]) * 0.5;
        let notch = mid * rng.random_range(0.15..0.55);
        verts.insert(k + 1, notch);
    }
    let current = polygon_area(&verts).abs();
    let scale = if current > 0.0 { (area / current).sqrt() } else { 1.0 };
    verts.iter().map(|&v| center + v * scale).collect()
}

fn polygon_area(verts: &[Point]) -> f64 {
    let n = verts.len();
    (0..n).map(|i| verts[i].cross(verts[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Convexity classifier for a simple polygon: every turn has the same sign.
pub fn is_convex_polygon(verts: &[Point]) -> bool {
    let n = verts.len();
    if n < 3 {
        return true;
    }
    let mut sign = 0.0f64;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let c = verts[(i + 2) % n];
        let turn = (b - a).cross(c - b);
        if turn.abs() < 1e-12 {
            continue;
        }
        if sign == 0.0 {
            sign = turn.signum();
        } else if turn.signum() != sign {
            return false;
        }
    }
    true
}

fn point_in_polygon(p: Point, verts: &[Point]) -> bool {
    let n = verts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (verts[i], verts[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Marks every cell whose centre falls inside the polygon.
fn rasterize(map: &mut GridMap, verts: &[Point]) {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for v in verts {
        x0 = x0.min(v.x);
        y0 = y0.min(v.y);
        x1 = x1.max(v.x);
        y1 = y1.max(v.y);
    }
    let c0 = x0.floor().max(0.0) as usize;
    let r0 = y0.floor().max(0.0) as usize;
    let c1 = (x1.ceil().max(0.0) as usize).min(map.width);
    let r1 = (y1.ceil().max(0.0) as usize).min(map.height);
    for r in r0..r1 {
        for c in c0..c1 {
            if point_in_polygon(Point::cell_center(r, c), verts) {
                map.set_occupied(r, c, true);
            }
        }
    }
}
