use super::GuidanceMask;
use crate::error::Result;
use crate::geometry::{distance_to_segment, Point};
use crate::gridworld::GridMap;
use crate::planners::plan_visibility_astar;

/// Label radius around oracle waypoints, in cells.
pub const ORACLE_RADIUS: f64 = 6.0;

/// Marks every cell whose centre lies within `radius` of a point in
/// `centers`.
pub fn disk_mask(width: usize, height: usize, centers: &[Point], radius: f64) -> GuidanceMask {
    let mut mask = GuidanceMask::empty(width, height);
    let r2 = radius * radius;
    for &p in centers {
        let r0 = (p.y - radius - 0.5).floor().max(0.0) as usize;
        let c0 = (p.x - radius - 0.5).floor().max(0.0) as usize;
        let r1 = ((p.y + radius).ceil().max(0.0) as usize).min(height.saturating_sub(1));
        let c1 = ((p.x + radius).ceil().max(0.0) as usize).min(width.saturating_sub(1));
        for r in r0..=r1 {
            for c in c0..=c1 {
                if Point::cell_center(r, c).dist_sq(p) <= r2 {
                    mask.set(r, c, true);
                }
            }
        }
    }
    mask
}

/// Disks of `radius` around the interior waypoints of the visibility path
/// on the inflated `map`. The start and goal cells are never marked.
pub fn oracle_guidance(map: &GridMap, radius: f64) -> Result<GuidanceMask> {
    let rec = plan_visibility_astar(map)?;
    let path = rec.path.expect("successful plan carries a path");
    let wp = &path.waypoints;
    let interior = if wp.len() > 2 { &wp[1..wp.len() - 1] } else { &[][..] };
    let mut mask = disk_mask(map.width, map.height, interior, radius);
    clear_query(&mut mask, map);
    Ok(mask)
}

/// Dense label: every cell whose centre lies within `radius` of the
/// visibility path, query cells excluded.
pub fn oracle_corridor(map: &GridMap, radius: f64) -> Result<GuidanceMask> {
    let rec = plan_visibility_astar(map)?;
    let path = rec.path.expect("successful plan carries a path");
    let mut mask = GuidanceMask::empty(map.width, map.height);
    for r in 0..map.height {
        for c in 0..map.width {
            let p = Point::cell_center(r, c);
            let near = match path.waypoints.as_slice() {
                [only] => only.dist(p) <= radius,
                wp => wp.windows(2).any(|s| distance_to_segment(p, s[0], s[1]) <= radius),
            };
            if near {
                mask.set(r, c, true);
            }
        }
    }
    clear_query(&mut mask, map);
    Ok(mask)
}

fn clear_query(mask: &mut GuidanceMask, map: &GridMap) {
    for cell in [map.start_cell(), map.goal_cell()].into_iter().flatten() {
        mask.set(cell.0, cell.1, false);
    }
}
