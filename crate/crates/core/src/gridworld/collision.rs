use super::GridMap;
use crate::geometry::Point;

/// Supercover collision test for the closed segment `pq`.
///
/// Cells are treated as closed unit squares, so a segment that grazes an
/// occupied cell's edge or corner collides. The segment is swept one column
/// strip at a time; within each strip the covered rows form a contiguous
/// range. Cells outside the grid are ignored.
pub fn segment_collision_free(map: &GridMap, p: Point, q: Point) -> bool {
    // canonical endpoint order keeps the test exactly symmetric
    let (a, b) = if (p.x, p.y) <= (q.x, q.y) { (p, q) } else { (q, p) };
    let (w, h) = (map.width as i64, map.height as i64);

    let col_lo = (a.x.ceil() as i64 - 1).max(0);
    let col_hi = (b.x.floor() as i64).min(w - 1);
    let dx = b.x - a.x;
    let slope = if dx != 0.0 { (b.y - a.y) / dx } else { 0.0 };

    for col in col_lo..=col_hi {
        let (y0, y1) = if dx == 0.0 {
            (a.y.min(b.y), a.y.max(b.y))
        } else {
            let x_lo = (col as f64).max(a.x);
            let x_hi = ((col + 1) as f64).min(b.x);
            if x_lo > x_hi {
                continue;
            }
            let ya = a.y + (x_lo - a.x) * slope;
            let yb = a.y + (x_hi - a.x) * slope;
            (ya.min(yb), ya.max(yb))
        };
        let row_lo = (y0.ceil() as i64 - 1).max(0);
        let row_hi = (y1.floor() as i64).min(h - 1);
        for row in row_lo..=row_hi {
            if map.is_occupied(row as usize, col as usize) {
                return false;
            }
        }
    }
    true
}

/// True when `p` lies inside the grid on a free cell.
pub fn point_free(map: &GridMap, p: Point) -> bool {
    !map.occupied_at(p)
}
