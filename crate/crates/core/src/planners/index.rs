//! Uniform bucket grid for nearest and radius queries over tree nodes.

use crate::geometry::Point;

#[derive(Debug, Clone)]
pub struct BucketIndex {
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<usize>>,
    points: Vec<Point>,
}

impl BucketIndex {
    /// Index covering `[0, width] x [0, height]`. Points outside are
    /// clamped into the border buckets.
    pub fn new(width: f64, height: f64, cell: f64) -> Self {
        let cols = ((width / cell).ceil() as usize).max(1);
        let rows = ((height / cell).ceil() as usize).max(1);
        Self {
            cell,
            cols,
            rows,
            buckets: vec![Vec::new(); cols * rows],
            points: Vec::new(),
        }
    }

    fn bucket_of(&self, p: Point) -> (usize, usize) {
        let c = ((p.x / self.cell).floor().max(0.0) as usize).min(self.cols - 1);
        let r = ((p.y / self.cell).floor().max(0.0) as usize).min(self.rows - 1);
        (r, c)
    }

    /// Points must be inserted with consecutive ids starting at 0.
    pub fn insert(&mut self, id: usize, p: Point) {
        debug_assert_eq!(id, self.points.len());
        let (r, c) = self.bucket_of(p);
        self.buckets[r * self.cols + c].push(id);
        self.points.push(p);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closest id to `q`; equal distances go to the lowest id.
    pub fn nearest(&self, q: Point) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let (qr, qc) = self.bucket_of(q);
        let mut best: Option<(f64, usize)> = None;
        let max_ring = self.rows.max(self.cols);
        for ring in 0..=max_ring {
            let r0 = qr as isize - ring as isize;
            let r1 = qr as isize + ring as isize;
            let c0 = qc as isize - ring as isize;
            let c1 = qc as isize + ring as isize;
            for r in r0..=r1 {
                for c in c0..=c1 {
                    let on_ring = r == r0 || r == r1 || c == c0 || c == c1;
                    if !on_ring || r < 0 || c < 0 || r as usize >= self.rows || c as usize >= self.cols {
                        continue;
                    }
                    for &id in &self.buckets[r as usize * self.cols + c as usize] {
                        let d = self.points[id].dist_sq(q);
                        if best.is_none_or(|(bd, bid)| d < bd || (d == bd && id < bid)) {
                            best = Some((d, id));
                        }
                    }
                }
            }
            // Anything beyond this ring is at least `ring * cell` away, but
            // only if the query itself sits inside the indexed area.
            if let Some((bd, _)) = best {
                let reach = ring as f64 * self.cell - self.outside_margin(q);
                if reach > 0.0 && bd < reach * reach {
                    break;
                }
            }
        }
        best.map(|(_, id)| id)
    }

    /// Distance by which `q` lies outside the indexed rectangle.
    fn outside_margin(&self, q: Point) -> f64 {
        let w = self.cols as f64 * self.cell;
        let h = self.rows as f64 * self.cell;
        let dx = (-q.x).max(q.x - w).max(0.0);
        let dy = (-q.y).max(q.y - h).max(0.0);
        dx.hypot(dy)
    }

    /// Ids within distance `radius` of `q`, ascending.
    pub fn within(&self, q: Point, radius: f64) -> Vec<usize> {
        let (r0, c0) = self.bucket_of(Point::new(q.x - radius, q.y - radius));
        let (r1, c1) = self.bucket_of(Point::new(q.x + radius, q.y + radius));
        let r2 = radius * radius;
        let mut out = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                out.extend(
                    self.buckets[r * self.cols + c]
                        .iter()
                        .copied()
                        .filter(|&id| self.points[id].dist_sq(q) <= r2),
                );
            }
        }
        out.sort_unstable();
        out
    }
}
