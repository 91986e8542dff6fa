//! Continuous geometry shared by every planner: points, polylines and their
//! quality metrics, steering, convex hulls and informed-ellipse sampling.
//!
//! Coordinates are in cell units. Cell `(row, col)` covers the unit square
//! whose centre is `(col + 0.5, row + 0.5)`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collinearity tolerance for hull orientation tests.
pub const COLLINEAR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Centre of grid cell `(row, col)`.
    pub fn cell_center(row: usize, col: usize) -> Self {
        Self::new(col as f64 + 0.5, row as f64 + 0.5)
    }

    /// The `(row, col)` cell containing this point. Negative coordinates map
    /// to `None`.
    pub fn cell(self) -> Option<(usize, usize)> {
        if self.x < 0.0 || self.y < 0.0 || !self.x.is_finite() || !self.y.is_finite() {
            return None;
        }
        Some((self.y.floor() as usize, self.x.floor() as usize))
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        let d = self - other;
        d.x * d.x + d.y * d.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Orientation of `c` relative to the directed line `a -> b`.
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// An ordered waypoint sequence from start to goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPlan {
    pub waypoints: Vec<Point>,
}

impl PathPlan {
    pub fn new(waypoints: Vec<Point>) -> Self {
        Self { waypoints }
    }

    pub fn length(&self) -> f64 {
        path_length(&self.waypoints)
    }

    pub fn smoothness(&self) -> f64 {
        path_smoothness(&self.waypoints)
    }

    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        Self { waypoints }
    }
}

/// Sum of Euclidean segment lengths.
pub fn path_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn wrap_angle(mut a: f64) -> f64 {
    while a > PI {
        a -= 2.0 * PI;
    }
    while a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Cumulative absolute heading change over interior vertices.
///
/// Zero-length segments carry no heading and are skipped, so a repeated
/// waypoint does not register as a turn.
pub fn path_smoothness(points: &[Point]) -> f64 {
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    for w in points.windows(2) {
        let d = w[1] - w[0];
        if d.x == 0.0 && d.y == 0.0 {
            continue;
        }
        let heading = d.y.atan2(d.x);
        if let Some(p) = prev {
            total += wrap_angle(heading - p).abs();
        }
        prev = Some(heading);
    }
    total
}

/// Result of steering from one point toward another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steered {
    pub point: Point,
    /// Set when the target coincides with the origin; the caller should
    /// skip the iteration.
    pub degenerate: bool,
}

pub fn steer(from: Point, toward: Point, step: f64) -> Steered {
    let d = toward - from;
    let len = d.norm();
    if len == 0.0 {
        return Steered {
            point: from,
            degenerate: true,
        };
    }
    let point = if len <= step {
        toward
    } else {
        from + d * (step / len)
    };
    Steered {
        point,
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullKind {
    /// All inputs coincide.
    Point,
    /// All inputs are collinear.
    Segment,
    Polygon,
}

/// Convex hull with vertices in counter-clockwise order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullPolygon {
    pub vertices: Vec<Point>,
    pub kind: HullKind,
}

impl HullPolygon {
    pub fn is_degenerate(&self) -> bool {
        self.kind != HullKind::Polygon
    }

    /// Membership test with the boundary counted as inside.
    pub fn contains(&self, p: Point) -> bool {
        point_in_hull(p, self)
    }
}

/// Andrew's monotone chain. Collinear points on hull edges are dropped.
pub fn convex_hull(points: &[Point]) -> Result<HullPolygon> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();

    if pts.len() == 1 {
        return Ok(HullPolygon {
            vertices: pts,
            kind: HullKind::Point,
        });
    }

    let n = pts.len();
    let mut hull: Vec<Point> = Vec::with_capacity(2 * n);
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= COLLINEAR_EPS
        {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= COLLINEAR_EPS
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() < 3 {
        // Collinear input: the extreme points in sort order span the segment.
        return Ok(HullPolygon {
            vertices: vec![pts[0], pts[n - 1]],
            kind: HullKind::Segment,
        });
    }
    Ok(HullPolygon {
        vertices: hull,
        kind: HullKind::Polygon,
    })
}

pub fn point_in_hull(p: Point, hull: &HullPolygon) -> bool {
    const TOL: f64 = 1e-9;
    match hull.kind {
        HullKind::Point => p.dist(hull.vertices[0]) <= TOL,
        HullKind::Segment => distance_to_segment(p, hull.vertices[0], hull.vertices[1]) <= TOL,
        HullKind::Polygon => {
            let n = hull.vertices.len();
            (0..n).all(|i| {
                let a = hull.vertices[i];
                let b = hull.vertices[(i + 1) % n];
                let edge = b - a;
                // normalised so the tolerance is a distance
                orient(a, b, p) >= -TOL * edge.norm()
            })
        }
    }
}

pub fn distance_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len_sq = ab.x * ab.x + ab.y * ab.y;
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = (((p - a).x * ab.x + (p - a).y * ab.y) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Informed sampling region: all points whose summed distance to the two
/// foci is at most `c_best`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseSpec {
    pub focus_a: Point,
    pub focus_b: Point,
    pub c_best: f64,
    pub c_min: f64,
}

impl EllipseSpec {
    pub fn new(focus_a: Point, focus_b: Point, c_best: f64) -> Self {
        Self {
            focus_a,
            focus_b,
            c_best,
            c_min: focus_a.dist(focus_b),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.c_best.is_finite()
    }

    pub fn center(&self) -> Point {
        (self.focus_a + self.focus_b) * 0.5
    }

    /// Focal-distance sum membership test with absolute tolerance `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        !self.is_bounded() || p.dist(self.focus_a) + p.dist(self.focus_b) <= self.c_best + tol
    }

    /// Semi-major and semi-minor axis lengths.
    pub fn semi_axes(&self) -> (f64, f64) {
        let minor_sq = (self.c_best * self.c_best - self.c_min * self.c_min).max(0.0);
        (self.c_best / 2.0, minor_sq.sqrt() / 2.0)
    }
}

/// Draws a point uniformly from the ellipse by mapping a uniform unit-disk
/// sample through the ellipse's affine frame. An unbounded ellipse
/// (`c_best = inf`) samples the map rectangle `[0, width) x [0, height)`.
pub fn informed_ellipse_sample<R: Rng + ?Sized>(
    spec: &EllipseSpec,
    bounds: (f64, f64),
    rng: &mut R,
) -> Result<Point> {
    if !spec.is_bounded() {
        return Ok(Point::new(
            rng.random::<f64>() * bounds.0,
            rng.random::<f64>() * bounds.1,
        ));
    }
    if spec.c_best < spec.c_min {
        return Err(Error::InadmissibleCost {
            c_best: spec.c_best,
            c_min: spec.c_min,
        });
    }
    let r = rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    let (a, b) = spec.semi_axes();
    let local = Point::new(a * r * theta.cos(), b * r * theta.sin());

    let axis = spec.focus_b - spec.focus_a;
    let (cos, sin) = if spec.c_min > 0.0 {
        (axis.x / spec.c_min, axis.y / spec.c_min)
    } else {
        (1.0, 0.0)
    };
    let rotated = Point::new(cos * local.x - sin * local.y, sin * local.x + cos * local.y);
    Ok(spec.center() + rotated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn length_examples() {
        assert_eq!(path_length(&[p(0.0, 0.0), p(3.0, 4.0)]), 5.0);
        assert_eq!(path_length(&[p(2.0, 2.0)]), 0.0);
        assert_eq!(path_length(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]), 2.0);
    }

    #[test]
    fn smoothness_examples() {
        assert_eq!(path_smoothness(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]), 0.0);
        let right = path_smoothness(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]);
        assert!((right - PI / 2.0).abs() < 1e-12);
        // headings 0, pi/4, 0
        let zig = path_smoothness(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 1.0), p(3.0, 1.0)]);
        assert!((zig - PI / 2.0).abs() < 1e-12);
        assert_eq!(path_smoothness(&[p(0.0, 0.0), p(1.0, 1.0)]), 0.0);
    }

    #[test]
    fn smoothness_wraps_across_pi() {
        // heading pi - 0.1 then -pi + 0.1: a 0.2 rad turn, not 2pi - 0.2
        let a = p(0.0, 0.0);
        let b = a + p((PI - 0.1).cos(), (PI - 0.1).sin());
        let c = b + p((-PI + 0.1).cos(), (-PI + 0.1).sin());
        assert!((path_smoothness(&[a, b, c]) - 0.2).abs() < 1e-9);
    }

    #[test]
    fn smoothness_skips_zero_length_segments() {
        let s = path_smoothness(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]);
        assert!((s - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn steer_examples() {
        assert_eq!(steer(p(0.0, 0.0), p(10.0, 0.0), 5.0).point, p(5.0, 0.0));
        let s = steer(p(0.0, 0.0), p(3.0, 4.0), 10.0);
        assert_eq!(s.point, p(3.0, 4.0));
        assert!(!s.degenerate);
        let d = steer(p(1.0, 1.0), p(1.0, 1.0), 5.0);
        assert_eq!(d.point, p(1.0, 1.0));
        assert!(d.degenerate);
    }

    #[test]
    fn hull_examples() {
        let tri = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]).unwrap();
        assert_eq!(tri.kind, HullKind::Polygon);
        assert_eq!(tri.vertices, vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]);

        let sq = convex_hull(&[
            p(0.0, 0.0),
            p(1.0, 1.0),
            p(0.5, 0.5),
            p(1.0, 0.0),
            p(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(sq.vertices, vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]);

        let seg = convex_hull(&[p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)]).unwrap();
        assert_eq!(seg.kind, HullKind::Segment);
        assert_eq!(seg.vertices, vec![p(0.0, 0.0), p(2.0, 2.0)]);

        let single = convex_hull(&[p(3.0, 3.0), p(3.0, 3.0)]).unwrap();
        assert_eq!(single.kind, HullKind::Point);

        assert!(matches!(convex_hull(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn hull_drops_collinear_edge_points() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)])
            .unwrap();
        assert_eq!(h.vertices.len(), 4);
    }

    #[test]
    fn point_in_hull_examples() {
        let sq = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap();
        assert!(point_in_hull(p(0.5, 0.5), &sq));
        assert!(!point_in_hull(p(2.0, 0.0), &sq));
        assert!(point_in_hull(p(1.0, 0.5), &sq));
        assert!(point_in_hull(p(1.0, 1.0), &sq));

        let seg = convex_hull(&[p(0.0, 0.0), p(2.0, 2.0)]).unwrap();
        assert!(seg.contains(p(1.0, 1.0)));
        assert!(!seg.contains(p(1.0, 1.1)));
        assert!(!seg.contains(p(3.0, 3.0)));
    }

    #[test]
    fn ellipse_unbounded_samples_map_rectangle() {
        let spec = EllipseSpec::new(p(1.0, 1.0), p(5.0, 1.0), f64::INFINITY);
        let mut rng = seeded(3);
        for _ in 0..1000 {
            let s = informed_ellipse_sample(&spec, (10.0, 20.0), &mut rng).unwrap();
            assert!((0.0..10.0).contains(&s.x) && (0.0..20.0).contains(&s.y));
        }
    }

    #[test]
    fn ellipse_degenerate_samples_focal_segment() {
        let a = p(1.0, 2.0);
        let b = p(7.0, 10.0);
        let spec = EllipseSpec::new(a, b, a.dist(b));
        let mut rng = seeded(5);
        for _ in 0..1000 {
            let s = informed_ellipse_sample(&spec, (50.0, 50.0), &mut rng).unwrap();
            assert!(distance_to_segment(s, a, b) < 1e-9);
        }
    }

    #[test]
    fn ellipse_rejects_inadmissible_cost() {
        let spec = EllipseSpec::new(p(0.0, 0.0), p(10.0, 0.0), 5.0);
        let err = informed_ellipse_sample(&spec, (20.0, 20.0), &mut seeded(1)).unwrap_err();
        assert!(matches!(err, Error::InadmissibleCost { .. }));
    }

    #[test]
    fn ellipse_membership_and_mean_over_many_draws() {
        let spec = EllipseSpec::new(p(10.0, 20.0), p(60.0, 45.0), 80.0);
        let mut rng = seeded(11);
        let n = 100_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let s = informed_ellipse_sample(&spec, (100.0, 100.0), &mut rng).unwrap();
            assert!(s.dist(spec.focus_a) + s.dist(spec.focus_b) <= spec.c_best + 1e-9);
            sx += s.x;
            sy += s.y;
        }
        // For a uniform ellipse, the variance along each semi-axis is axis^2 / 4;
        // the larger semi-axis bounds the per-coordinate standard deviation.
        let (a, _) = spec.semi_axes();
        let sigma_mean = (a / 2.0) / (n as f64).sqrt();
        let c = spec.center();
        assert!((sx / n as f64 - c.x).abs() < 3.0 * sigma_mean);
        assert!((sy / n as f64 - c.y).abs() < 3.0 * sigma_mean);
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn length_and_smoothness_reversal_invariant(pts in prop::collection::vec(arb_point(), 0..12)) {
            let plan = PathPlan::new(pts);
            let rev = plan.reversed();
            prop_assert!((plan.length() - rev.length()).abs() < 1e-9);
            prop_assert!((plan.smoothness() - rev.smoothness()).abs() < 1e-9);
            prop_assert!(plan.smoothness() >= 0.0);
        }

        #[test]
        fn steer_stays_within_step_on_the_ray(a in arb_point(), b in arb_point(), step in 0.1..20.0f64) {
            let s = steer(a, b, step);
            prop_assert!(s.point.dist(a) <= step + 1e-9);
            prop_assert!(orient(a, b, s.point).abs() <= 1e-9 * (1.0 + a.dist(b)) * (1.0 + step));
        }

        #[test]
        fn hull_contains_all_inputs(pts in prop::collection::vec(arb_point(), 1..40)) {
            let hull = convex_hull(&pts).unwrap();
            for &q in &pts {
                prop_assert!(point_in_hull(q, &hull));
            }
        }

        #[test]
        fn hull_of_grid_points_contains_inputs(pts in prop::collection::vec((0u8..20, 0u8..20), 1..40)) {
            // integer lattice input exercises exact collinearity
            let pts: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x as f64, y as f64)).collect();
            let hull = convex_hull(&pts).unwrap();
            for &q in &pts {
                prop_assert!(point_in_hull(q, &hull));
            }
        }
    }
}
