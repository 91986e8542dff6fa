//! Sampling strategies plugged into the RRT* loop.
//!
//! The loop applies goal biasing itself, so samplers only describe the
//! non-goal part of the distribution.

use std::f64::consts::PI;

use rand::Rng;

use super::convex::CornerPools;
use super::PlannerConfig;
use crate::error::Result;
use crate::geometry::{informed_ellipse_sample, EllipseSpec, Point};
use crate::gridworld::GridMap;
use crate::guidance::GuidanceMask;
use crate::rng::PlannerRng;

/// Rejection attempts before a sampler falls back to a safe choice.
const MAX_REJECTIONS: usize = 64;

pub trait Sampler {
    /// Draws a sample given the current best solution cost (`inf` before
    /// the first solution).
    fn sample(&mut self, best_cost: f64, rng: &mut PlannerRng) -> Point;
}

fn jitter_in_cell(cell: (usize, usize), rng: &mut PlannerRng) -> Point {
    Point::new(cell.1 as f64 + rng.random::<f64>(), cell.0 as f64 + rng.random::<f64>())
}

/// Uniform over free cells, then uniform inside the chosen cell.
#[derive(Debug, Clone)]
pub struct UniformSampler {
    free: Vec<(usize, usize)>,
}

impl UniformSampler {
    pub fn new(map: &GridMap) -> Self {
        Self {
            free: map.free_cells(),
        }
    }

    pub fn free_cells(&self) -> &[(usize, usize)] {
        &self.free
    }

    pub fn draw(&self, rng: &mut PlannerRng) -> Point {
        assert!(!self.free.is_empty(), "map has no free cells");
        jitter_in_cell(self.free[rng.random_range(0..self.free.len())], rng)
    }
}

impl Sampler for UniformSampler {
    fn sample(&mut self, _best_cost: f64, rng: &mut PlannerRng) -> Point {
        self.draw(rng)
    }
}

/// With probability `alpha` a point in a free predicted cell, otherwise a
/// uniform free-space point. An empty prediction degrades to uniform.
#[derive(Debug, Clone)]
pub struct NeuralSampler {
    uniform: UniformSampler,
    predicted: Vec<(usize, usize)>,
    alpha: f64,
}

impl NeuralSampler {
    pub fn new(mask: &GuidanceMask, map: &GridMap, alpha: f64) -> Result<Self> {
        mask.check_dims(map)?;
        let predicted = map
            .free_cells()
            .into_iter()
            .filter(|&(r, c)| mask.get(r, c))
            .collect();
        Ok(Self {
            uniform: UniformSampler::new(map),
            predicted,
            alpha,
        })
    }

    pub fn predicted_cells(&self) -> &[(usize, usize)] {
        &self.predicted
    }

    pub fn draw(&self, rng: &mut PlannerRng) -> Point {
        if rng.random::<f64>() < self.alpha && !self.predicted.is_empty() {
            jitter_in_cell(self.predicted[rng.random_range(0..self.predicted.len())], rng)
        } else {
            self.uniform.draw(rng)
        }
    }
}

impl Sampler for NeuralSampler {
    fn sample(&mut self, _best_cost: f64, rng: &mut PlannerRng) -> Point {
        self.draw(rng)
    }
}

/// Mask mixing restricted to the informed ellipse once a solution exists.
#[derive(Debug, Clone)]
pub struct NeuralInformedSampler {
    neural: NeuralSampler,
    occupancy: GridMap,
    start: Point,
    goal: Point,
    /// Free cells with centres inside the ellipse, cached per `c_best`.
    fallback: Option<(f64, Vec<(usize, usize)>)>,
}

impl NeuralInformedSampler {
    pub fn new(mask: &GuidanceMask, map: &GridMap, alpha: f64) -> Result<Self> {
        Ok(Self {
            neural: NeuralSampler::new(mask, map, alpha)?,
            occupancy: map.clone(),
            start: map.start,
            goal: map.goal,
            fallback: None,
        })
    }

    pub fn ellipse(&self, best_cost: f64) -> EllipseSpec {
        let mut spec = EllipseSpec::new(self.start, self.goal, best_cost);
        spec.c_best = spec.c_best.max(spec.c_min);
        spec
    }

    pub fn draw(&mut self, best_cost: f64, rng: &mut PlannerRng) -> Point {
        if !best_cost.is_finite() {
            return self.neural.draw(rng);
        }
        let spec = self.ellipse(best_cost);
        let predicted = &self.neural.predicted;
        if rng.random::<f64>() < self.neural.alpha && !predicted.is_empty() {
            for _ in 0..MAX_REJECTIONS {
                let p = jitter_in_cell(predicted[rng.random_range(0..predicted.len())], rng);
                if spec.contains(p, 0.0) {
                    return p;
                }
            }
        }
        self.draw_ellipse(&spec, rng)
    }

    fn draw_ellipse(&mut self, spec: &EllipseSpec, rng: &mut PlannerRng) -> Point {
        let bounds = (self.occupancy.width as f64, self.occupancy.height as f64);
        for _ in 0..MAX_REJECTIONS {
            let p = informed_ellipse_sample(spec, bounds, rng).expect("c_best clamped to c_min");
            if !self.occupancy.occupied_at(p) {
                return p;
            }
        }
        let stale = self.fallback.as_ref().is_none_or(|(c, _)| *c != spec.c_best);
        if stale {
            let cells = self
                .neural
                .uniform
                .free
                .iter()
                .copied()
                .filter(|&(r, c)| spec.contains(Point::cell_center(r, c), 0.0))
                .collect();
            self.fallback = Some((spec.c_best, cells));
        }
        let cells = &self.fallback.as_ref().expect("filled above").1;
        if cells.is_empty() {
            return self.neural.uniform.draw(rng);
        }
        let (r, c) = cells[rng.random_range(0..cells.len())];
        Point::cell_center(r, c)
    }
}

impl Sampler for NeuralInformedSampler {
    fn sample(&mut self, best_cost: f64, rng: &mut PlannerRng) -> Point {
        self.draw(best_cost, rng)
    }
}

/// Which pool produced a structured sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleSource {
    Goal,
    Predicted,
    InsideHull,
    OutsideHull,
}

/// Discrete sampling over the three corner pools.
#[derive(Debug, Clone)]
pub struct ConvexStructuredSampler {
    pools: CornerPools,
    occupancy: GridMap,
    goal: Point,
    alpha_pred: f64,
    alpha_explore: f64,
    corner_radius: f64,
}

impl ConvexStructuredSampler {
    pub fn new(pools: CornerPools, map: &GridMap, cfg: &PlannerConfig) -> Self {
        Self {
            pools,
            occupancy: map.clone(),
            goal: map.goal,
            alpha_pred: cfg.alpha_pred,
            alpha_explore: cfg.alpha_explore,
            corner_radius: cfg.corner_radius,
        }
    }

    pub fn pools(&self) -> &CornerPools {
        &self.pools
    }

    /// Full structured distribution including the goal-bias branch.
    pub fn sample_with_goal_bias(&self, goal_bias: f64, rng: &mut PlannerRng) -> (Point, SampleSource) {
        if rng.random::<f64>() < goal_bias {
            return (self.goal, SampleSource::Goal);
        }
        self.draw(rng)
    }

    /// Picks a pool (outside with `alpha_explore`, predicted with
    /// `(1 - alpha_explore) * alpha_pred`, inside otherwise), falling
    /// through predicted, inside, outside to the goal when a pool is empty.
    pub fn draw(&self, rng: &mut PlannerRng) -> (Point, SampleSource) {
        let r = rng.random::<f64>();
        let pred_cut = self.alpha_explore + (1.0 - self.alpha_explore) * self.alpha_pred;
        let wanted = if r < self.alpha_explore {
            SampleSource::OutsideHull
        } else if r < pred_cut {
            SampleSource::Predicted
        } else {
            SampleSource::InsideHull
        };
        let source = if !self.pool(wanted).is_empty() {
            wanted
        } else {
            match [SampleSource::Predicted, SampleSource::InsideHull, SampleSource::OutsideHull]
                .into_iter()
                .find(|&s| !self.pool(s).is_empty())
            {
                Some(s) => s,
                None => return (self.goal, SampleSource::Goal),
            }
        };
        let pool = self.pool(source);
        let center = pool[rng.random_range(0..pool.len())];
        let point = if source == SampleSource::Predicted {
            self.jitter(center, rng)
        } else {
            center
        };
        (point, source)
    }

    fn pool(&self, source: SampleSource) -> &[Point] {
        match source {
            SampleSource::Predicted => &self.pools.predicted,
            SampleSource::InsideHull => &self.pools.inside,
            SampleSource::OutsideHull => &self.pools.outside,
            SampleSource::Goal => &[],
        }
    }

    /// Uniform point in the disk of radius `corner_radius`, redrawn while
    /// it lands on an occupied cell.
    fn jitter(&self, center: Point, rng: &mut PlannerRng) -> Point {
        if self.corner_radius == 0.0 {
            return center;
        }
        for _ in 0..MAX_REJECTIONS {
            let r = self.corner_radius * rng.random::<f64>().sqrt();
            let t = 2.0 * PI * rng.random::<f64>();
            let p = center + Point::new(r * t.cos(), r * t.sin());
            if !self.occupancy.occupied_at(p) {
                return p;
            }
        }
        center
    }
}

impl Sampler for ConvexStructuredSampler {
    fn sample(&mut self, _best_cost: f64, rng: &mut PlannerRng) -> Point {
        self.draw(rng).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn half_free_map() -> GridMap {
        let mut m = GridMap::new(10, 10);
        for r in 0..10 {
            for c in 5..10 {
                m.set_occupied(r, c, true);
            }
        }
        m
    }

    #[test]
    fn uniform_single_free_cell() {
        let mut m = GridMap::new(4, 4);
        m.occupancy.iter_mut().for_each(|o| *o = true);
        m.set_occupied(2, 1, false);
        let s = UniformSampler::new(&m);
        let mut rng = seeded(1);
        for _ in 0..1000 {
            assert_eq!(s.draw(&mut rng).cell(), Some((2, 1)));
        }
    }

    #[test]
    fn uniform_is_uniform_over_free_cells() {
        let m = half_free_map();
        let s = UniformSampler::new(&m);
        let mut rng = seeded(2);
        let n = 100_000;
        let mut counts = vec![0usize; 100];
        for _ in 0..n {
            let p = s.draw(&mut rng);
            assert!(!m.occupied_at(p));
            let (r, c) = p.cell().unwrap();
            counts[r * 10 + c] += 1;
        }
        let expected = n as f64 / 50.0;
        let sigma = (expected * (1.0 - 1.0 / 50.0)).sqrt();
        let mut chi2 = 0.0;
        for (i, &k) in counts.iter().enumerate() {
            if i % 10 >= 5 {
                assert_eq!(k, 0);
                continue;
            }
            assert!((k as f64 - expected).abs() < 5.0 * sigma, "cell {i}: {k}");
            chi2 += (k as f64 - expected).powi(2) / expected;
        }
        // 49 degrees of freedom; 99.9th percentile is about 85.4
        assert!(chi2 < 85.4, "chi2 = {chi2}");
    }

    #[test]
    fn neural_alpha_zero_matches_uniform() {
        let m = half_free_map();
        let mut mask = GuidanceMask::empty(10, 10);
        mask.set(3, 3, true);
        let neural = NeuralSampler::new(&mask, &m, 0.0).unwrap();
        let uniform = UniformSampler::new(&m);
        let (mut a, mut b) = (seeded(4), seeded(4));
        for _ in 0..1000 {
            // the alpha draw consumes one value first
            let _: f64 = b.random();
            assert_eq!(neural.draw(&mut a), uniform.draw(&mut b));
        }
    }

    #[test]
    fn neural_alpha_one_single_mask_cell() {
        let m = half_free_map();
        let mut mask = GuidanceMask::empty(10, 10);
        mask.set(7, 2, true);
        let s = NeuralSampler::new(&mask, &m, 1.0).unwrap();
        let mut rng = seeded(5);
        for _ in 0..1000 {
            assert_eq!(s.draw(&mut rng).cell(), Some((7, 2)));
        }
    }

    #[test]
    fn neural_mixture_fraction() {
        let m = half_free_map();
        let mut mask = GuidanceMask::empty(10, 10);
        // 10 free cells predicted, plus occupied cells that must be ignored
        for c in 0..10 {
            mask.set(0, c, true);
            mask.set(1, c, true);
        }
        let s = NeuralSampler::new(&mask, &m, 0.5).unwrap();
        assert_eq!(s.predicted_cells().len(), 10);
        let mut rng = seeded(6);
        let n = 100_000;
        let inside = (0..n)
            .filter(|_| {
                let (r, c) = s.draw(&mut rng).cell().unwrap();
                mask.get(r, c)
            })
            .count();
        let p = 0.5 + 0.5 * (10.0 / 50.0);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((inside as f64 - n as f64 * p).abs() < 3.0 * sigma, "{inside}");
    }

    #[test]
    fn neural_dimension_mismatch() {
        let m = half_free_map();
        assert!(NeuralSampler::new(&GuidanceMask::empty(9, 10), &m, 0.5).is_err());
    }

    #[test]
    fn informed_before_solution_equals_neural() {
        let m = half_free_map();
        let mut mask = GuidanceMask::empty(10, 10);
        mask.set(4, 1, true);
        let neural = NeuralSampler::new(&mask, &m, 0.5).unwrap();
        let mut informed = NeuralInformedSampler::new(&mask, &m, 0.5).unwrap();
        let (mut a, mut b) = (seeded(8), seeded(8));
        for _ in 0..1000 {
            assert_eq!(informed.draw(f64::INFINITY, &mut a), neural.draw(&mut b));
        }
    }

    #[test]
    fn informed_degenerate_ellipse_stays_on_focal_segment() {
        let m = GridMap::new(30, 30).with_query(Point::new(3.5, 4.5), Point::new(25.5, 20.5));
        let mask = GuidanceMask::empty(30, 30);
        let mut s = NeuralInformedSampler::new(&mask, &m, 0.5).unwrap();
        let c_min = m.start.dist(m.goal);
        let mut rng = seeded(9);
        for _ in 0..10_000 {
            let p = s.draw(c_min, &mut rng);
            assert!(crate::geometry::distance_to_segment(p, m.start, m.goal) < 1e-9);
        }
    }

    #[test]
    fn informed_samples_free_and_inside_ellipse() {
        let mut m = GridMap::new(40, 30).with_query(Point::new(2.5, 15.5), Point::new(37.5, 15.5));
        for r in 5..25 {
            m.set_occupied(r, 20, true);
            m.set_occupied(r, 21, true);
        }
        let mut mask = GuidanceMask::empty(40, 30);
        for r in 0..30 {
            for c in 15..26 {
                mask.set(r, c, true);
            }
        }
        let mut s = NeuralInformedSampler::new(&mask, &m, 0.5).unwrap();
        let mut rng = seeded(10);
        for &c_best in &[40.0, 45.0, 60.0] {
            let spec = s.ellipse(c_best);
            for _ in 0..100_000 / 3 {
                let p = s.draw(c_best, &mut rng);
                assert!(!m.occupied_at(p));
                assert!(spec.contains(p, 1e-9));
            }
        }
    }

    fn pools(pred: usize, inside: usize, outside: usize) -> CornerPools {
        let pts = |n: usize, row: f64| (0..n).map(|i| Point::new(i as f64 + 0.5, row)).collect();
        CornerPools {
            predicted: pts(pred, 1.5),
            inside: pts(inside, 3.5),
            outside: pts(outside, 5.5),
        }
    }

    fn structured(p: CornerPools, alpha_pred: f64, alpha_explore: f64) -> ConvexStructuredSampler {
        let map = GridMap::new(20, 20).with_query(Point::new(0.5, 0.5), Point::new(19.5, 19.5));
        let cfg = PlannerConfig {
            alpha_pred,
            alpha_explore,
            ..PlannerConfig::default()
        };
        ConvexStructuredSampler::new(p, &map, &cfg)
    }

    #[test]
    fn structured_explore_one_only_outside() {
        let s = structured(pools(3, 3, 3), 0.5, 1.0);
        let mut rng = seeded(11);
        for _ in 0..1000 {
            assert_eq!(s.draw(&mut rng).1, SampleSource::OutsideHull);
        }
    }

    #[test]
    fn structured_empty_pools_yield_goal() {
        let s = structured(pools(0, 0, 0), 0.5, 0.2);
        let mut rng = seeded(12);
        for _ in 0..100 {
            assert_eq!(s.draw(&mut rng), (Point::new(19.5, 19.5), SampleSource::Goal));
        }
    }

    #[test]
    fn structured_fall_through_order() {
        // inside empty -> predicted first
        let s = structured(pools(2, 0, 2), 0.0, 0.0);
        let mut rng = seeded(13);
        for _ in 0..100 {
            assert_eq!(s.draw(&mut rng).1, SampleSource::Predicted);
        }
        // only outside available
        let s = structured(pools(0, 0, 2), 1.0, 0.0);
        for _ in 0..100 {
            assert_eq!(s.draw(&mut rng).1, SampleSource::OutsideHull);
        }
    }

    #[test]
    fn structured_predicted_samples_stay_near_corners() {
        let s = structured(pools(4, 4, 4), 1.0, 0.0);
        let mut rng = seeded(14);
        for _ in 0..10_000 {
            let (p, src) = s.draw(&mut rng);
            assert_eq!(src, SampleSource::Predicted);
            let near = s.pools().predicted.iter().any(|c| c.dist(p) <= 2.0 + 1e-12);
            assert!(near);
        }
    }

    #[test]
    fn structured_goal_bias() {
        let s = structured(pools(4, 4, 4), 0.5, 0.2);
        let mut rng = seeded(15);
        let n = 100_000;
        let goals = (0..n)
            .filter(|_| s.sample_with_goal_bias(0.05, &mut rng).1 == SampleSource::Goal)
            .count();
        let sigma = (n as f64 * 0.05 * 0.95).sqrt();
        assert!((goals as f64 - 0.05 * n as f64).abs() < 3.0 * sigma);
    }
}
