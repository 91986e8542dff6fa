use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridworld::{CornerSet, GridMap};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    GaussianShift,
    Deletion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Per-axis standard deviation of the shift, in cells.
    #[serde(default)]
    pub sigma: f64,
    /// Deletion probability per corner.
    #[serde(default)]
    pub fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn shift(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::GaussianShift,
            sigma,
            fraction: 0.0,
            seed,
        }
    }

    pub fn deletion(fraction: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Deletion,
            sigma: 0.0,
            fraction,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Config("noise sigma must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::Config("deletion fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Short label used in reports, e.g. `shift_2` or `delete_30`.
    pub fn label(&self) -> String {
        match self.kind {
            NoiseKind::GaussianShift => format!("shift_{}", self.sigma),
            NoiseKind::Deletion => format!("delete_{}", (self.fraction * 100.0).round()),
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Applies prediction noise to corner cells. Shifts are rounded Gaussian
/// offsets clamped to the grid; a shifted cell on an occupied cell is
/// dropped. Deletion removes each corner independently.
pub fn perturb_corners(corners: &CornerSet, spec: &NoiseSpec, map: &GridMap) -> Result<CornerSet> {
    spec.validate()?;
    let mut rng = seeded(spec.seed);
    let cells = match spec.kind {
        NoiseKind::GaussianShift => {
            if spec.sigma == 0.0 {
                return Ok(corners.clone());
            }
            let normal = Normal::new(0.0, spec.sigma).expect("sigma validated");
            let clamp = |v: f64, n: usize| (v.round().max(0.0) as usize).min(n - 1);
            corners
                .iter()
                .filter_map(|(r, c)| {
                    let dr = normal.sample(&mut rng);
                    let dc = normal.sample(&mut rng);
                    let nr = clamp(r as f64 + dr, map.height);
                    let nc = clamp(c as f64 + dc, map.width);
                    (!map.is_occupied(nr, nc)).then_some((nr, nc))
                })
                .collect()
        }
        NoiseKind::Deletion => corners
            .iter()
            .filter(|_| !rng.random_bool(spec.fraction))
            .collect(),
    };
    Ok(CornerSet::from_cells(cells))
}
