//! Guidance masks: oracle labels, corner filtering, prediction noise and
//! dataset export.

mod dataset;
mod noise;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridworld::{CornerSet, GridMap};

pub use dataset::{dataset_export, DatasetConfig, ManifestRecord, DATASET_META, MANIFEST};
pub use noise::{perturb_corners, NoiseKind, NoiseSpec};
pub use oracle::{disk_mask, oracle_corridor, oracle_guidance, ORACLE_RADIUS};

/// Binary grid of predicted promising cells, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuidanceMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl GuidanceMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.bits[row * self.width + col] = on;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.contains(&true)
    }

    pub fn positive_fraction(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    pub fn check_dims(&self, map: &GridMap) -> Result<()> {
        if (self.width, self.height) != map.dims() {
            return Err(Error::DimensionMismatch {
                expected: map.dims(),
                actual: (self.width, self.height),
            });
        }
        Ok(())
    }
}

/// Corners whose cell is set in the mask, in row-major order.
pub fn filter_predicted_corners(mask: &GuidanceMask, corners: &CornerSet) -> Result<CornerSet> {
    if let Some(&(r, c)) = corners.cells().iter().find(|&&(r, c)| r >= mask.height || c >= mask.width) {
        return Err(Error::DimensionMismatch {
            expected: (c + 1, r + 1),
            actual: (mask.width, mask.height),
        });
    }
    Ok(CornerSet::from_cells(
        corners.iter().filter(|&(r, c)| mask.get(r, c)).collect(),
    ))
}
