//! Training-data export: map images with their query, oracle labels, and a
//! JSON-lines manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::{oracle_guidance, ORACLE_RADIUS};
use crate::error::{Error, Result};
use crate::gridworld::{
    generate_map_with, inflate, random_query, save_map, save_mask, Difficulty, MapGenConfig, DEFAULT_SAFETY_MARGIN,
};
use crate::planners::plan_visibility_astar;
use crate::rng::{derive_seed, seeded};

pub const MANIFEST: &str = "manifest.jsonl";
pub const DATASET_META: &str = "dataset.json";

/// Maps and pairs at full scale, recorded in the dataset metadata.
const FULL_SCALE: (usize, usize) = (4000, 10);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub seed: u64,
    pub count: usize,
    pub difficulty: Difficulty,
    pub pairs_per_map: usize,
    pub width: usize,
    pub height: usize,
    pub safety_margin: f64,
    pub label_radius: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 200,
            difficulty: Difficulty::Medium,
            pairs_per_map: 10,
            width: 224,
            height: 224,
            safety_margin: DEFAULT_SAFETY_MARGIN,
            label_radius: ORACLE_RADIUS,
        }
    }
}

/// One manifest line. Paths are relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub map: usize,
    pub pair: usize,
    pub input: String,
    pub label: String,
    pub path_length: f64,
}

#[derive(Serialize)]
struct Meta<'a> {
    #[serde(flatten)]
    config: &'a DatasetConfig,
    samples: usize,
    full_scale_maps: usize,
    full_scale_pairs_per_map: usize,
}

fn file_names(map: usize, pair: usize) -> (String, String) {
    (
        format!("inputs/map{map:05}_pair{pair:02}.ppm"),
        format!("labels/map{map:05}_pair{pair:02}.pgm"),
    )
}

/// Writes `count * pairs_per_map` input/label pairs under `out_dir` plus the
/// manifest. Output depends only on the config. On failure every file this
/// export would have produced is removed.
pub fn dataset_export(cfg: &DatasetConfig, out_dir: &Path) -> Result<Vec<ManifestRecord>> {
    if cfg.count == 0 || cfg.pairs_per_map == 0 {
        return Err(Error::Config("count and pairs_per_map must be at least 1".into()));
    }
    for sub in ["inputs", "labels"] {
        let dir = out_dir.join(sub);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    let result = export_all(cfg, out_dir);
    if result.is_err() {
        cleanup(cfg, out_dir);
    }
    result
}

fn export_all(cfg: &DatasetConfig, out_dir: &Path) -> Result<Vec<ManifestRecord>> {
    let per_map: Vec<Vec<ManifestRecord>> = (0..cfg.count)
        .into_par_iter()
        .map(|i| export_map(cfg, out_dir, i))
        .collect::<Result<_>>()?;
    let records: Vec<ManifestRecord> = per_map.into_iter().flatten().collect();

    let mut manifest = Vec::new();
    for rec in &records {
        serde_json::to_writer(&mut manifest, rec)?;
        manifest.push(b'\n');
    }
    write_file(&out_dir.join(MANIFEST), &manifest)?;
    let meta = Meta {
        config: cfg,
        samples: records.len(),
        full_scale_maps: FULL_SCALE.0,
        full_scale_pairs_per_map: FULL_SCALE.1,
    };
    let mut meta_bytes = serde_json::to_vec_pretty(&meta)?;
    meta_bytes.push(b'\n');
    write_file(&out_dir.join(DATASET_META), &meta_bytes)?;
    Ok(records)
}

fn export_map(cfg: &DatasetConfig, out_dir: &Path, i: usize) -> Result<Vec<ManifestRecord>> {
    let map_id = i.to_string();
    let gen = MapGenConfig {
        safety_margin: cfg.safety_margin,
        ..MapGenConfig::new(cfg.difficulty, cfg.width, cfg.height)
    };
    let raw = generate_map_with(derive_seed(cfg.seed, &["map", &map_id]), &gen)?;
    let inflated = inflate(&raw, cfg.safety_margin);
    let mut rng = seeded(derive_seed(cfg.seed, &["pairs", &map_id]));
    let min_dist = 0.5 * cfg.width.min(cfg.height) as f64;
    let mut out = Vec::with_capacity(cfg.pairs_per_map);
    for pair in 0..cfg.pairs_per_map {
        let (start, goal) = if pair == 0 {
            (raw.start, raw.goal)
        } else {
            random_query(&inflated, &mut rng, min_dist, true).ok_or(Error::Generation { attempts: 1 })?
        };
        let planning = inflated.clone().with_query(start, goal);
        let path_length = plan_visibility_astar(&planning)?.length.expect("successful plan has a length");
        let label = oracle_guidance(&planning, cfg.label_radius)?;
        let (input_name, label_name) = file_names(i, pair);
        save_map(&raw.clone().with_query(start, goal), out_dir.join(&input_name))?;
        save_mask(&label, out_dir.join(&label_name))?;
        out.push(ManifestRecord {
            map: i,
            pair,
            input: input_name,
            label: label_name,
            path_length,
        });
    }
    Ok(out)
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn cleanup(cfg: &DatasetConfig, out_dir: &Path) {
    for i in 0..cfg.count {
        for pair in 0..cfg.pairs_per_map {
            let (a, b) = file_names(i, pair);
            let _ = fs::remove_file(out_dir.join(a));
            let _ = fs::remove_file(out_dir.join(b));
        }
    }
    let _ = fs::remove_file(out_dir.join(MANIFEST));
    let _ = fs::remove_file(out_dir.join(DATASET_META));
    for sub in ["inputs", "labels"] {
        let _ = fs::remove_dir(out_dir.join(sub));
    }
}
