//! Dataset writers: per-path CSV, JSON lines, the NPY array, metadata,
//! distribution statistics and first-path heatmaps, arranged in the
//! region/scene directory layout.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::pipeline::ResultSet;
use crate::scene::Scene;

mod csv;
mod heatmap;
mod jsonl;
mod layout;
mod metadata;
mod npy;
mod stats;

pub use csv::{format_sci, write_csv, CSV_HEADER};
pub use heatmap::{percentile, render_heatmaps, render_outdoor_mask, HeatmapScale, HEATMAP_NAMES};
pub use jsonl::{read_jsonl, write_jsonl};
pub use layout::{RegionLayout, ResultFiles};
pub use metadata::{read_metadata, write_metadata, Metadata, FORMAT_VERSION};
pub use npy::{npy_header, write_array, ARRAY_FIELDS};
pub use stats::{histogram, write_stats, Histogram, HISTOGRAM_BINS};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
}

/// Trace-stage outputs: CSV, JSON lines, NPY array and metadata.
pub fn write_trace_outputs(
    rs: &ResultSet,
    scene: &Scene,
    files: &ResultFiles,
) -> Result<(), ExportError> {
    fs::create_dir_all(&files.dir)?;
    write_csv(rs, &files.csv())?;
    write_jsonl(rs, &files.jsonl())?;
    write_array(rs, &files.array())?;
    write_metadata(rs, scene, &files.dir)
}

/// Analysis-stage outputs, a pure function of the stored results.
pub fn write_analysis(rs: &ResultSet, files: &ResultFiles) -> Result<(), ExportError> {
    fs::create_dir_all(&files.dir)?;
    write_stats(rs, &files.dir)?;
    render_heatmaps(rs, &files.heatmaps())?;
    render_outdoor_mask(rs, &files.outdoor_mask())
}

/// Rebuilds a [`ResultSet`] from `metadata.json` and the JSON-lines records.
pub fn load_results(dir: &Path) -> Result<ResultSet, ExportError> {
    let files = ResultFiles::new(dir);
    let meta = read_metadata(dir)?;
    let records = read_jsonl(&files.jsonl())?;
    if records.len() != meta.n_receivers {
        return Err(ExportError::Format(format!(
            "{} holds {} receivers, metadata says {}",
            files.jsonl().display(),
            records.len(),
            meta.n_receivers
        )));
    }
    Ok(ResultSet {
        scene_id: meta.scene_id,
        records,
        degradation_log: meta.degradation_log,
        qc: meta.qc,
        config: meta.config,
        wall_time_s: meta.wall_time_s,
    })
}
