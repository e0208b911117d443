use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExportError;
use crate::config::TraceConfig;
use crate::pipeline::{DegradationEvent, QcReport, ResultSet};
use crate::scene::{GeoOrigin, Scene};

pub const FORMAT_VERSION: &str = "1.0";

/// Contents of `metadata.json`: enough to rebuild a [`ResultSet`] from the
/// JSON-lines records without re-tracing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub format_version: String,
    pub scene_id: String,
    pub geo_origin: Option<GeoOrigin>,
    pub seed: u64,
    pub n_buildings: usize,
    pub n_receivers: usize,
    pub n_outdoor: usize,
    pub n_paths: usize,
    pub config: TraceConfig,
    pub degradation_log: Vec<DegradationEvent>,
    pub qc: QcReport,
    pub wall_time_s: f64,
}

impl Metadata {
    pub fn new(rs: &ResultSet, scene: &Scene) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            scene_id: rs.scene_id.clone(),
            geo_origin: scene.geo_origin,
            seed: scene.seed,
            n_buildings: scene.buildings.len(),
            n_receivers: rs.records.len(),
            n_outdoor: rs.outdoor_count(),
            n_paths: rs.path_count(),
            config: rs.config.clone(),
            degradation_log: rs.degradation_log.clone(),
            qc: rs.qc,
            wall_time_s: rs.wall_time_s,
        }
    }
}

pub fn write_metadata(rs: &ResultSet, scene: &Scene, dir: &Path) -> Result<(), ExportError> {
    let mut text = serde_json::to_string_pretty(&Metadata::new(rs, scene))?;
    text.push('\n');
    fs::write(dir.join("metadata.json"), text)?;
    Ok(())
}

pub fn read_metadata(dir: &Path) -> Result<Metadata, ExportError> {
    let text = fs::read_to_string(dir.join("metadata.json"))?;
    Ok(serde_json::from_str(&text)?)
}
