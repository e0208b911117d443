//! Configuration-driven generator of explicit per-path RF channel datasets
//! over urban scenes.
//!
//! The pipeline builds (or ingests) a block of extruded building footprints,
//! classifies a receiver grid into indoor and outdoor points, resolves the
//! multipath set between one transmitter and every outdoor receiver, keeps
//! the strongest paths, and writes them out as CSV, JSON lines, an NPY
//! array, summary statistics and heatmap rasters.

pub mod cli;
pub mod config;
pub mod export;
pub mod geometry;
pub mod pipeline;
pub mod raytracer;
pub mod scene;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub use config::{load_config, validate_config, GridSpec, TraceConfig};
pub use pipeline::{qc_check, run_trace, ResultSet};
pub use scene::Scene;
