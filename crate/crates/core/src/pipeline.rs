//! Batched, parallel and schedule-independent tracing over the receiver
//! grid, with depth degradation under a per-batch time budget and the
//! outdoor-density quality check.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{validate_config, TraceConfig, Violation};
use crate::geometry::{filter_outdoor_receivers, Bvh, RxPoint};
use crate::raytracer::{PropagationPath, TraceOptions, Tracer};
use crate::scene::{triangulate, Scene, SceneError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Config(Vec<Violation>),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradationEvent {
    pub batch_index: usize,
    pub old_depth: usize,
    pub new_depth: usize,
    pub elapsed_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcReport {
    pub outdoor_fraction: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReceiverRecord {
    pub rx: RxPoint,
    /// Strongest first; empty for indoor receivers.
    pub paths: Vec<PropagationPath>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultSet {
    pub scene_id: String,
    /// One per grid point, in receiver-index order.
    pub records: Vec<ReceiverRecord>,
    pub degradation_log: Vec<DegradationEvent>,
    pub qc: QcReport,
    pub config: TraceConfig,
    pub wall_time_s: f64,
}

impl ResultSet {
    pub fn path_count(&self) -> usize {
        self.records.iter().map(|r| r.paths.len()).sum()
    }

    pub fn outdoor_count(&self) -> usize {
        self.records.iter().filter(|r| r.rx.outdoor).count()
    }
}

/// Traces every outdoor receiver of `cfg.rx_grid` in `scene`.
///
/// Receivers are processed in index-ordered batches; parallelism stays
/// inside a batch. Without a time budget the result does not depend on the
/// batch size or the number of threads.
pub fn run_trace(scene: &Scene, cfg: &TraceConfig) -> Result<ResultSet, PipelineError> {
    let started = Instant::now();
    let violations = validate_config(cfg);
    if !violations.is_empty() {
        return Err(PipelineError::Config(violations));
    }
    let mut scene = scene.clone();
    cfg.apply_material_overrides(&mut scene);
    scene.validate()?;
    let mesh = triangulate(&scene)?;
    let bvh = Bvh::build(&mesh);
    let tracer = Tracer::new(&scene, &mesh, &bvh, cfg.carrier_frequency_hz)?;

    let receivers = filter_outdoor_receivers(&scene, &cfg.rx_grid);
    let outdoor: Vec<usize> = receivers
        .iter()
        .filter(|r| r.outdoor)
        .map(|r| r.index)
        .collect();
    let tx = cfg.tx();
    let mut opts = TraceOptions::from(cfg);
    let images = tracer.image_tree(tx, opts.max_depth);

    let mut paths: Vec<Vec<PropagationPath>> = vec![Vec::new(); receivers.len()];
    let mut degradation_log = Vec::new();
    for (batch_index, batch) in outdoor.chunks(cfg.batch_len()).enumerate() {
        let batch_start = Instant::now();
        let traced: Vec<Vec<PropagationPath>> = batch
            .par_iter()
            .map(|&k| tracer.trace_receiver(tx, receivers[k].position, &opts, Some(&images)))
            .collect();
        for (&k, p) in batch.iter().zip(traced) {
            paths[k] = p;
        }
        let elapsed_s = batch_start.elapsed().as_secs_f64();
        if let Some(budget) = cfg.batch_time_budget_s {
            if elapsed_s > budget && opts.max_depth > 1 {
                degradation_log.push(DegradationEvent {
                    batch_index,
                    old_depth: opts.max_depth,
                    new_depth: opts.max_depth - 1,
                    elapsed_s,
                });
                opts.max_depth -= 1;
            }
        }
    }

    let records = receivers
        .into_iter()
        .zip(paths)
        .map(|(rx, paths)| ReceiverRecord { rx, paths })
        .collect();
    let rs = ResultSet {
        scene_id: scene.id(),
        records,
        degradation_log,
        qc: QcReport {
            outdoor_fraction: 0.0,
            passed: false,
        },
        config: cfg.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    Ok(qc_check(rs, cfg))
}

/// [`run_trace`] on a dedicated pool of `threads` workers (0 = one per core).
pub fn run_trace_with_threads(
    scene: &Scene,
    cfg: &TraceConfig,
    threads: usize,
) -> Result<ResultSet, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
    pool.install(|| run_trace(scene, cfg))
}

/// Fills in the outdoor fraction over the whole grid and the pass flag.
pub fn qc_check(mut rs: ResultSet, cfg: &TraceConfig) -> ResultSet {
    let total = cfg.rx_grid.len();
    let fraction = if total == 0 {
        0.0
    } else {
        rs.outdoor_count() as f64 / total as f64
    };
    rs.qc = QcReport {
        outdoor_fraction: fraction,
        passed: fraction >= cfg.min_outdoor_fraction,
    };
    rs
}
