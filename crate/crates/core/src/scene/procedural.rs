use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::{default_materials, Bounds, Building, Scene, SceneError, BUILDING_MATERIALS};

/// Clearance between a footprint and its cell border; guarantees streets of
/// at least twice this width.
pub const CELL_MARGIN_M: f64 = 2.0;
pub const MIN_HEIGHT_M: f64 = 3.0;
pub const MAX_HEIGHT_M: f64 = 100.0;
pub const DEFAULT_SCATTERING_COEFF: f64 = 0.2;

/// Parameters of the block generator: a k x k grid of cells over `bounds`,
/// at most one axis-aligned rectangular building per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcGenParams {
    pub bounds: Bounds,
    pub block_grid: u32,
    pub building_probability: f64,
    pub footprint_min_m: f64,
    pub footprint_max_m: f64,
    /// Log-normal height parameters (natural log of meters).
    pub height_log_mean: f64,
    pub height_log_sigma: f64,
    /// Emit a concrete ground plane.
    pub ground: bool,
}

impl Default for ProcGenParams {
    fn default() -> Self {
        ProcGenParams {
            bounds: Bounds::DEFAULT,
            // Even grid keeps a street crossing at the block center.
            block_grid: 6,
            building_probability: 0.6,
            footprint_min_m: 8.0,
            footprint_max_m: 16.0,
            height_log_mean: 12f64.ln(),
            height_log_sigma: 0.5,
            ground: true,
        }
    }
}

impl ProcGenParams {
    pub fn cell_size(&self) -> (f64, f64) {
        let k = f64::from(self.block_grid.max(1));
        (self.bounds.width() / k, self.bounds.height() / k)
    }

    /// Human-readable reasons the parameters cannot be realized.
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !self.bounds.is_valid() {
            out.push((
                "procedural.bounds",
                "bounds must be finite with max > min".to_string(),
            ));
        }
        if self.block_grid == 0 {
            out.push(("procedural.block_grid", "must be >= 1".to_string()));
        }
        if !(0.0..=1.0).contains(&self.building_probability) {
            out.push((
                "procedural.building_probability",
                "must lie in [0, 1]".to_string(),
            ));
        }
        if !(self.footprint_min_m > 0.0 && self.footprint_min_m <= self.footprint_max_m) {
            out.push((
                "procedural.footprint_min_m",
                "must satisfy 0 < min <= max".to_string(),
            ));
        }
        let (cw, ch) = self.cell_size();
        let room = cw.min(ch) - 2.0 * CELL_MARGIN_M;
        if self.footprint_max_m > room {
            out.push((
                "procedural.footprint_max_m",
                format!("exceeds usable cell size {room} m"),
            ));
        }
        if !(self.height_log_sigma >= 0.0 && self.height_log_mean.is_finite()) {
            out.push(("procedural.height_log_sigma", "must be >= 0".to_string()));
        }
        out
    }
}

/// Deterministic block generator: same `(params, seed)` always yields the
/// same scene.
pub fn generate_procedural_scene(params: &ProcGenParams, seed: u64) -> Result<Scene, SceneError> {
    if let Some((key, why)) = params.problems().into_iter().next() {
        return Err(SceneError::Infeasible(format!("{key}: {why}")));
    }
    let heights = LogNormal::new(params.height_log_mean, params.height_log_sigma)
        .map_err(|e| SceneError::Infeasible(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = params.block_grid;
    let (cw, ch) = params.cell_size();
    let b = params.bounds;

    let mut buildings = Vec::new();
    for j in 0..k {
        for i in 0..k {
            if rng.random::<f64>() >= params.building_probability {
                continue;
            }
            let w = rng.random_range(params.footprint_min_m..=params.footprint_max_m);
            let d = rng.random_range(params.footprint_min_m..=params.footprint_max_m);
            let cx = b.xmin + f64::from(i) * cw;
            let cy = b.ymin + f64::from(j) * ch;
            let x0 = rng.random_range(cx + CELL_MARGIN_M..=cx + cw - CELL_MARGIN_M - w);
            let y0 = rng.random_range(cy + CELL_MARGIN_M..=cy + ch - CELL_MARGIN_M - d);
            let height = heights.sample(&mut rng).clamp(MIN_HEIGHT_M, MAX_HEIGHT_M);
            let material = BUILDING_MATERIALS[rng.random_range(0..BUILDING_MATERIALS.len())];
            buildings.push(Building {
                id: buildings.len() as u64,
                footprint: vec![[x0, y0], [x0 + w, y0], [x0 + w, y0 + d], [x0, y0 + d]],
                height_m: height,
                material: material.to_string(),
            });
        }
    }

    Ok(Scene {
        bounds: b,
        ground_material: params.ground.then(|| "concrete".to_string()),
        buildings,
        geo_origin: None,
        seed,
        materials: default_materials(DEFAULT_SCATTERING_COEFF),
    })
}
