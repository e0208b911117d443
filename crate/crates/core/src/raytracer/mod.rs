//! Deterministic multipath resolution for one transmitter-receiver pair:
//! line of sight, image-method specular reflections, knife-edge diffraction
//! around vertical building edges, and single-bounce diffuse scattering.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::config::TraceConfig;
use crate::geometry::{Bvh, Vec3};
use crate::scene::{Scene, SceneError, TriangleMesh};

mod diffraction;
mod fresnel;
mod path;
mod reflection;
mod scattering;

pub use diffraction::{
    fresnel_kirchhoff_nu, golden_section_min, knife_edge_loss_db, EDGE_SEARCH_TOL_M,
};
pub use fresnel::{fresnel_coefficients, fresnel_from_cos};
pub use path::{
    direction_to_angles, free_space_gain, wrap_phase, AngleSpec, PathType, PropagationPath,
};
pub use reflection::{ImageTree, FACET_MARGIN_M};

/// Mechanism switches and limits for one receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceOptions {
    pub max_depth: usize,
    pub diffraction: bool,
    pub scattering: bool,
    pub n_paths: usize,
}

impl From<&TraceConfig> for TraceOptions {
    fn from(cfg: &TraceConfig) -> Self {
        TraceOptions {
            max_depth: cfg.depth(),
            diffraction: cfg.enable_diffraction,
            scattering: cfg.enable_scattering,
            n_paths: cfg.n_paths(),
        }
    }
}

/// Read-only tracing context over one scene at one carrier frequency.
/// Shareable across threads.
pub struct Tracer<'a> {
    pub scene: &'a Scene,
    pub mesh: &'a TriangleMesh,
    pub bvh: &'a Bvh,
    wavelength: f64,
    /// Complex permittivity per facet.
    permittivity: Vec<Complex64>,
    /// Scattering coefficient per facet.
    scattering: Vec<f64>,
    /// `facing[i * n + j]`: facet `j` may follow facet `i` in a bounce sequence.
    facing: Vec<bool>,
}

impl<'a> Tracer<'a> {
    pub fn new(
        scene: &'a Scene,
        mesh: &'a TriangleMesh,
        bvh: &'a Bvh,
        frequency_hz: f64,
    ) -> Result<Tracer<'a>, SceneError> {
        let mut permittivity = Vec::with_capacity(mesh.facets.len());
        let mut scattering = Vec::with_capacity(mesh.facets.len());
        for f in &mesh.facets {
            let m = scene.material(&f.material)?;
            permittivity.push(m.permittivity(frequency_hz));
            scattering.push(m.scattering_coeff);
        }
        Ok(Tracer {
            scene,
            mesh,
            bvh,
            wavelength: crate::SPEED_OF_LIGHT / frequency_hz,
            permittivity,
            scattering,
            facing: reflection::facing_matrix(&mesh.facets),
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Direct path, if the segment is unobstructed.
    pub fn trace_los(&self, tx: Vec3, rx: Vec3) -> Option<PropagationPath> {
        if self.bvh.occluded(tx, rx) {
            return None;
        }
        let d = tx.distance(rx);
        Some(PropagationPath::new(
            PathType::Los,
            vec![tx, rx],
            free_space_gain(d, self.wavelength),
        ))
    }

    /// All mechanisms enabled in `opts`, strongest first, truncated to
    /// `opts.n_paths`. `images` may carry a precomputed tree for `tx`.
    pub fn trace_receiver(
        &self,
        tx: Vec3,
        rx: Vec3,
        opts: &TraceOptions,
        images: Option<&ImageTree>,
    ) -> Vec<PropagationPath> {
        let mut paths = Vec::new();
        let los = self.trace_los(tx, rx);
        let blocked = los.is_none();
        paths.extend(los);
        if opts.max_depth > 0 {
            match images {
                Some(tree) => paths.extend(self.reflections_from_tree(tree, rx, opts.max_depth)),
                None => paths.extend(self.enumerate_reflections(tx, rx, opts.max_depth)),
            }
        }
        if opts.diffraction && blocked {
            paths.extend(self.trace_diffraction(tx, rx));
        }
        if opts.scattering {
            paths.extend(self.trace_scattering(tx, rx));
        }
        rank_paths(&mut paths);
        paths.truncate(opts.n_paths);
        paths
    }
}

/// Strongest first; ties by earlier arrival, then by mechanism order.
pub fn compare_paths(a: &PropagationPath, b: &PropagationPath) -> Ordering {
    b.gain
        .norm()
        .total_cmp(&a.gain.norm())
        .then(a.toa_s.total_cmp(&b.toa_s))
        .then(a.path_type.cmp(&b.path_type))
}

pub fn rank_paths(paths: &mut [PropagationPath]) {
    paths.sort_by(compare_paths);
}
