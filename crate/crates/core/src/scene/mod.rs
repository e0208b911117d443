//! Urban scene model: building footprints with heights and materials, the
//! default material table, and the mesh/XML/PLY realizations of a scene.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::polygon::{self, Point2};

mod geojson;
mod io;
mod mesh;
pub(crate) mod procedural;

pub use geojson::import_footprints;
pub use io::{export_scene, import_scene, SCENE_XML_VERSION};
pub use mesh::{ear_clip, triangulate, Facet, SurfaceKind, Triangle, TriangleMesh};
pub use procedural::{generate_procedural_scene, ProcGenParams};

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("building {id}: {reason}")]
    InvalidBuilding { id: u64, reason: String },
    #[error("building {id} has a vertex outside the scene bounds")]
    OutOfBounds { id: u64 },
    #[error("undefined material `{0}`")]
    UnknownMaterial(String),
    #[error("material `{name}`: {reason}")]
    InvalidMaterial { name: String, reason: String },
    #[error("ear clipping failed for building {id}")]
    Triangulation { id: u64 },
    #[error("infeasible generation parameters: {0}")]
    Infeasible(String),
    #[error("footprint document: {0}")]
    Footprints(String),
    #[error("scene.xml: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Electromagnetic parameters of one named surface material.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub name: String,
    pub eps_r: f64,
    pub conductivity_s_per_m: f64,
    pub scattering_coeff: f64,
}

impl MaterialParams {
    pub fn new(name: &str, eps_r: f64, conductivity_s_per_m: f64, scattering_coeff: f64) -> Self {
        MaterialParams {
            name: name.to_string(),
            eps_r,
            conductivity_s_per_m,
            scattering_coeff,
        }
    }

    /// Complex relative permittivity `eps_r - j*sigma/(2*pi*f*eps0)`.
    pub fn permittivity(&self, frequency_hz: f64) -> Complex64 {
        let loss = self.conductivity_s_per_m / (2.0 * PI * frequency_hz * EPSILON_0);
        Complex64::new(self.eps_r, -loss)
    }

    pub fn check(&self) -> Result<(), SceneError> {
        let bad = |reason: &str| {
            Err(SceneError::InvalidMaterial {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if !(self.eps_r >= 1.0 && self.eps_r.is_finite()) {
            return bad("eps_r must be a finite value >= 1");
        }
        if !(self.conductivity_s_per_m >= 0.0 && self.conductivity_s_per_m.is_finite()) {
            return bad("conductivity must be finite and >= 0");
        }
        if !(0.0..=1.0).contains(&self.scattering_coeff) {
            return bad("scattering coefficient must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Built-in materials: concrete, glass and metal at mid-band.
pub fn default_materials(scattering_coeff: f64) -> BTreeMap<String, MaterialParams> {
    [
        MaterialParams::new("concrete", 5.24, 0.46, scattering_coeff),
        MaterialParams::new("glass", 6.31, 0.02, scattering_coeff),
        MaterialParams::new("metal", 1.0, 1e7, scattering_coeff),
    ]
    .into_iter()
    .map(|m| (m.name.clone(), m))
    .collect()
}

/// Names drawn by the procedural generator, in draw order.
pub const BUILDING_MATERIALS: [&str; 3] = ["concrete", "glass", "metal"];

/// Axis-aligned scene rectangle in local meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Bounds {
    /// The 128 m x 128 m block centered on the origin.
    pub const DEFAULT: Bounds = Bounds {
        xmin: -64.0,
        ymin: -64.0,
        xmax: 64.0,
        ymax: 64.0,
    };

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn contains(&self, p: Point2) -> bool {
        p[0] >= self.xmin && p[0] <= self.xmax && p[1] >= self.ymin && p[1] <= self.ymax
    }

    pub fn is_valid(&self) -> bool {
        self.xmin.is_finite()
            && self.ymin.is_finite()
            && self.xmax.is_finite()
            && self.ymax.is_finite()
            && self.xmax > self.xmin
            && self.ymax > self.ymin
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::DEFAULT
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoOrigin {
    pub lat: f64,
    pub lon: f64,
}

/// Flat-roofed prism over a counterclockwise simple footprint.
#[derive(Clone, Debug, PartialEq)]
pub struct Building {
    pub id: u64,
    pub footprint: Vec<Point2>,
    pub height_m: f64,
    pub material: String,
}

impl Building {
    pub fn check(&self) -> Result<(), SceneError> {
        let bad = |reason: &str| {
            Err(SceneError::InvalidBuilding {
                id: self.id,
                reason: reason.to_string(),
            })
        };
        if self.footprint.len() < 3 {
            return bad("footprint needs at least 3 vertices");
        }
        if self.footprint.iter().flatten().any(|c| !c.is_finite()) {
            return bad("non-finite footprint coordinate");
        }
        if !(self.height_m > 0.0 && self.height_m.is_finite()) {
            return bad("height must be positive");
        }
        if polygon::signed_area(&self.footprint) <= 0.0 {
            return bad("footprint must be counterclockwise with positive area");
        }
        if !polygon::is_simple(&self.footprint) {
            return bad("footprint is self-intersecting");
        }
        Ok(())
    }

    pub fn contains_xy(&self, p: Point2) -> bool {
        polygon::contains_inclusive(&self.footprint, p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub bounds: Bounds,
    /// `None` means no ground plane at all (free space below the buildings).
    pub ground_material: Option<String>,
    pub buildings: Vec<Building>,
    pub geo_origin: Option<GeoOrigin>,
    pub seed: u64,
    pub materials: BTreeMap<String, MaterialParams>,
}

impl Scene {
    /// Free space: no ground, no buildings, default material table.
    pub fn free_space() -> Scene {
        Scene {
            bounds: Bounds::DEFAULT,
            ground_material: None,
            buildings: Vec::new(),
            geo_origin: None,
            seed: 0,
            materials: default_materials(0.0),
        }
    }

    /// Flat concrete ground over the default bounds, no buildings.
    pub fn ground_only() -> Scene {
        Scene {
            ground_material: Some("concrete".to_string()),
            ..Scene::free_space()
        }
    }

    /// Directory-safe identifier: `lat_lon` for geo-referenced scenes,
    /// `proc_<seed>` otherwise.
    pub fn id(&self) -> String {
        match self.geo_origin {
            Some(g) => format!("{:.6}_{:.6}", g.lat, g.lon),
            None => format!("proc_{}", self.seed),
        }
    }

    pub fn material(&self, name: &str) -> Result<&MaterialParams, SceneError> {
        self.materials
            .get(name)
            .ok_or_else(|| SceneError::UnknownMaterial(name.to_string()))
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if !self.bounds.is_valid() {
            return Err(SceneError::Schema("invalid bounds".to_string()));
        }
        for (name, m) in &self.materials {
            if name != &m.name {
                return Err(SceneError::InvalidMaterial {
                    name: name.clone(),
                    reason: "table key does not match material name".to_string(),
                });
            }
            m.check()?;
        }
        if let Some(g) = &self.ground_material {
            self.material(g)?;
        }
        for b in &self.buildings {
            b.check()?;
            if !b.footprint.iter().all(|&p| self.bounds.contains(p)) {
                return Err(SceneError::OutOfBounds { id: b.id });
            }
            self.material(&b.material)?;
        }
        Ok(())
    }
}
