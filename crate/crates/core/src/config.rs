//! The YAML configuration that drives every pipeline stage.
//!
//! All keys are lowercase snake_case. Unknown keys are rejected, and every
//! validation failure names the offending key as a dotted path.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_yaml::{Mapping, Value};
use thiserror::Error;

use crate::geometry::Vec3;
use crate::scene::{default_materials, MaterialParams, ProcGenParams, Scene};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {}", join(.0))]
    Validation(Vec<Violation>),
    #[error("bad override `{0}`: expected key=value")]
    Override(String),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// One failed invariant, keyed by dotted path.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AntennaModel {
    #[default]
    Isotropic,
}

/// Receiver grid: point `(i, j)` sits at `origin + (i*spacing, j*spacing, height)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub nx: i64,
    pub ny: i64,
    pub spacing_m: f64,
    pub height_m: f64,
    pub origin_xy: [f64; 2],
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nx: 128,
            ny: 128,
            spacing_m: 1.0,
            height_m: 1.0,
            origin_xy: [-64.0, -64.0],
        }
    }
}

impl GridSpec {
    pub fn nx(&self) -> usize {
        self.nx.max(0) as usize
    }

    pub fn ny(&self) -> usize {
        self.ny.max(0) as usize
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, i: usize, j: usize) -> Vec3 {
        Vec3::new(
            self.origin_xy[0] + i as f64 * self.spacing_m,
            self.origin_xy[1] + j as f64 * self.spacing_m,
            self.height_m,
        )
    }
}

/// Partial override of a material's parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialOverride {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conductivity_s_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scattering_coeff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub carrier_frequency_hz: f64,
    pub max_reflection_depth: i64,
    pub enable_diffraction: bool,
    pub enable_scattering: bool,
    /// Strongest paths kept per receiver.
    pub n_paths_retained: i64,
    pub tx_position: [f64; 3],
    pub rx_grid: GridSpec,
    pub antenna_model: AntennaModel,
    pub seed: u64,
    /// Outdoor receivers per batch.
    pub batch_size: i64,
    /// Wall-time budget per batch; exceeding it lowers the reflection depth
    /// for later batches. `None` disables degradation.
    pub batch_time_budget_s: Option<f64>,
    pub min_outdoor_fraction: f64,
    pub materials: BTreeMap<String, MaterialOverride>,
    pub scattering_coefficient_default: f64,
    pub procedural: ProcGenParams,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            carrier_frequency_hz: 3.5e9,
            max_reflection_depth: 3,
            enable_diffraction: true,
            enable_scattering: false,
            n_paths_retained: 5,
            tx_position: [0.0, 0.0, 30.0],
            rx_grid: GridSpec::default(),
            antenna_model: AntennaModel::Isotropic,
            seed: 0,
            batch_size: 1024,
            batch_time_budget_s: None,
            min_outdoor_fraction: 0.3,
            materials: BTreeMap::new(),
            scattering_coefficient_default: crate::scene::procedural::DEFAULT_SCATTERING_COEFF,
            procedural: ProcGenParams::default(),
        }
    }
}

impl TraceConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency_hz
    }

    pub fn tx(&self) -> Vec3 {
        Vec3::from(self.tx_position)
    }

    pub fn depth(&self) -> usize {
        self.max_reflection_depth.max(0) as usize
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths_retained.max(1) as usize
    }

    pub fn batch_len(&self) -> usize {
        self.batch_size.max(1) as usize
    }

    /// Built-in materials at the configured scattering default, with the
    /// configured overrides applied.
    pub fn material_table(&self) -> BTreeMap<String, MaterialParams> {
        let mut table = default_materials(self.scattering_coefficient_default);
        self.apply_overrides(&mut table);
        table
    }

    /// Patches a scene's material table in place. Overrides naming a
    /// material the scene lacks are added when fully specified.
    pub fn apply_material_overrides(&self, scene: &mut Scene) {
        self.apply_overrides(&mut scene.materials);
    }

    fn apply_overrides(&self, table: &mut BTreeMap<String, MaterialParams>) {
        for (name, o) in &self.materials {
            match table.get_mut(name) {
                Some(m) => {
                    if let Some(v) = o.eps_r {
                        m.eps_r = v;
                    }
                    if let Some(v) = o.conductivity_s_per_m {
                        m.conductivity_s_per_m = v;
                    }
                    if let Some(v) = o.scattering_coeff {
                        m.scattering_coeff = v;
                    }
                }
                None => {
                    if let (Some(eps_r), Some(sigma)) = (o.eps_r, o.conductivity_s_per_m) {
                        let s = o
                            .scattering_coeff
                            .unwrap_or(self.scattering_coefficient_default);
                        table.insert(name.clone(), MaterialParams::new(name, eps_r, sigma, s));
                    }
                }
            }
        }
    }

    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("config serializes")
    }
}

/// Every violated invariant; empty when the configuration is usable.
pub fn validate_config(cfg: &TraceConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut check = |ok: bool, key: &str, message: &str| {
        if !ok {
            out.push(Violation {
                key: key.to_string(),
                message: message.to_string(),
            });
        }
    };
    let f = cfg.carrier_frequency_hz;
    check(
        f > 0.0 && f.is_finite(),
        "carrier_frequency_hz",
        "must be a positive finite frequency",
    );
    let lambda = SPEED_OF_LIGHT / f;
    check(
        !(f > 0.0 && f.is_finite()) || (lambda.is_finite() && lambda > 0.0),
        "carrier_frequency_hz",
        "wavelength must be finite and positive",
    );
    check(
        cfg.max_reflection_depth >= 0,
        "max_reflection_depth",
        "must be >= 0",
    );
    check(
        cfg.n_paths_retained >= 1,
        "n_paths_retained",
        "must be >= 1",
    );
    check(
        cfg.tx_position.iter().all(|c| c.is_finite()),
        "tx_position",
        "must be finite",
    );
    let g = &cfg.rx_grid;
    check(g.nx >= 1, "rx_grid.nx", "must be >= 1");
    check(g.ny >= 1, "rx_grid.ny", "must be >= 1");
    check(
        g.spacing_m > 0.0 && g.spacing_m.is_finite(),
        "rx_grid.spacing_m",
        "must be > 0",
    );
    check(
        g.height_m > 0.0 && g.height_m.is_finite(),
        "rx_grid.height_m",
        "must be > 0",
    );
    check(
        g.origin_xy.iter().all(|c| c.is_finite()),
        "rx_grid.origin_xy",
        "must be finite",
    );
    check(cfg.batch_size >= 1, "batch_size", "must be >= 1");
    if let Some(b) = cfg.batch_time_budget_s {
        check(
            b >= 0.0 && b.is_finite(),
            "batch_time_budget_s",
            "must be >= 0 or null",
        );
    }
    check(
        (0.0..=1.0).contains(&cfg.min_outdoor_fraction),
        "min_outdoor_fraction",
        "must lie in [0, 1]",
    );
    check(
        (0.0..=1.0).contains(&cfg.scattering_coefficient_default),
        "scattering_coefficient_default",
        "must lie in [0, 1]",
    );
    for (name, m) in &cfg.materials {
        if let Some(v) = m.eps_r {
            check(
                v >= 1.0 && v.is_finite(),
                &format!("materials.{name}.eps_r"),
                "must be >= 1",
            );
        }
        if let Some(v) = m.conductivity_s_per_m {
            check(
                v >= 0.0 && v.is_finite(),
                &format!("materials.{name}.conductivity_s_per_m"),
                "must be >= 0",
            );
        }
        if let Some(v) = m.scattering_coeff {
            check(
                (0.0..=1.0).contains(&v),
                &format!("materials.{name}.scattering_coeff"),
                "must lie in [0, 1]",
            );
        }
    }
    for (key, message) in cfg.procedural.problems() {
        check(false, key, &message);
    }
    out
}

/// Parses `key=value` with a dotted key; the value is read as a YAML scalar.
pub fn parse_override(raw: &str) -> Result<(String, Value), ConfigError> {
    let (key, value) = raw
        .split_once('=')
        .filter(|(k, _)| !k.trim().is_empty())
        .ok_or_else(|| ConfigError::Override(raw.to_string()))?;
    let value = serde_yaml::from_str(value).map_err(|_| ConfigError::Override(raw.to_string()))?;
    Ok((key.trim().to_string(), value))
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), ConfigError> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        if node.is_null() {
            *node = Value::Mapping(Mapping::new());
        }
        let map = node
            .as_mapping_mut()
            .ok_or_else(|| ConfigError::Override(format!("{key}: `{part}` is not a mapping")))?;
        let k = Value::String(part.to_string());
        if depth + 1 == parts.len() {
            map.insert(k, value);
            return Ok(());
        }
        node = map.entry(k).or_insert(Value::Null);
    }
    Ok(())
}

/// Loads a configuration document, applies dotted `key=value` overrides,
/// fills defaults and validates.
pub fn load_config_with_overrides(
    text: &str,
    overrides: &[String],
) -> Result<TraceConfig, ConfigError> {
    let mut doc: Value = if text.trim().is_empty() {
        Value::Null
    } else {
        serde_yaml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?
    };
    if doc.is_null() {
        doc = Value::Mapping(Mapping::new());
    }
    if !doc.is_mapping() {
        return Err(ConfigError::Parse(
            "top level must be a mapping".to_string(),
        ));
    }
    for raw in overrides {
        let (key, value) = parse_override(raw)?;
        set_path(&mut doc, &key, value)?;
    }
    let cfg: TraceConfig = serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            ConfigError::Parse(e.inner().to_string())
        } else {
            ConfigError::Parse(format!("{path}: {}", e.inner()))
        }
    })?;
    let violations = validate_config(&cfg);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Validation(violations))
    }
}

pub fn load_config(text: &str) -> Result<TraceConfig, ConfigError> {
    load_config_with_overrides(text, &[])
}
